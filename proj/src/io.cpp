// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/io.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "gmprop/error.hpp"
#include "json.hpp"

namespace gmprop::io {

using nlohmann::json;

namespace {

// Renormalization is skipped when the sum is already one up to rounding, so
// proposals written by this library read back bit-for-bit.
constexpr double kAlreadyNormalized = 1e-12;

std::string at_line(std::size_t line_number) { return fmt::format("line {}", line_number); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

json parse_json_line(std::string_view line, std::size_t line_number) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) {
      throw ValidationError(at_line(line_number) + ": expected a JSON object");
    }
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(at_line(line_number) + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* name, const std::string& context) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw ValidationError(context + ": missing field '" + name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(context + ": field '" + name + "' has the wrong type");
  }
}

// Swaps reversed bounds and clamps into [0, duration], recording each repair.
TemporalSpan repair_span(double start, double end, double duration, const std::string& context,
                         std::vector<std::string>& warnings) {
  if (start > end) {
    warnings.push_back(fmt::format("{}: start {} > end {}, swapped", context, start, end));
    std::swap(start, end);
  }
  if (start < 0.0 || end > duration) {
    warnings.push_back(fmt::format("{}: span ({}, {}) clamped to [0, {}]", context, start, end,
                                   duration));
    start = std::clamp(start, 0.0, duration);
    end = std::clamp(end, 0.0, duration);
  }
  return TemporalSpan::Seconds(start, end);
}

std::string fixed4(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

ReportFormat parse_report_format(std::string_view token) {
  if (token == "csv") return ReportFormat::kCsv;
  if (token == "markdown" || token == "md") return ReportFormat::kMarkdown;
  throw ValidationError("unknown report format '" + std::string(token) +
                        "' (valid: csv, markdown)");
}

GroundTruthFormat parse_ground_truth_format(std::string_view token) {
  if (token == "native") return GroundTruthFormat::kNative;
  if (token == "charades") return GroundTruthFormat::kCharades;
  if (token == "activitynet") return GroundTruthFormat::kActivityNet;
  throw ValidationError("unknown ground-truth format '" + std::string(token) +
                        "' (valid: native, charades, activitynet)");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed reading '" + path.string() + "'");
  }
  return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

// --- proposals -------------------------------------------------------------

QueryCase parse_proposal_line(std::string_view line, std::size_t line_number) {
  const json j = parse_json_line(line, line_number);
  std::string context = at_line(line_number);
  const auto query_id = field<std::string>(j, "query_id", context);
  context += ": query " + query_id;
  const auto video_id = field<std::string>(j, "video_id", context);
  const auto duration = field<double>(j, "duration_sec", context);
  const auto num_segments = field<int>(j, "num_segments", context);
  const auto& raw = j.find("proposals");
  if (raw == j.end() || !raw->is_array()) {
    throw ValidationError(context + ": missing field 'proposals'");
  }

  std::vector<MixtureProposal> proposals;
  proposals.reserve(raw->size());
  for (std::size_t n = 0; n < raw->size(); ++n) {
    const json& p = (*raw)[n];
    const std::string where = fmt::format("{}: proposal {}", context, n + 1);
    if (!p.is_object()) throw ValidationError(where + ": expected an object");
    const auto centers = field<std::vector<double>>(p, "centers", where);
    const auto widths = field<std::vector<double>>(p, "widths", where);
    auto attention = field<std::vector<double>>(p, "attention", where);
    const auto loss = field<double>(p, "recon_loss", where);
    if (centers.size() != widths.size()) {
      throw ValidationError(where + ": centers and widths differ in length");
    }
    double sum = 0.0;
    for (double a : attention) sum += a;
    if (std::abs(sum - 1.0) > kAttentionRenormTolerance) {
      throw ValidationError(fmt::format("{}: attention sums to {}, outside 1 +/- {}", where, sum,
                                        kAttentionRenormTolerance));
    }
    if (std::abs(sum - 1.0) > kAlreadyNormalized) {
      for (double& a : attention) a /= sum;
    }
    try {
      std::vector<GaussianMask> masks;
      masks.reserve(centers.size());
      for (std::size_t m = 0; m < centers.size(); ++m) {
        try {
          masks.emplace_back(centers[m], widths[m]);
        } catch (const ValidationError& e) {
          throw ValidationError(fmt::format("mask {}: {}", m + 1, e.what()));
        }
      }
      proposals.emplace_back(std::move(masks), std::move(attention), loss);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  try {
    return QueryCase(query_id, video_id, duration, num_segments, std::move(proposals));
  } catch (const ValidationError& e) {
    throw ValidationError(at_line(line_number) + ": " + e.what());
  }
}

std::string format_proposal_line(const QueryCase& query) {
  json proposals = json::array();
  for (const auto& p : query.proposals()) {
    json centers = json::array();
    json widths = json::array();
    for (const auto& m : p.masks()) {
      centers.push_back(m.center());
      widths.push_back(m.width());
    }
    json o = json::object();
    o["centers"] = std::move(centers);
    o["widths"] = std::move(widths);
    o["attention"] = p.attention();
    o["recon_loss"] = p.recon_loss();
    proposals.push_back(std::move(o));
  }
  nlohmann::ordered_json j;
  j["query_id"] = query.query_id();
  j["video_id"] = query.video_id();
  j["duration_sec"] = query.duration_sec();
  j["num_segments"] = query.num_segments();
  j["proposals"] = std::move(proposals);
  return j.dump();
}

std::vector<QueryCase> read_proposals(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<QueryCase> cases;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    cases.push_back(parse_proposal_line(lines[i], i + 1));
  }
  return cases;
}

void write_proposals(std::span<const QueryCase> cases, const fs::path& path) {
  std::string out;
  for (const auto& c : cases) {
    out += format_proposal_line(c);
    out += '\n';
  }
  write_file_atomic(path, out);
}

// --- ground truth ------------------------------------------------------------

GroundTruthAnnotation parse_ground_truth_line(std::string_view line, std::size_t line_number,
                                              std::vector<std::string>& warnings) {
  const json j = parse_json_line(line, line_number);
  std::string context = at_line(line_number);
  GroundTruthAnnotation gt;
  gt.query_id = field<std::string>(j, "query_id", context);
  if (gt.query_id.empty()) throw ValidationError(context + ": empty query_id");
  context += ": query " + gt.query_id;
  gt.video_id = field<std::string>(j, "video_id", context);
  gt.duration_sec = field<double>(j, "duration_sec", context);
  if (!std::isfinite(gt.duration_sec) || gt.duration_sec <= 0.0) {
    throw ValidationError(context + ": duration_sec must be > 0");
  }
  gt.span_sec = repair_span(field<double>(j, "start_sec", context),
                            field<double>(j, "end_sec", context), gt.duration_sec, context,
                            warnings);
  gt.sentence = field<std::string>(j, "sentence", context);
  return gt;
}

std::string format_ground_truth_line(const GroundTruthAnnotation& gt) {
  nlohmann::ordered_json j;
  j["query_id"] = gt.query_id;
  j["video_id"] = gt.video_id;
  j["duration_sec"] = gt.duration_sec;
  j["start_sec"] = gt.span_sec.start();
  j["end_sec"] = gt.span_sec.end();
  j["sentence"] = gt.sentence;
  return j.dump();
}

Ingested<GroundTruthAnnotation> read_ground_truth(const fs::path& path) {
  const std::string text = read_file(path);
  Ingested<GroundTruthAnnotation> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    out.items.push_back(parse_ground_truth_line(lines[i], i + 1, out.warnings));
  }
  return out;
}

void write_ground_truth(std::span<const GroundTruthAnnotation> annotations, const fs::path& path) {
  std::string out;
  for (const auto& gt : annotations) {
    out += format_ground_truth_line(gt);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::map<std::string, double> read_video_durations(const fs::path& path) {
  const std::string text = read_file(path);
  std::map<std::string, double> durations;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line(trim(lines[i]));
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string video_id;
    std::string seconds;
    fields >> video_id >> seconds;
    const auto value = parse_double(seconds);
    if (!value) {
      if (durations.empty() && i == 0) continue;  // header
      throw ValidationError(path.string() + ": " + at_line(i + 1) + ": bad duration '" +
                            seconds + "'");
    }
    if (*value <= 0.0) {
      throw ValidationError(path.string() + ": " + at_line(i + 1) + ": video " + video_id +
                            " has non-positive duration");
    }
    durations[video_id] = *value;
  }
  return durations;
}

Ingested<GroundTruthAnnotation> parse_charades(std::string_view text,
                                               const std::map<std::string, double>& durations) {
  Ingested<GroundTruthAnnotation> out;
  std::map<std::string, std::size_t> ordinal;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string context = at_line(i + 1);
    const std::string_view line = trim(lines[i]);
    if (line.empty()) {
      out.warnings.push_back(context + ": empty line skipped");
      continue;
    }
    const auto sep = line.find("##");
    if (sep == std::string_view::npos) {
      throw ValidationError(context + ": missing '##' separator");
    }
    std::istringstream head{std::string(line.substr(0, sep))};
    std::string video_id;
    std::string start_tok;
    std::string end_tok;
    std::string extra;
    head >> video_id >> start_tok >> end_tok;
    if (video_id.empty() || end_tok.empty() || (head >> extra)) {
      throw ValidationError(context + ": expected '<video_id> <start> <end>##<sentence>'");
    }
    const auto start = parse_double(start_tok);
    const auto end = parse_double(end_tok);
    if (!start || !end) {
      throw ValidationError(context + ": non-numeric time in '" + std::string(line.substr(0, sep)) +
                            "'");
    }
    const auto d = durations.find(video_id);
    if (d == durations.end()) {
      throw ValidationError(context + ": no duration known for video " + video_id);
    }
    GroundTruthAnnotation gt;
    gt.video_id = video_id;
    gt.query_id = fmt::format("{}#{}", video_id, ordinal[video_id]++);
    gt.duration_sec = d->second;
    gt.span_sec = repair_span(*start, *end, gt.duration_sec, context, out.warnings);
    gt.sentence = std::string(trim(line.substr(sep + 2)));
    out.items.push_back(std::move(gt));
  }
  return out;
}

Ingested<GroundTruthAnnotation> read_charades_annotations(
    const fs::path& path, const std::map<std::string, double>& durations) {
  return parse_charades(read_file(path), durations);
}

Ingested<GroundTruthAnnotation> parse_activitynet(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw ValidationError(std::string("malformed ActivityNet annotation document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("ActivityNet annotations must be an object keyed by video id");
  }
  Ingested<GroundTruthAnnotation> out;
  for (const auto& [video_id, video] : doc.items()) {
    const std::string context = "video " + video_id;
    if (!video.is_object()) throw ValidationError(context + ": expected an object");
    const auto duration = video.find("duration");
    if (duration == video.end() || !duration->is_number()) {
      throw ValidationError(context + ": missing numeric 'duration'");
    }
    const double seconds = duration->get<double>();
    if (!(seconds > 0.0)) {
      throw ValidationError(context + ": duration must be > 0");
    }
    const auto stamps = video.find("timestamps");
    const auto sentences = video.find("sentences");
    if (stamps == video.end() || !stamps->is_array() || sentences == video.end() ||
        !sentences->is_array()) {
      throw ValidationError(context + ": needs 'timestamps' and 'sentences' arrays");
    }
    if (stamps->size() != sentences->size()) {
      throw ValidationError(fmt::format("{}: {} timestamps but {} sentences", context,
                                        stamps->size(), sentences->size()));
    }
    for (std::size_t k = 0; k < stamps->size(); ++k) {
      const auto& ts = (*stamps)[k];
      const std::string where = fmt::format("{}: timestamp {}", context, k);
      if (!ts.is_array() || ts.size() != 2 || !ts[0].is_number() || !ts[1].is_number()) {
        throw ValidationError(where + ": expected [start, end]");
      }
      if (!(*sentences)[k].is_string()) {
        throw ValidationError(where + ": sentence is not a string");
      }
      GroundTruthAnnotation gt;
      gt.video_id = video_id;
      gt.query_id = fmt::format("{}#{}", video_id, k);
      gt.duration_sec = seconds;
      gt.span_sec = repair_span(ts[0].get<double>(), ts[1].get<double>(), seconds, where,
                                out.warnings);
      gt.sentence = std::string(trim((*sentences)[k].get<std::string>()));
      out.items.push_back(std::move(gt));
    }
  }
  return out;
}

Ingested<GroundTruthAnnotation> read_activitynet_annotations(const fs::path& path) {
  return parse_activitynet(read_file(path));
}

// --- predictions -------------------------------------------------------------

PredictionRecord parse_prediction_line(std::string_view line, std::size_t line_number) {
  const json j = parse_json_line(line, line_number);
  std::string context = at_line(line_number);
  PredictionRecord r;
  r.query_id = field<std::string>(j, "query_id", context);
  if (r.query_id.empty()) throw ValidationError(context + ": empty query_id");
  context += ": query " + r.query_id;
  try {
    r.span_sec = TemporalSpan::Seconds(field<double>(j, "start_sec", context),
                                       field<double>(j, "end_sec", context));
    r.boundary = parse_boundary_strategy(field<std::string>(j, "boundary", context));
    r.selector = parse_selection_strategy(field<std::string>(j, "selector", context));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(context, 0) == 0) throw;
    throw ValidationError(context + ": " + what);
  }
  const auto winner = field<long long>(j, "winner_index", context);
  if (winner < 1) throw ValidationError(context + ": winner_index must be >= 1");
  r.winner_index = static_cast<std::size_t>(winner);
  r.score = field<double>(j, "score", context);
  return r;
}

std::string format_prediction_line(const PredictionRecord& record) {
  nlohmann::ordered_json j;
  j["query_id"] = record.query_id;
  j["start_sec"] = record.span_sec.start();
  j["end_sec"] = record.span_sec.end();
  j["boundary"] = std::string(to_token(record.boundary));
  j["selector"] = std::string(to_token(record.selector));
  j["winner_index"] = record.winner_index;
  j["score"] = record.score;
  return j.dump();
}

std::vector<PredictionRecord> read_predictions(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<PredictionRecord> records;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    records.push_back(parse_prediction_line(lines[i], i + 1));
  }
  return records;
}

std::string format_predictions(std::vector<PredictionRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.query_id < b.query_id; });
  std::string out;
  for (const auto& r : records) {
    out += format_prediction_line(r);
    out += '\n';
  }
  return out;
}

void write_predictions(std::vector<PredictionRecord> records, const fs::path& path) {
  write_file_atomic(path, format_predictions(std::move(records)));
}

// --- reports -----------------------------------------------------------------

std::string threshold_label(double threshold) { return fmt::format("IoU@{}", threshold); }

std::string format_report(const AblationReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kCsv) {
    out += "boundary,selector";
    for (double t : report.thresholds) out += "," + threshold_label(t);
    out += ",mIoU\n";
    for (const auto& row : report.rows) {
      out += fmt::format("{},{}", to_token(row.boundary), to_token(row.selector));
      for (double r : row.report.recall_at) out += "," + fixed4(r);
      out += "," + fixed4(row.report.mean_iou) + "\n";
    }
    return out;
  }

  out += "| Boundary Prediction | Top-1 Proposal Selection |";
  for (double t : report.thresholds) out += " " + threshold_label(t) + " |";
  out += " mIoU |\n|---|---|";
  for (std::size_t i = 0; i <= report.thresholds.size(); ++i) out += "---:|";
  out += "\n";
  const AblationRow* previous = nullptr;
  for (const auto& row : report.rows) {
    const bool new_group = previous == nullptr || previous->boundary != row.boundary;
    out += fmt::format("| {} | {} |", new_group ? display_name(row.boundary) : "",
                       display_name(row.selector));
    for (double r : row.report.recall_at) out += " " + fixed4(r) + " |";
    out += " " + fixed4(row.report.mean_iou) + " |\n";
    previous = &row;
  }
  return out;
}

std::string format_eval_report(const EvalReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kCsv) {
    out += "num_queries";
    for (double t : report.thresholds) out += "," + threshold_label(t);
    out += ",mIoU\n";
    out += std::to_string(report.num_queries);
    for (double r : report.recall_at) out += "," + fixed4(r);
    out += "," + fixed4(report.mean_iou) + "\n";
    return out;
  }
  out += "| Queries |";
  for (double t : report.thresholds) out += " " + threshold_label(t) + " |";
  out += " mIoU |\n|---:|";
  for (std::size_t i = 0; i <= report.thresholds.size(); ++i) out += "---:|";
  out += fmt::format("\n| {} |", report.num_queries);
  for (double r : report.recall_at) out += " " + fixed4(r) + " |";
  out += " " + fixed4(report.mean_iou) + " |\n";
  return out;
}

void write_report(const AblationReport& report, const fs::path& path, ReportFormat format) {
  write_file_atomic(path, format_report(report, format));
}

}  // namespace gmprop::io
