// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/commands.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <map>
#include <ostream>
#include <system_error>

#include "gmprop/error.hpp"
#include "json.hpp"

namespace gmprop::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxListedOffenders = 10;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Tracks files written by a command so they can be removed if a later step fails.
class OutputGuard {
 public:
  void write(const fs::path& path, std::string_view content) {
    io::write_file_atomic(path, content);
    written_.push_back(path);
  }
  void commit() { written_.clear(); }
  void rollback() {
    for (const auto& p : written_) {
      std::error_code ignored;
      fs::remove(p, ignored);
    }
    written_.clear();
  }

 private:
  std::vector<fs::path> written_;
};

// Provenance record: resolved config plus digests of every input and output.
class Manifest {
 public:
  explicit Manifest(std::string_view command) {
    doc_["tool"] = std::string(kToolName);
    doc_["version"] = std::string(kToolVersion);
    doc_["command"] = std::string(command);
    doc_["config"] = Json::object();
    doc_["inputs"] = Json::array();
    doc_["outputs"] = Json::array();
  }

  Json& config() { return doc_["config"]; }

  void input(std::string_view role, const fs::path& path) {
    add("inputs", role, path, io::read_file(path));
  }
  void output(std::string_view role, const fs::path& path, std::string_view content) {
    add("outputs", role, path, content);
  }

  std::string dump() const {
    Json doc = doc_;
    doc["created_at"] = utc_timestamp();
    return doc.dump(2) + "\n";
  }

 private:
  void add(const char* list, std::string_view role, const fs::path& path,
           std::string_view content) {
    Json entry;
    entry["role"] = std::string(role);
    entry["path"] = path.string();
    entry["sha256"] = sha256_hex(content);
    doc_[list].push_back(std::move(entry));
  }

  Json doc_;
};

template <typename Body>
int guarded(std::ostream& err, OutputGuard& guard, Body&& body) {
  try {
    body();
    guard.commit();
    return kExitOk;
  } catch (const UnmatchedQueriesError& e) {
    guard.rollback();
    err << "error: " << e.what() << "\n";
    const auto offenders = e.offenders(kMaxListedOffenders);
    err << "  first unmatched query ids:";
    for (const auto& id : offenders) err << " " << id;
    err << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    guard.rollback();
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    guard.rollback();
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    guard.rollback();
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

void require_output(const fs::path& path, std::string_view flag) {
  if (path.empty()) throw ValidationError(std::string("missing required output path ") +
                                          std::string(flag));
}

std::vector<BoundaryStrategy> resolve_boundaries(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {kAllBoundaryStrategies.begin(), kAllBoundaryStrategies.end()};
  std::vector<BoundaryStrategy> out;
  for (const auto& t : tokens) out.push_back(parse_boundary_strategy(t));
  return out;
}

std::vector<SelectionStrategy> resolve_selectors(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {kAllSelectionStrategies.begin(), kAllSelectionStrategies.end()};
  std::vector<SelectionStrategy> out;
  for (const auto& t : tokens) out.push_back(parse_selection_strategy(t));
  return out;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterRangeError(fmt::format("gamma must lie in (0, 1], got {}", gamma));
  }
}

void describe_ground_truth(Manifest& manifest, const GroundTruthSource& source) {
  manifest.config()["gt_format"] = source.format;
  manifest.input("ground_truth", source.path);
  if (source.durations) manifest.input("durations", *source.durations);
}

}  // namespace

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::vector<GroundTruthAnnotation> load_ground_truth(const GroundTruthSource& source,
                                                     std::ostream& err) {
  io::Ingested<GroundTruthAnnotation> loaded;
  switch (io::parse_ground_truth_format(source.format)) {
    case io::GroundTruthFormat::kNative:
      loaded = io::read_ground_truth(source.path);
      break;
    case io::GroundTruthFormat::kCharades:
      if (!source.durations) {
        throw ValidationError("charades ground truth needs a --durations table");
      }
      loaded = io::read_charades_annotations(source.path, io::read_video_durations(*source.durations));
      break;
    case io::GroundTruthFormat::kActivityNet:
      loaded = io::read_activitynet_annotations(source.path);
      break;
  }
  for (const auto& w : loaded.warnings) err << "warning: " << source.path.string() << ": " << w << "\n";
  return std::move(loaded.items);
}

int run_infer(const InferOptions& options, std::ostream& out, std::ostream& err) {
  OutputGuard guard;
  return guarded(err, guard, [&] {
    require_output(options.out, "--out");
    const BoundaryStrategy boundary = parse_boundary_strategy(options.boundary);
    const SelectionStrategy selector = parse_selection_strategy(options.selector);
    check_gamma(options.gamma);

    Manifest manifest("infer");
    manifest.config()["boundary"] = std::string(to_token(boundary));
    manifest.config()["selector"] = std::string(to_token(selector));
    manifest.config()["gamma"] = options.gamma;
    manifest.input("proposals", options.proposals);

    const auto cases = io::read_proposals(options.proposals);
    const auto predictions = infer_all(cases, boundary, selector, options.gamma, options.threads);

    std::vector<io::PredictionRecord> records;
    records.reserve(predictions.size());
    std::size_t ties = 0;
    std::size_t degenerate = 0;
    for (const auto& p : predictions) {
      records.push_back({p.query_id, p.span_sec, boundary, selector, p.winner_index, p.score});
      ties += p.tie ? 1 : 0;
      degenerate += p.degenerate_count;
    }
    const std::string body = io::format_predictions(records);
    guard.write(options.out, body);
    manifest.output("predictions", options.out, body);
    guard.write(manifest_path(options.out), manifest.dump());

    out << fmt::format("{} predictions ({} / {}, gamma {}) -> {}\n", records.size(),
                       to_token(boundary), to_token(selector), options.gamma,
                       options.out.string());
    out << fmt::format("selection ties: {}, repaired boundaries: {}\n", ties, degenerate);
  });
}

int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  OutputGuard guard;
  return guarded(err, guard, [&] {
    require_output(options.out, "--out");
    const EvalConfig config(options.thresholds, parse_threshold_mode(options.mode));
    const io::ReportFormat format = io::parse_report_format(options.format);

    Manifest manifest("evaluate");
    manifest.config()["thresholds"] = options.thresholds;
    manifest.config()["threshold_mode"] = std::string(to_token(config.mode()));
    manifest.config()["format"] = options.format;
    manifest.input("predictions", options.predictions);
    describe_ground_truth(manifest, options.ground_truth);

    const auto records = io::read_predictions(options.predictions);
    if (records.empty()) {
      throw ValidationError("predictions file '" + options.predictions.string() + "' is empty");
    }
    const auto ground_truth = load_ground_truth(options.ground_truth, err);
    std::vector<SpanPrediction> spans;
    spans.reserve(records.size());
    for (const auto& r : records) spans.push_back({r.query_id, r.span_sec});
    const EvalReport report = evaluate(spans, ground_truth, config);

    const std::string body = io::format_eval_report(report, format);
    guard.write(options.out, body);
    manifest.output("report", options.out, body);
    guard.write(manifest_path(options.out), manifest.dump());
    out << io::format_eval_report(report, io::ReportFormat::kMarkdown);
  });
}

int run_ablate(const AblateOptions& options, std::ostream& out, std::ostream& err) {
  OutputGuard guard;
  return guarded(err, guard, [&] {
    require_output(options.out, "--out");
    const auto boundaries = resolve_boundaries(options.boundaries);
    const auto selectors = resolve_selectors(options.selectors);
    check_gamma(options.gamma);
    const EvalConfig config(options.thresholds, parse_threshold_mode(options.mode));
    const io::ReportFormat format = io::parse_report_format(options.format);

    Manifest manifest("ablate");
    Json b = Json::array();
    for (auto s : boundaries) b.push_back(std::string(to_token(s)));
    Json s = Json::array();
    for (auto x : selectors) s.push_back(std::string(to_token(x)));
    manifest.config()["boundaries"] = std::move(b);
    manifest.config()["selectors"] = std::move(s);
    manifest.config()["gamma"] = options.gamma;
    manifest.config()["thresholds"] = options.thresholds;
    manifest.config()["threshold_mode"] = std::string(to_token(config.mode()));
    manifest.config()["format"] = options.format;
    manifest.input("proposals", options.proposals);
    describe_ground_truth(manifest, options.ground_truth);

    const auto cases = io::read_proposals(options.proposals);
    if (cases.empty()) {
      throw ValidationError("proposals file '" + options.proposals.string() + "' is empty");
    }
    const auto ground_truth = load_ground_truth(options.ground_truth, err);
    const AblationReport report = ablation_grid(cases, ground_truth, boundaries, selectors,
                                                options.gamma, config, options.threads);

    const std::string body = io::format_report(report, format);
    guard.write(options.out, body);
    manifest.output("report", options.out, body);
    guard.write(manifest_path(options.out), manifest.dump());
    out << fmt::format("{} queries, {} grid cells\n", cases.size(), report.rows.size());
    out << io::format_report(report, io::ReportFormat::kMarkdown);
  });
}

int run_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  OutputGuard guard;
  return guarded(err, guard, [&] {
    require_output(options.out_proposals, "--out-proposals");
    require_output(options.out_ground_truth, "--out-gt");
    synth::SynthConfig config = options.config;
    config.loss_model = synth::parse_loss_model(options.loss_model);
    config.validate();

    Manifest manifest("synth");
    manifest.config()["queries"] = config.num_queries;
    manifest.config()["proposals"] = config.n_proposals;
    manifest.config()["masks"] = config.masks_per_proposal;
    manifest.config()["center_noise_sd"] = config.center_noise_sd;
    manifest.config()["width_noise_sd"] = config.width_noise_sd;
    manifest.config()["loss_model"] = std::string(synth::to_token(config.loss_model));
    manifest.config()["seed"] = config.seed;
    manifest.config()["segments"] = config.num_segments;
    manifest.config()["spread"] = config.proposal_spread;
    manifest.config()["rng"] = "splitmix64-counter";

    const synth::SynthData data = synth::generate(config);
    std::string proposals;
    for (const auto& c : data.cases) proposals += io::format_proposal_line(c) + "\n";
    std::string gt;
    for (const auto& g : data.ground_truth) gt += io::format_ground_truth_line(g) + "\n";

    guard.write(options.out_proposals, proposals);
    guard.write(options.out_ground_truth, gt);
    manifest.output("proposals", options.out_proposals, proposals);
    manifest.output("ground_truth", options.out_ground_truth, gt);
    guard.write(manifest_path(options.out_proposals), manifest.dump());
    out << fmt::format("{} queries (seed {}) -> {}, {}\n", data.cases.size(), config.seed,
                       options.out_proposals.string(), options.out_ground_truth.string());
  });
}

int run_render(const RenderOptions& options, std::ostream& out, std::ostream& err) {
  OutputGuard guard;
  return guarded(err, guard, [&] {
    require_output(options.out, "--out");
    const MaskShape shape = parse_mask_shape(options.shape);

    Manifest manifest("render");
    manifest.config()["query_id"] = options.query_id;
    manifest.config()["shape"] = std::string(to_token(shape));
    manifest.config()["proposal"] = options.proposal;
    manifest.input("proposals", options.proposals);

    const auto cases = io::read_proposals(options.proposals);
    const QueryCase* query = nullptr;
    for (const auto& c : cases) {
      if (c.query_id() == options.query_id) {
        query = &c;
        break;
      }
    }
    if (query == nullptr) {
      throw ValidationError("query '" + options.query_id + "' not found in " +
                            options.proposals.string());
    }
    if (options.proposal < 1 || options.proposal > query->proposals().size()) {
      throw ValidationError(fmt::format("query {} has {} proposals, requested proposal {}",
                                        query->query_id(), query->proposals().size(),
                                        options.proposal));
    }
    const auto curve = render_proposal_curve(query->proposals()[options.proposal - 1],
                                             query->num_segments(), shape);
    std::string body = "segment,position,value\n";
    const double denom = static_cast<double>(curve.size() - 1);
    for (std::size_t t = 0; t < curve.size(); ++t) {
      body += fmt::format("{},{},{}\n", t, static_cast<double>(t) / denom, curve[t]);
    }
    guard.write(options.out, body);
    manifest.output("curve", options.out, body);
    guard.write(manifest_path(options.out), manifest.dump());
    out << fmt::format("{} segments of {} proposal {} ({}) -> {}\n", curve.size(),
                       query->query_id(), options.proposal, to_token(shape), options.out.string());
  });
}

}  // namespace gmprop::cli
