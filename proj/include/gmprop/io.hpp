// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmprop/core.hpp"
#include "gmprop/metrics.hpp"

namespace gmprop::io {

namespace fs = std::filesystem;

/// Parsed items plus the repairs applied while reading them.
template <typename T>
struct Ingested {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

/// One line of a predictions file.
struct PredictionRecord {
  std::string query_id;
  TemporalSpan span_sec = TemporalSpan::Seconds(0.0, 0.0);
  BoundaryStrategy boundary = BoundaryStrategy::kLongTail;
  SelectionStrategy selector = SelectionStrategy::kIou;
  std::size_t winner_index = 1;
  double score = 0.0;

  bool operator==(const PredictionRecord&) const = default;
};

enum class ReportFormat { kCsv, kMarkdown };
ReportFormat parse_report_format(std::string_view token);

enum class GroundTruthFormat { kNative, kCharades, kActivityNet };
GroundTruthFormat parse_ground_truth_format(std::string_view token);

// Proposals: one JSON object per line,
//   {"query_id", "video_id", "duration_sec", "num_segments",
//    "proposals": [{"centers", "widths", "attention", "recon_loss"}]}
// Attention whose sum is within 1e-4 of one is renormalized; anything further
// off is rejected.
inline constexpr double kAttentionRenormTolerance = 1e-4;

QueryCase parse_proposal_line(std::string_view line, std::size_t line_number);
std::string format_proposal_line(const QueryCase& query);
std::vector<QueryCase> read_proposals(const fs::path& path);
void write_proposals(std::span<const QueryCase> cases, const fs::path& path);

// Native ground truth: one JSON object per line,
//   {"query_id", "video_id", "duration_sec", "start_sec", "end_sec", "sentence"}
GroundTruthAnnotation parse_ground_truth_line(std::string_view line, std::size_t line_number,
                                              std::vector<std::string>& warnings);
std::string format_ground_truth_line(const GroundTruthAnnotation& gt);
Ingested<GroundTruthAnnotation> read_ground_truth(const fs::path& path);
void write_ground_truth(std::span<const GroundTruthAnnotation> annotations, const fs::path& path);

/// Video durations table: "<video_id> <seconds>" or "<video_id>,<seconds>" per
/// line. A non-numeric first line is treated as a header.
std::map<std::string, double> read_video_durations(const fs::path& path);

/// Charades-STA lines "<video_id> <start> <end>##<sentence>". query_id is
/// "<video_id>#<k>" with k the 0-based running index within the video.
Ingested<GroundTruthAnnotation> parse_charades(std::string_view text,
                                               const std::map<std::string, double>& durations);
Ingested<GroundTruthAnnotation> read_charades_annotations(
    const fs::path& path, const std::map<std::string, double>& durations);

/// ActivityNet Captions document {video_id: {duration, timestamps, sentences}}.
/// Videos keep file order; query_id is "<video_id>#<timestamp index>".
Ingested<GroundTruthAnnotation> parse_activitynet(std::string_view text);
Ingested<GroundTruthAnnotation> read_activitynet_annotations(const fs::path& path);

// Predictions: one JSON object per line, sorted by query_id on write,
//   {"query_id", "start_sec", "end_sec", "boundary", "selector", "winner_index", "score"}
PredictionRecord parse_prediction_line(std::string_view line, std::size_t line_number);
std::string format_prediction_line(const PredictionRecord& record);
std::vector<PredictionRecord> read_predictions(const fs::path& path);
/// All records, one per line, sorted by query_id.
std::string format_predictions(std::vector<PredictionRecord> records);
void write_predictions(std::vector<PredictionRecord> records, const fs::path& path);

std::string format_report(const AblationReport& report, ReportFormat format);
std::string format_eval_report(const EvalReport& report, ReportFormat format);
void write_report(const AblationReport& report, const fs::path& path, ReportFormat format);

/// Column label for a threshold, e.g. "IoU@0.5".
std::string threshold_label(double threshold);

/// Reads a whole file; throws IoError.
std::string read_file(const fs::path& path);
/// Writes through a sibling temporary and renames it into place, so a failed
/// write never leaves a partial file at `path`. Throws IoError.
void write_file_atomic(const fs::path& path, std::string_view content);

}  // namespace gmprop::io
