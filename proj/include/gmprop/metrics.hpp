// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gmprop/boundary.hpp"
#include "gmprop/core.hpp"
#include "gmprop/selection.hpp"

namespace gmprop {

/// Ground-truth moment for one query, in seconds.
struct GroundTruthAnnotation {
  std::string query_id;
  std::string video_id;
  double duration_sec = 0.0;
  TemporalSpan span_sec = TemporalSpan::Seconds(0.0, 0.0);
  std::string sentence;

  bool operator==(const GroundTruthAnnotation&) const = default;
};

enum class ThresholdMode { kStrictGreater, kGreaterEqual };

std::string_view to_token(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view token);

class EvalConfig {
 public:
  /// Thresholds must be strictly ascending and inside (0, 1).
  explicit EvalConfig(std::vector<double> thresholds = {0.3, 0.5, 0.7},
                      ThresholdMode mode = ThresholdMode::kStrictGreater);

  const std::vector<double>& thresholds() const { return thresholds_; }
  ThresholdMode mode() const { return mode_; }
  bool passes(double iou, double threshold) const;

 private:
  std::vector<double> thresholds_;
  ThresholdMode mode_;
};

struct QueryIou {
  std::string query_id;
  double iou = 0.0;
};

struct EvalReport {
  std::vector<double> thresholds;
  /// Recall aligned with `thresholds`.
  std::vector<double> recall_at;
  double mean_iou = 0.0;
  std::size_t num_queries = 0;
  /// Sorted by query_id.
  std::vector<QueryIou> per_query_iou;

  double recall(double threshold) const;
};

struct SpanPrediction {
  std::string query_id;
  TemporalSpan span_sec;
};

/// Scores top-1 predictions against ground truth. Both sides must pair up
/// one-to-one by query_id; otherwise throws UnmatchedQueriesError.
EvalReport evaluate(std::span<const SpanPrediction> predictions,
                    std::span<const GroundTruthAnnotation> ground_truth, const EvalConfig& config);

/// Top-1 output of the inference pipeline for one query.
struct QueryPrediction {
  std::string query_id;
  TemporalSpan span_sec;
  std::size_t winner_index = 1;
  double score = 0.0;
  bool tie = false;
  /// Number of proposals whose boundary needed the swap repair.
  std::size_t degenerate_count = 0;
};

/// endpoints -> boundary per proposal -> top-1 selection -> rescale.
QueryPrediction infer_query(const QueryCase& query, BoundaryStrategy boundary,
                            SelectionStrategy selector, double gamma = 1.0);

/// infer_query over every case. Queries are processed in parallel across
/// `threads` workers (0 = default_thread_count()); output keeps input order.
std::vector<QueryPrediction> infer_all(std::span<const QueryCase> cases, BoundaryStrategy boundary,
                                       SelectionStrategy selector, double gamma = 1.0,
                                       unsigned threads = 0);

struct AblationRow {
  BoundaryStrategy boundary;
  SelectionStrategy selector;
  EvalReport report;
};

struct AblationReport {
  std::vector<double> thresholds;
  double gamma = 1.0;
  /// Cross product in declared order, boundary-major.
  std::vector<AblationRow> rows;
};

AblationReport ablation_grid(std::span<const QueryCase> cases,
                             std::span<const GroundTruthAnnotation> ground_truth,
                             std::span<const BoundaryStrategy> boundaries,
                             std::span<const SelectionStrategy> selectors, double gamma,
                             const EvalConfig& config, unsigned threads = 0);

/// Worker count from GMPROP_THREADS, else hardware concurrency.
unsigned default_thread_count();

}  // namespace gmprop
