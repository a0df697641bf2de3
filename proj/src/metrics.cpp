// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "gmprop/error.hpp"

namespace gmprop {

std::string_view to_token(ThresholdMode mode) {
  return mode == ThresholdMode::kStrictGreater ? "strict" : "inclusive";
}

ThresholdMode parse_threshold_mode(std::string_view token) {
  if (token == "strict" || token == "strict-greater" || token == "gt") {
    return ThresholdMode::kStrictGreater;
  }
  if (token == "inclusive" || token == "greater-equal" || token == "ge") {
    return ThresholdMode::kGreaterEqual;
  }
  throw ValidationError("unknown threshold mode '" + std::string(token) +
                        "' (valid: strict, inclusive)");
}

EvalConfig::EvalConfig(std::vector<double> thresholds, ThresholdMode mode)
    : thresholds_(std::move(thresholds)), mode_(mode) {
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    const double t = thresholds_[i];
    if (!(t > 0.0 && t < 1.0)) {
      throw ParameterRangeError("IoU thresholds must lie in (0, 1), got " + std::to_string(t));
    }
    if (i > 0 && !(t > thresholds_[i - 1])) {
      throw ParameterRangeError("IoU thresholds must be strictly ascending");
    }
  }
}

bool EvalConfig::passes(double iou, double threshold) const {
  return mode_ == ThresholdMode::kStrictGreater ? iou > threshold : iou >= threshold;
}

double EvalReport::recall(double threshold) const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] == threshold) return recall_at[i];
  }
  throw ValidationError("threshold " + std::to_string(threshold) + " not in report");
}

EvalReport evaluate(std::span<const SpanPrediction> predictions,
                    std::span<const GroundTruthAnnotation> ground_truth, const EvalConfig& config) {
  std::map<std::string, const GroundTruthAnnotation*> gt_by_id;
  for (const auto& gt : ground_truth) {
    if (!gt_by_id.emplace(gt.query_id, &gt).second) {
      throw ValidationError("duplicate ground-truth query_id '" + gt.query_id + "'");
    }
  }
  std::map<std::string, const SpanPrediction*> pred_by_id;
  for (const auto& p : predictions) {
    if (!pred_by_id.emplace(p.query_id, &p).second) {
      throw ValidationError("duplicate prediction query_id '" + p.query_id + "'");
    }
  }

  std::vector<std::string> missing_gt;
  std::vector<std::string> missing_pred;
  for (const auto& [id, p] : pred_by_id) {
    if (!gt_by_id.contains(id)) missing_gt.push_back(id);
  }
  for (const auto& [id, gt] : gt_by_id) {
    if (!pred_by_id.contains(id)) missing_pred.push_back(id);
  }
  if (!missing_gt.empty() || !missing_pred.empty()) {
    throw UnmatchedQueriesError(std::move(missing_gt), std::move(missing_pred));
  }

  EvalReport report;
  report.thresholds = config.thresholds();
  report.recall_at.assign(report.thresholds.size(), 0.0);
  report.num_queries = pred_by_id.size();
  report.per_query_iou.reserve(report.num_queries);

  std::vector<std::size_t> hits(report.thresholds.size(), 0);
  double iou_sum = 0.0;
  // std::map iteration gives query_id order, so the report does not depend on
  // the order of the input lists.
  for (const auto& [id, p] : pred_by_id) {
    const double iou = temporal_iou(p->span_sec, gt_by_id.at(id)->span_sec);
    report.per_query_iou.push_back({id, iou});
    iou_sum += iou;
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      if (config.passes(iou, report.thresholds[t])) ++hits[t];
    }
  }
  if (report.num_queries > 0) {
    const double n = static_cast<double>(report.num_queries);
    report.mean_iou = iou_sum / n;
    for (std::size_t t = 0; t < hits.size(); ++t) {
      report.recall_at[t] = static_cast<double>(hits[t]) / n;
    }
  }
  return report;
}

QueryPrediction infer_query(const QueryCase& query, BoundaryStrategy boundary,
                            SelectionStrategy selector, double gamma) {
  try {
    const auto& proposals = query.proposals();
    std::vector<TemporalSpan> spans;
    std::vector<double> losses;
    spans.reserve(proposals.size());
    losses.reserve(proposals.size());
    std::size_t degenerate = 0;
    for (const auto& proposal : proposals) {
      const BoundaryOutcome outcome = predict_boundary(proposal, boundary, gamma);
      if (outcome.degenerate) ++degenerate;
      spans.push_back(outcome.span);
      losses.push_back(proposal.recon_loss());
    }
    const SelectionResult selected = select_top1(spans, losses, selector);
    const std::size_t w = selected.winner_index - 1;
    return QueryPrediction{query.query_id(), rescale_span(spans[w], query.duration_sec()),
                           selected.winner_index, selected.scores[w], selected.tie, degenerate};
  } catch (const ParameterRangeError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError("query " + query.query_id() + ": " + e.what());
  }
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("GMPROP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<QueryPrediction> infer_all(std::span<const QueryCase> cases, BoundaryStrategy boundary,
                                       SelectionStrategy selector, double gamma, unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cases.size())));

  std::vector<std::optional<QueryPrediction>> slots(cases.size());
  std::exception_ptr failure;
  std::size_t failed_at = cases.size();
  std::mutex failure_mutex;

  // Strided partition; every worker writes only its own slots.
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < cases.size(); i += threads) {
      try {
        slots[i] = infer_query(cases[i], boundary, selector, gamma);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        // Report the first failing query in input order, independent of scheduling.
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
        return;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<QueryPrediction> out;
  out.reserve(cases.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

AblationReport ablation_grid(std::span<const QueryCase> cases,
                             std::span<const GroundTruthAnnotation> ground_truth,
                             std::span<const BoundaryStrategy> boundaries,
                             std::span<const SelectionStrategy> selectors, double gamma,
                             const EvalConfig& config, unsigned threads) {
  if (boundaries.empty() || selectors.empty()) {
    throw ValidationError("ablation grid needs at least one boundary and one selector");
  }
  AblationReport report;
  report.thresholds = config.thresholds();
  report.gamma = gamma;
  for (BoundaryStrategy b : boundaries) {
    for (SelectionStrategy s : selectors) {
      const auto predictions = infer_all(cases, b, s, gamma, threads);
      std::vector<SpanPrediction> spans;
      spans.reserve(predictions.size());
      for (const auto& p : predictions) spans.push_back({p.query_id, p.span_sec});
      report.rows.push_back({b, s, evaluate(spans, ground_truth, config)});
    }
  }
  return report;
}

}  // namespace gmprop
