// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmprop/error.hpp"

namespace gmprop {

std::string_view to_token(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::kIou:
      return "iou";
    case SelectionStrategy::kLoss:
      return "loss";
    case SelectionStrategy::kIouLossSum:
      return "iou-loss-sum";
    case SelectionStrategy::kIouLossMax:
      return "iou-loss-max";
  }
  return "iou";
}

std::string_view display_name(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::kIou:
      return "IoU";
    case SelectionStrategy::kLoss:
      return "Loss";
    case SelectionStrategy::kIouLossSum:
      return "IoU+LossSum";
    case SelectionStrategy::kIouLossMax:
      return "IoU+LossMax";
  }
  return "IoU";
}

SelectionStrategy parse_selection_strategy(std::string_view token) {
  for (SelectionStrategy s : kAllSelectionStrategies) {
    if (to_token(s) == token) return s;
  }
  throw ValidationError("unknown selection strategy '" + std::string(token) +
                        "' (valid: iou, loss, iou-loss-sum, iou-loss-max)");
}

IouMatrix pairwise_iou_matrix(std::span<const TemporalSpan> spans) {
  IouMatrix matrix(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    matrix(i, i) = temporal_iou(spans[i], spans[i]);
    for (std::size_t j = i + 1; j < spans.size(); ++j) {
      const double v = temporal_iou(spans[i], spans[j]);
      matrix(i, j) = v;
      matrix(j, i) = v;
    }
  }
  return matrix;
}

std::vector<double> loss_sum_weights(std::span<const double> losses) {
  double total = 0.0;
  for (double l : losses) total += l;
  if (total <= 0.0) return {};
  std::vector<double> w;
  w.reserve(losses.size());
  for (double l : losses) w.push_back(1.0 - l / total);
  return w;
}

std::vector<double> loss_max_weights(std::span<const double> losses) {
  const double peak = losses.empty() ? 0.0 : *std::max_element(losses.begin(), losses.end());
  if (peak <= 0.0) return {};
  std::vector<double> w;
  w.reserve(losses.size());
  for (double l : losses) w.push_back(1.0 - l / peak);
  return w;
}

namespace {

// First index holding the maximum; tie set when another index matches it.
void pick_max(SelectionResult& result) {
  const auto& s = result.scores;
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  result.winner_index = best + 1;
  result.tie = std::count(s.begin(), s.end(), s[best]) > 1;
}

}  // namespace

SelectionResult select_top1(std::span<const TemporalSpan> spans, std::span<const double> losses,
                            SelectionStrategy strategy) {
  if (spans.empty()) {
    throw ValidationError("selection needs at least one span");
  }
  if (losses.size() != spans.size()) {
    throw ValidationError("got " + std::to_string(losses.size()) + " losses for " +
                          std::to_string(spans.size()) + " spans");
  }
  for (double l : losses) {
    if (!std::isfinite(l) || l < 0.0) {
      throw ValidationError("losses must be finite and >= 0");
    }
  }
  const std::size_t n = spans.size();
  SelectionResult result;

  if (strategy == SelectionStrategy::kLoss) {
    // Ranked on the raw losses; the reported scores are divided by the largest
    // loss so they do not depend on the loss scale.
    const double peak = *std::max_element(losses.begin(), losses.end());
    result.scores.reserve(n);
    for (double l : losses) result.scores.push_back(peak > 0.0 ? -(l / peak) : 0.0);
    std::vector<double> negated(n);
    for (std::size_t i = 0; i < n; ++i) negated[i] = -losses[i];
    SelectionResult ranked;
    ranked.scores = std::move(negated);
    pick_max(ranked);
    result.winner_index = ranked.winner_index;
    result.tie = ranked.tie;
    return result;
  }

  const IouMatrix iou = pairwise_iou_matrix(spans);
  std::vector<double> votes(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) votes[i] += iou(i, j);
    }
  }

  std::vector<double> weights;
  if (strategy == SelectionStrategy::kIouLossSum) {
    weights = loss_sum_weights(losses);
  } else if (strategy == SelectionStrategy::kIouLossMax) {
    weights = loss_max_weights(losses);
  }
  if (strategy != SelectionStrategy::kIou) {
    // A zero denominator or an all-zero weight vector carries no ranking
    // information; plain IoU voting decides instead.
    result.fallback = std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
    if (result.fallback) weights.clear();
  }

  result.scores = std::move(votes);
  if (!weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) result.scores[i] *= weights[i];
  }
  pick_max(result);
  return result;
}

}  // namespace gmprop
