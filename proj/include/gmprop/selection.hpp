// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "gmprop/core.hpp"

namespace gmprop {

enum class SelectionStrategy { kIou, kLoss, kIouLossSum, kIouLossMax };

/// Declared in the column order of the published ablation table.
inline constexpr std::array<SelectionStrategy, 4> kAllSelectionStrategies = {
    SelectionStrategy::kIou, SelectionStrategy::kLoss, SelectionStrategy::kIouLossMax,
    SelectionStrategy::kIouLossSum};

std::string_view to_token(SelectionStrategy strategy);
std::string_view display_name(SelectionStrategy strategy);
SelectionStrategy parse_selection_strategy(std::string_view token);

/// Dense symmetric N x N matrix of pairwise temporal IoUs.
class IouMatrix {
 public:
  explicit IouMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

IouMatrix pairwise_iou_matrix(std::span<const TemporalSpan> spans);

struct SelectionResult {
  /// 1-based index of the selected proposal.
  std::size_t winner_index = 1;
  /// Vote totals, weighted votes, or -L / max(L) for the loss strategy.
  std::vector<double> scores;
  /// More than one proposal reached the extremal score; the lowest index won.
  bool tie = false;
  /// Loss weights were undefined or all zero (e.g. all losses equal under the
  /// max rule) and plain IoU voting was used.
  bool fallback = false;
};

/// Loss-derived vote weights 1 - L / sum(L) and 1 - L / max(L). Empty when the
/// denominator is zero.
std::vector<double> loss_sum_weights(std::span<const double> losses);
std::vector<double> loss_max_weights(std::span<const double> losses);

/// Picks one proposal out of N. Vote strategies sum each proposal's IoU with
/// the other N - 1 spans and scale that total by the proposal's own weight.
SelectionResult select_top1(std::span<const TemporalSpan> spans, std::span<const double> losses,
                            SelectionStrategy strategy);

}  // namespace gmprop
