// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string_view>

#include "gmprop/core.hpp"

namespace gmprop {

enum class BoundaryStrategy { kLongTail, kShortTail, kShortestTail, kAverage, kAttention };

inline constexpr std::array<BoundaryStrategy, 5> kAllBoundaryStrategies = {
    BoundaryStrategy::kLongTail, BoundaryStrategy::kShortTail, BoundaryStrategy::kShortestTail,
    BoundaryStrategy::kAverage, BoundaryStrategy::kAttention};

/// Stable CLI token, e.g. "shortest-tail".
std::string_view to_token(BoundaryStrategy strategy);
/// Human-readable name used in report tables, e.g. "Shortest Tail".
std::string_view display_name(BoundaryStrategy strategy);
/// Throws ValidationError listing the valid tokens.
BoundaryStrategy parse_boundary_strategy(std::string_view token);

struct BoundaryOutcome {
  TemporalSpan span;
  /// The clamped start exceeded the clamped end and the two were swapped.
  bool degenerate = false;
};

/// 1-based index of the central mask, floor((M + 1) / 2).
std::size_t central_mask_index(std::size_t num_masks);

/// Maps one proposal's endpoints to a normalized span with the given strategy.
///
/// Sorted strategies (long/short/shortest tail, average) read the ascending
/// endpoint vectors. The attention strategy pools the endpoints in mask order
/// so each weight stays paired with its own mask. The start is clamped at 0
/// and the end at 1. Short tail with a single mask falls back to long tail.
BoundaryOutcome predict_boundary(const EndpointVectors& endpoints, std::span<const double> attention,
                                 BoundaryStrategy strategy);

/// compute_endpoints followed by predict_boundary.
BoundaryOutcome predict_boundary(const MixtureProposal& proposal, BoundaryStrategy strategy,
                                 double gamma = 1.0);

}  // namespace gmprop
