// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/boundary.hpp"

#include <algorithm>
#include <string>

#include "gmprop/error.hpp"

namespace gmprop {

std::string_view to_token(BoundaryStrategy strategy) {
  switch (strategy) {
    case BoundaryStrategy::kLongTail:
      return "long-tail";
    case BoundaryStrategy::kShortTail:
      return "short-tail";
    case BoundaryStrategy::kShortestTail:
      return "shortest-tail";
    case BoundaryStrategy::kAverage:
      return "average";
    case BoundaryStrategy::kAttention:
      return "attention";
  }
  return "long-tail";
}

std::string_view display_name(BoundaryStrategy strategy) {
  switch (strategy) {
    case BoundaryStrategy::kLongTail:
      return "Long Tail";
    case BoundaryStrategy::kShortTail:
      return "Short Tail";
    case BoundaryStrategy::kShortestTail:
      return "Shortest Tail";
    case BoundaryStrategy::kAverage:
      return "Average";
    case BoundaryStrategy::kAttention:
      return "Attention";
  }
  return "Long Tail";
}

BoundaryStrategy parse_boundary_strategy(std::string_view token) {
  for (BoundaryStrategy s : kAllBoundaryStrategies) {
    if (to_token(s) == token) return s;
  }
  throw ValidationError("unknown boundary strategy '" + std::string(token) +
                        "' (valid: long-tail, short-tail, shortest-tail, average, attention)");
}

std::size_t central_mask_index(std::size_t num_masks) { return (num_masks + 1) / 2; }

namespace {

// Means and convex combinations are pinned to [min, max] of their inputs so
// rounding can never push them outside the long-tail span.
double mean(const std::vector<double>& sorted) {
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return std::clamp(sum / static_cast<double>(sorted.size()), sorted.front(), sorted.back());
}

double pool(const std::vector<double>& values, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::clamp(sum, *lo, *hi);
}

}  // namespace

BoundaryOutcome predict_boundary(const EndpointVectors& endpoints, std::span<const double> attention,
                                 BoundaryStrategy strategy) {
  const std::size_t m = endpoints.left_sorted.size();
  if (m == 0 || endpoints.right_sorted.size() != m || endpoints.left_raw.size() != m ||
      endpoints.right_raw.size() != m) {
    throw ValidationError("endpoint vectors are empty or of unequal length");
  }
  if (attention.size() != m) {
    throw ValidationError("attention has " + std::to_string(attention.size()) +
                          " weights for " + std::to_string(m) + " endpoints");
  }
  const auto& l = endpoints.left_sorted;
  const auto& r = endpoints.right_sorted;

  double start = 0.0;
  double end = 0.0;
  switch (strategy) {
    case BoundaryStrategy::kLongTail:
      start = l.front();
      end = r.back();
      break;
    case BoundaryStrategy::kShortTail:
      if (m == 1) {
        start = l.front();
        end = r.back();
      } else {
        start = l[1];
        end = r[m - 2];
      }
      break;
    case BoundaryStrategy::kShortestTail: {
      const std::size_t k = central_mask_index(m) - 1;
      start = l[k];
      end = r[k];
      break;
    }
    case BoundaryStrategy::kAverage:
      start = mean(l);
      end = mean(r);
      break;
    case BoundaryStrategy::kAttention:
      start = pool(endpoints.left_raw, attention);
      end = pool(endpoints.right_raw, attention);
      break;
  }

  start = std::max(start, 0.0);
  end = std::min(end, 1.0);
  bool degenerate = false;
  if (start > end) {
    std::swap(start, end);
    degenerate = true;
  }
  return BoundaryOutcome{TemporalSpan::Normalized(start, end), degenerate};
}

BoundaryOutcome predict_boundary(const MixtureProposal& proposal, BoundaryStrategy strategy,
                                 double gamma) {
  return predict_boundary(compute_endpoints(proposal, gamma), proposal.attention(), strategy);
}

}  // namespace gmprop
