// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "gmprop/error.hpp"

namespace gmprop::oracle {

double interval_iou(double s1, double e1, double s2, double e2) {
  double lo = s1 > s2 ? s1 : s2;
  double hi = e1 < e2 ? e1 : e2;
  double inter = hi - lo;
  if (inter < 0.0) inter = 0.0;
  const double uni = (e1 - s1) + (e2 - s2) - inter;
  if (uni <= 0.0) return (s1 == s2 && e1 == e2) ? 1.0 : 0.0;
  return inter / uni;
}

SelectionResult oracle_vote(const std::vector<TemporalSpan>& spans,
                            const std::vector<double>& losses, SelectionStrategy strategy) {
  const std::size_t n = spans.size();
  if (n == 0 || losses.size() != n) throw ValidationError("oracle: bad input sizes");
  for (std::size_t i = 0; i < n; ++i) {
    if (losses[i] < 0.0) throw ValidationError("oracle: negative loss");
  }

  SelectionResult result;
  result.scores.assign(n, 0.0);

  if (strategy == SelectionStrategy::kLoss) {
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) largest = std::max(largest, losses[i]);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      result.scores[i] = largest > 0.0 ? -losses[i] / largest : 0.0;
      if (losses[i] < losses[best]) best = i;
    }
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (losses[i] == losses[best]) ++count;
    }
    result.winner_index = best + 1;
    result.tie = count > 1;
    return result;
  }

  double total = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += losses[i];
    if (losses[i] > peak) peak = losses[i];
  }

  bool any_weight = false;
  for (std::size_t a = 0; a < n; ++a) {
    double vote = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      vote += interval_iou(spans[a].start(), spans[a].end(), spans[b].start(), spans[b].end());
    }
    double weight = 1.0;
    if (strategy == SelectionStrategy::kIouLossSum && total > 0.0) {
      weight = 1.0 - losses[a] / total;
    } else if (strategy == SelectionStrategy::kIouLossMax && peak > 0.0) {
      weight = 1.0 - losses[a] / peak;
    }
    if (weight != 0.0) any_weight = true;
    result.scores[a] = strategy == SelectionStrategy::kIou ? vote : weight * vote;
  }
  result.fallback = (strategy == SelectionStrategy::kIouLossSum && (total <= 0.0 || !any_weight)) ||
                    (strategy == SelectionStrategy::kIouLossMax && (peak <= 0.0 || !any_weight));
  if (result.fallback) {
    for (std::size_t a = 0; a < n; ++a) {
      double vote = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b) {
          vote += interval_iou(spans[a].start(), spans[a].end(), spans[b].start(), spans[b].end());
        }
      }
      result.scores[a] = vote;
    }
  }

  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    if (result.scores[a] > best_score) {
      best_score = result.scores[a];
      result.winner_index = a + 1;
    }
  }
  int count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (result.scores[a] == best_score) ++count;
  }
  result.tie = count > 1;
  return result;
}

namespace {

// k-th smallest (1-based) by counting ranks, no sort.
double kth_smallest(const std::vector<double>& v, std::size_t k) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t below = 0;
    std::size_t equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++below;
      if (v[j] == v[i]) ++equal;
    }
    if (below < k && k <= below + equal) return v[i];
  }
  throw std::logic_error("kth_smallest: rank out of range");
}

}  // namespace

OracleBoundary oracle_boundary(const MixtureProposal& proposal, BoundaryStrategy strategy,
                               double gamma) {
  const std::size_t m = proposal.size();
  std::vector<double> left(m);
  std::vector<double> right(m);
  for (std::size_t i = 0; i < m; ++i) {
    left[i] = proposal.masks()[i].center() - gamma * proposal.masks()[i].width() / 2.0;
    right[i] = proposal.masks()[i].center() + gamma * proposal.masks()[i].width() / 2.0;
  }
  double s = 0.0;
  double e = 0.0;
  switch (strategy) {
    case BoundaryStrategy::kLongTail:
      s = kth_smallest(left, 1);
      e = kth_smallest(right, m);
      break;
    case BoundaryStrategy::kShortTail:
      s = kth_smallest(left, m == 1 ? 1 : 2);
      e = kth_smallest(right, m == 1 ? 1 : m - 1);
      break;
    case BoundaryStrategy::kShortestTail:
      s = kth_smallest(left, (m + 1) / 2);
      e = kth_smallest(right, (m + 1) / 2);
      break;
    case BoundaryStrategy::kAverage:
      for (std::size_t i = 0; i < m; ++i) {
        s += left[i];
        e += right[i];
      }
      s /= static_cast<double>(m);
      e /= static_cast<double>(m);
      break;
    case BoundaryStrategy::kAttention:
      for (std::size_t i = 0; i < m; ++i) {
        s += proposal.attention()[i] * left[i];
        e += proposal.attention()[i] * right[i];
      }
      break;
  }
  s = s < 0.0 ? 0.0 : s;
  e = e > 1.0 ? 1.0 : e;
  if (s > e) return {e, s, true};
  return {s, e, false};
}

}  // namespace gmprop::oracle
