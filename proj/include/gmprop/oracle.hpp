// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Brute-force reference implementations used only by the test suites. They
// transcribe the selection and boundary formulas literally, with naive loops
// and no shared helpers from the production path.

#include <vector>

#include "gmprop/boundary.hpp"
#include "gmprop/core.hpp"
#include "gmprop/selection.hpp"

namespace gmprop::oracle {

double interval_iou(double s1, double e1, double s2, double e2);

SelectionResult oracle_vote(const std::vector<TemporalSpan>& spans,
                            const std::vector<double>& losses, SelectionStrategy strategy);

/// Normalized (start, end, degenerate) for one proposal.
struct OracleBoundary {
  double start;
  double end;
  bool degenerate;
};

OracleBoundary oracle_boundary(const MixtureProposal& proposal, BoundaryStrategy strategy,
                               double gamma = 1.0);

}  // namespace gmprop::oracle
