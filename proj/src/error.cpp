// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/error.hpp"

#include <algorithm>

namespace gmprop {

namespace {

std::string summarize(const std::vector<std::string>& missing_gt,
                      const std::vector<std::string>& missing_pred) {
  std::string msg = "predictions and ground truth do not match:";
  if (!missing_gt.empty()) {
    msg += " " + std::to_string(missing_gt.size()) + " prediction(s) without ground truth";
  }
  if (!missing_pred.empty()) {
    if (!missing_gt.empty()) msg += ",";
    msg += " " + std::to_string(missing_pred.size()) + " ground-truth quer(ies) without prediction";
  }
  return msg;
}

}  // namespace

UnmatchedQueriesError::UnmatchedQueriesError(std::vector<std::string> missing_ground_truth,
                                             std::vector<std::string> missing_predictions)
    : ValidationError(summarize(missing_ground_truth, missing_predictions)),
      missing_ground_truth_(std::move(missing_ground_truth)),
      missing_predictions_(std::move(missing_predictions)) {}

std::vector<std::string> UnmatchedQueriesError::offenders(std::size_t limit) const {
  std::vector<std::string> all = missing_ground_truth_;
  all.insert(all.end(), missing_predictions_.begin(), missing_predictions_.end());
  std::sort(all.begin(), all.end());
  if (all.size() > limit) all.resize(limit);
  return all;
}

}  // namespace gmprop
