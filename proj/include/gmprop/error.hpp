// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gmprop {

/// Input or parameter violates a documented contract. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Parameter outside its admissible range (gamma, thresholds, noise levels).
class ParameterRangeError : public ValidationError {
 public:
  explicit ParameterRangeError(const std::string& what) : ValidationError(what) {}
};

/// File could not be opened, read or written. Maps to CLI exit code 1.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Predictions and ground truth do not pair up one-to-one.
class UnmatchedQueriesError : public ValidationError {
 public:
  UnmatchedQueriesError(std::vector<std::string> missing_ground_truth,
                        std::vector<std::string> missing_predictions);

  const std::vector<std::string>& missing_ground_truth() const { return missing_ground_truth_; }
  const std::vector<std::string>& missing_predictions() const { return missing_predictions_; }

  /// Offending query ids from both sides, sorted, at most `limit` of them.
  std::vector<std::string> offenders(std::size_t limit) const;

 private:
  std::vector<std::string> missing_ground_truth_;
  std::vector<std::string> missing_predictions_;
};

}  // namespace gmprop
