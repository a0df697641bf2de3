// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Batch commands behind the gmprop executable. Each returns the process exit
// status: 0 success, 1 I/O failure, 2 input validation failure. On failure no
// partial output file is left behind.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmprop/io.hpp"
#include "gmprop/synth.hpp"

namespace gmprop::cli {

namespace fs = std::filesystem;

inline constexpr std::string_view kToolName = "gmprop";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitValidation = 2 };

struct GroundTruthSource {
  fs::path path;
  std::string format = "native";
  /// Required for the charades format.
  std::optional<fs::path> durations;
};

struct InferOptions {
  fs::path proposals;
  std::string boundary = "shortest-tail";
  std::string selector = "iou-loss-max";
  double gamma = 1.0;
  fs::path out;
  unsigned threads = 0;
};

struct EvaluateOptions {
  fs::path predictions;
  GroundTruthSource ground_truth;
  std::vector<double> thresholds = {0.3, 0.5, 0.7};
  std::string mode = "strict";
  fs::path out;
  std::string format = "csv";
};

struct AblateOptions {
  fs::path proposals;
  GroundTruthSource ground_truth;
  /// Empty means every strategy, in table order.
  std::vector<std::string> boundaries;
  std::vector<std::string> selectors;
  double gamma = 1.0;
  std::vector<double> thresholds = {0.3, 0.5, 0.7};
  std::string mode = "strict";
  fs::path out;
  std::string format = "markdown";
  unsigned threads = 0;
};

struct SynthOptions {
  synth::SynthConfig config;
  std::string loss_model = "one-minus-iou";
  fs::path out_proposals;
  fs::path out_ground_truth;
};

struct RenderOptions {
  fs::path proposals;
  std::string query_id;
  std::string shape = "gaussian";
  /// 1-based proposal index within the query.
  std::size_t proposal = 1;
  fs::path out;
};

int run_infer(const InferOptions& options, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int run_ablate(const AblateOptions& options, std::ostream& out, std::ostream& err);
int run_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);
int run_render(const RenderOptions& options, std::ostream& out, std::ostream& err);

/// Path of the provenance manifest written next to `output`.
fs::path manifest_path(const fs::path& output);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Loads ground truth in any supported format, forwarding repair warnings to `err`.
std::vector<GroundTruthAnnotation> load_ground_truth(const GroundTruthSource& source,
                                                     std::ostream& err);

}  // namespace gmprop::cli
