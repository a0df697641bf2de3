// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "gmprop/core.hpp"
#include "gmprop/metrics.hpp"

namespace gmprop::synth {

/// Counter-based generator: output k of stream (seed, stream) is
/// splitmix64_mix(key + (k + 1) * 0x9E3779B97F4A7C15) with
/// key = splitmix64_mix(seed ^ splitmix64_mix(stream)). Every draw depends
/// only on (seed, stream, k), so results are identical across platforms and
/// independent of how streams are scheduled.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; no cached second variate.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t x);

enum class LossModel { kOneMinusIou, kUniformRandom, kConstant };

std::string_view to_token(LossModel model);
LossModel parse_loss_model(std::string_view token);

struct SynthConfig {
  int num_queries = 50;
  int n_proposals = 5;
  int masks_per_proposal = 3;
  /// Gaussian noise on every mask center, normalized units.
  double center_noise_sd = 0.0;
  /// Gaussian noise on every mask width, normalized units.
  double width_noise_sd = 0.0;
  LossModel loss_model = LossModel::kOneMinusIou;
  std::uint64_t seed = 42;
  int num_segments = 64;
  /// Shift step between successive non-anchor proposals, normalized units.
  double proposal_spread = 0.05;
  double min_duration_sec = 20.0;
  double max_duration_sec = 120.0;

  /// Throws ParameterRangeError.
  void validate() const;
};

struct SynthData {
  std::vector<QueryCase> cases;
  std::vector<GroundTruthAnnotation> ground_truth;
};

/// Proposal 1 of every query is the anchor: with zero noise its
/// attention-pooled endpoints reproduce the ground-truth span exactly.
/// Proposals 2..N are progressively shifted and rescaled copies.
SynthData generate(const SynthConfig& config);

/// Generates query `index` alone; generate() is this applied to 0..Q-1.
std::pair<QueryCase, GroundTruthAnnotation> generate_query(const SynthConfig& config, int index);

}  // namespace gmprop::synth
