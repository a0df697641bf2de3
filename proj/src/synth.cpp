// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmprop/boundary.hpp"
#include "gmprop/error.hpp"

namespace gmprop::synth {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kMinWidth = 1e-3;

struct RawMask {
  double center;
  double width;
};

MixtureProposal build(const std::vector<RawMask>& raw, std::vector<double> attention, double loss) {
  std::vector<GaussianMask> masks;
  masks.reserve(raw.size());
  for (const auto& m : raw) {
    masks.emplace_back(std::clamp(m.center, 0.0, 1.0), std::max(m.width, kMinWidth));
  }
  return MixtureProposal(std::move(masks), std::move(attention), loss);
}

std::vector<double> normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
  return weights;
}

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64_mix(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view to_token(LossModel model) {
  switch (model) {
    case LossModel::kOneMinusIou:
      return "one-minus-iou";
    case LossModel::kUniformRandom:
      return "uniform-random";
    case LossModel::kConstant:
      return "constant";
  }
  return "one-minus-iou";
}

LossModel parse_loss_model(std::string_view token) {
  if (token == "one-minus-iou" || token == "one_minus_iou") return LossModel::kOneMinusIou;
  if (token == "uniform-random" || token == "uniform_random") return LossModel::kUniformRandom;
  if (token == "constant") return LossModel::kConstant;
  throw ValidationError("unknown loss model '" + std::string(token) +
                        "' (valid: one-minus-iou, uniform-random, constant)");
}

void SynthConfig::validate() const {
  if (num_queries < 0) throw ParameterRangeError("queries must be >= 0");
  if (n_proposals < 1) throw ParameterRangeError("proposals per query must be >= 1");
  if (masks_per_proposal < 1) throw ParameterRangeError("masks per proposal must be >= 1");
  if (!(center_noise_sd >= 0.0) || !std::isfinite(center_noise_sd)) {
    throw ParameterRangeError("center noise sd must be >= 0");
  }
  if (!(width_noise_sd >= 0.0) || !std::isfinite(width_noise_sd)) {
    throw ParameterRangeError("width noise sd must be >= 0");
  }
  if (num_segments < 1) throw ParameterRangeError("segments must be >= 1");
  if (!(proposal_spread >= 0.0) || !std::isfinite(proposal_spread)) {
    throw ParameterRangeError("proposal spread must be >= 0");
  }
  if (!(min_duration_sec > 0.0) || !(max_duration_sec >= min_duration_sec)) {
    throw ParameterRangeError("durations must satisfy 0 < min <= max");
  }
}

std::pair<QueryCase, GroundTruthAnnotation> generate_query(const SynthConfig& config, int index) {
  CounterRng rng(config.seed, static_cast<std::uint64_t>(index));
  const auto m_count = static_cast<std::size_t>(config.masks_per_proposal);

  const double duration = rng.uniform(config.min_duration_sec, config.max_duration_sec);
  const double length = rng.uniform(0.1, 0.6);
  const double start = rng.uniform(0.0, 1.0 - length);
  const double mid = start + length / 2.0;

  // Anchor: weighted mean offset zero and weighted mean width `length`, so the
  // attention-pooled endpoints are (start, start + length). Offsets stay within
  // half the span, which keeps every center inside [0, 1].
  std::vector<double> attention(m_count);
  for (double& a : attention) a = rng.uniform(0.5, 1.5);
  attention = normalized(std::move(attention));
  std::vector<double> scale(m_count);
  std::vector<double> offset(m_count);
  double mean_scale = 0.0;
  double mean_offset = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    scale[m] = rng.uniform(0.5, 1.5);
    offset[m] = rng.uniform(-0.25, 0.25) * length;
    mean_scale += attention[m] * scale[m];
    mean_offset += attention[m] * offset[m];
  }
  std::vector<RawMask> anchor(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    anchor[m] = {mid + offset[m] - mean_offset, length * scale[m] / mean_scale};
  }

  // Ground truth is the clean anchor's pooled span itself, so a noiseless run
  // recovers it bit-for-bit.
  const TemporalSpan gt_norm =
      predict_boundary(build(anchor, attention, 0.0), BoundaryStrategy::kAttention).span;

  std::vector<std::vector<RawMask>> shapes;
  std::vector<std::vector<double>> weights;
  shapes.push_back(anchor);
  weights.push_back(attention);
  for (int k = 1; k < config.n_proposals; ++k) {
    const double step = config.proposal_spread * k;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double shift = sign * step * rng.uniform(0.5, 1.0);
    const double stretch = std::exp(step * rng.uniform(-2.0, 2.0));
    std::vector<RawMask> copy = anchor;
    for (auto& m : copy) {
      m.center += shift + step * rng.uniform(-0.5, 0.5);
      m.width *= stretch;
    }
    std::vector<double> a = attention;
    for (double& w : a) w *= rng.uniform(0.75, 1.25);
    shapes.push_back(std::move(copy));
    weights.push_back(normalized(std::move(a)));
  }
  for (auto& shape : shapes) {
    for (auto& m : shape) {
      if (config.center_noise_sd > 0.0) m.center += config.center_noise_sd * rng.normal();
      if (config.width_noise_sd > 0.0) m.width += config.width_noise_sd * rng.normal();
    }
  }

  std::vector<MixtureProposal> proposals;
  proposals.reserve(shapes.size());
  for (std::size_t n = 0; n < shapes.size(); ++n) {
    double loss = 1.0;
    if (config.loss_model == LossModel::kOneMinusIou) {
      const TemporalSpan pooled =
          predict_boundary(build(shapes[n], weights[n], 0.0), BoundaryStrategy::kAttention).span;
      loss = 1.0 - temporal_iou(pooled, gt_norm);
    } else if (config.loss_model == LossModel::kUniformRandom) {
      loss = rng.uniform();
    }
    proposals.push_back(build(shapes[n], weights[n], loss));
  }

  const std::string query_id = fmt::format("synth-{:05d}", index);
  const std::string video_id = fmt::format("video-{:05d}", index);
  QueryCase query(query_id, video_id, duration, config.num_segments, std::move(proposals));
  GroundTruthAnnotation gt{query_id, video_id, duration, rescale_span(gt_norm, duration),
                           fmt::format("synthetic query {}", index)};
  return {std::move(query), std::move(gt)};
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  SynthData data;
  data.cases.reserve(static_cast<std::size_t>(config.num_queries));
  data.ground_truth.reserve(static_cast<std::size_t>(config.num_queries));
  for (int i = 0; i < config.num_queries; ++i) {
    auto [query, gt] = generate_query(config, i);
    data.cases.push_back(std::move(query));
    data.ground_truth.push_back(std::move(gt));
  }
  return data;
}

}  // namespace gmprop::synth
