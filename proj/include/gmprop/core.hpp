// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gmprop {

/// Tolerance on the attention simplex sum accepted by MixtureProposal.
inline constexpr double kAttentionSumTolerance = 1e-6;

/// One mask of a mixture proposal: normalized center in [0,1] and width > 0.
class GaussianMask {
 public:
  GaussianMask(double center, double width);

  double center() const { return center_; }
  double width() const { return width_; }

  bool operator==(const GaussianMask&) const = default;

 private:
  double center_;
  double width_;
};

/// A candidate moment: masks in generation order, their attention weights and
/// the reconstruction loss the proposal achieved on the query.
class MixtureProposal {
 public:
  MixtureProposal(std::vector<GaussianMask> masks, std::vector<double> attention,
                  double recon_loss);

  const std::vector<GaussianMask>& masks() const { return masks_; }
  const std::vector<double>& attention() const { return attention_; }
  double recon_loss() const { return recon_loss_; }
  std::size_t size() const { return masks_.size(); }

  bool operator==(const MixtureProposal&) const = default;

 private:
  std::vector<GaussianMask> masks_;
  std::vector<double> attention_;
  double recon_loss_;
};

/// One video-query pair with its N proposals.
class QueryCase {
 public:
  QueryCase(std::string query_id, std::string video_id, double duration_sec, int num_segments,
            std::vector<MixtureProposal> proposals);

  const std::string& query_id() const { return query_id_; }
  const std::string& video_id() const { return video_id_; }
  double duration_sec() const { return duration_sec_; }
  int num_segments() const { return num_segments_; }
  const std::vector<MixtureProposal>& proposals() const { return proposals_; }

  bool operator==(const QueryCase&) const = default;

 private:
  std::string query_id_;
  std::string video_id_;
  double duration_sec_;
  int num_segments_;
  std::vector<MixtureProposal> proposals_;
};

enum class SpanUnit { kNormalized, kSeconds };

/// A closed interval [start, end]. Normalized spans live inside [0, 1].
class TemporalSpan {
 public:
  static TemporalSpan Normalized(double start, double end);
  static TemporalSpan Seconds(double start, double end);

  double start() const { return start_; }
  double end() const { return end_; }
  double length() const { return end_ - start_; }
  SpanUnit unit() const { return unit_; }

  bool operator==(const TemporalSpan&) const = default;

 private:
  TemporalSpan(double start, double end, SpanUnit unit);

  double start_;
  double end_;
  SpanUnit unit_;
};

/// Left/right mask endpoints, both in mask order and sorted ascending.
struct EndpointVectors {
  std::vector<double> left_sorted;
  std::vector<double> right_sorted;
  std::vector<double> left_raw;
  std::vector<double> right_raw;
};

enum class MaskShape { kGaussian, kLaplace, kInverseGaussian };

std::string_view to_token(MaskShape shape);
MaskShape parse_mask_shape(std::string_view token);

/// Endpoints c -/+ gamma * w / 2 for every mask. Not clamped; gamma in (0, 1].
EndpointVectors compute_endpoints(const MixtureProposal& proposal, double gamma = 1.0);

/// Value of a single mask at normalized position x.
double mask_value(const GaussianMask& mask, double x, MaskShape shape);

/// Attention-weighted mixture curve sampled at t / (T - 1), t = 0..T-1.
std::vector<double> render_proposal_curve(const MixtureProposal& proposal, int num_segments,
                                          MaskShape shape);

TemporalSpan rescale_span(const TemporalSpan& span, double duration_sec);

/// Temporal IoU. Two identical zero-length spans score 1; any other pairing
/// with an empty union scores 0.
double temporal_iou(const TemporalSpan& a, const TemporalSpan& b);

}  // namespace gmprop
