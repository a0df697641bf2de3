// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmprop/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gmprop/error.hpp"

namespace gmprop {

namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

GaussianMask::GaussianMask(double center, double width) : center_(center), width_(width) {
  if (!std::isfinite(center) || center < 0.0 || center > 1.0) {
    throw ValidationError("mask center must lie in [0, 1], got " + describe(center));
  }
  if (!std::isfinite(width) || width <= 0.0) {
    throw ValidationError("mask width must be > 0, got " + describe(width));
  }
}

MixtureProposal::MixtureProposal(std::vector<GaussianMask> masks, std::vector<double> attention,
                                 double recon_loss)
    : masks_(std::move(masks)), attention_(std::move(attention)), recon_loss_(recon_loss) {
  if (masks_.empty()) {
    throw ValidationError("proposal has no masks");
  }
  if (attention_.size() != masks_.size()) {
    throw ValidationError("attention has " + std::to_string(attention_.size()) +
                          " weights for " + std::to_string(masks_.size()) + " masks");
  }
  double sum = 0.0;
  for (double a : attention_) {
    if (!std::isfinite(a) || a < 0.0) {
      throw ValidationError("attention weight must be >= 0, got " + describe(a));
    }
    sum += a;
  }
  if (std::abs(sum - 1.0) > kAttentionSumTolerance) {
    throw ValidationError("attention weights sum to " + describe(sum) + ", expected 1");
  }
  if (!std::isfinite(recon_loss_) || recon_loss_ < 0.0) {
    throw ValidationError("recon_loss must be >= 0, got " + describe(recon_loss_));
  }
}

QueryCase::QueryCase(std::string query_id, std::string video_id, double duration_sec,
                     int num_segments, std::vector<MixtureProposal> proposals)
    : query_id_(std::move(query_id)),
      video_id_(std::move(video_id)),
      duration_sec_(duration_sec),
      num_segments_(num_segments),
      proposals_(std::move(proposals)) {
  if (query_id_.empty()) {
    throw ValidationError("query_id must be non-empty");
  }
  if (!std::isfinite(duration_sec_) || duration_sec_ <= 0.0) {
    throw ValidationError("query " + query_id_ + ": duration_sec must be > 0");
  }
  if (num_segments_ < 1) {
    throw ValidationError("query " + query_id_ + ": num_segments must be >= 1");
  }
  if (proposals_.empty()) {
    throw ValidationError("query " + query_id_ + ": no proposals");
  }
}

TemporalSpan::TemporalSpan(double start, double end, SpanUnit unit)
    : start_(start), end_(end), unit_(unit) {
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw ValidationError("span bounds must be finite");
  }
  if (start > end) {
    throw ValidationError("span start " + describe(start) + " exceeds end " + describe(end));
  }
  if (unit == SpanUnit::kNormalized && (start < 0.0 || end > 1.0)) {
    throw ValidationError("normalized span (" + describe(start) + ", " + describe(end) +
                          ") leaves [0, 1]");
  }
}

TemporalSpan TemporalSpan::Normalized(double start, double end) {
  return TemporalSpan(start, end, SpanUnit::kNormalized);
}

TemporalSpan TemporalSpan::Seconds(double start, double end) {
  return TemporalSpan(start, end, SpanUnit::kSeconds);
}

std::string_view to_token(MaskShape shape) {
  switch (shape) {
    case MaskShape::kGaussian:
      return "gaussian";
    case MaskShape::kLaplace:
      return "laplace";
    case MaskShape::kInverseGaussian:
      return "inverse-gaussian";
  }
  return "gaussian";
}

MaskShape parse_mask_shape(std::string_view token) {
  if (token == "gaussian") return MaskShape::kGaussian;
  if (token == "laplace") return MaskShape::kLaplace;
  if (token == "inverse-gaussian" || token == "inverse_gaussian") {
    return MaskShape::kInverseGaussian;
  }
  throw ValidationError("unknown mask shape '" + std::string(token) +
                        "' (valid: gaussian, laplace, inverse-gaussian)");
}

EndpointVectors compute_endpoints(const MixtureProposal& proposal, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterRangeError("gamma must lie in (0, 1], got " + describe(gamma));
  }
  EndpointVectors out;
  const auto& masks = proposal.masks();
  out.left_raw.reserve(masks.size());
  out.right_raw.reserve(masks.size());
  for (const auto& mask : masks) {
    const double half = gamma * mask.width() / 2.0;
    out.left_raw.push_back(mask.center() - half);
    out.right_raw.push_back(mask.center() + half);
  }
  out.left_sorted = out.left_raw;
  out.right_sorted = out.right_raw;
  std::sort(out.left_sorted.begin(), out.left_sorted.end());
  std::sort(out.right_sorted.begin(), out.right_sorted.end());
  return out;
}

double mask_value(const GaussianMask& mask, double x, MaskShape shape) {
  const double d = x - mask.center();
  // sigma equals the mask width, so the endpoints c -/+ w/2 sit half a sigma out.
  const double sigma = mask.width();
  switch (shape) {
    case MaskShape::kGaussian:
      return std::exp(-(d * d) / (2.0 * sigma * sigma));
    case MaskShape::kLaplace:
      return std::exp(-std::abs(d) / mask.width());
    case MaskShape::kInverseGaussian:
      return 1.0 - std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  return 0.0;
}

std::vector<double> render_proposal_curve(const MixtureProposal& proposal, int num_segments,
                                          MaskShape shape) {
  if (num_segments < 2) {
    throw ParameterRangeError("num_segments must be >= 2 to render a curve, got " +
                              std::to_string(num_segments));
  }
  // Inverse masks are the complement of the Gaussian mixture, so both curves
  // always sum to one segment by segment.
  const MaskShape base = shape == MaskShape::kLaplace ? MaskShape::kLaplace : MaskShape::kGaussian;
  std::vector<double> curve(static_cast<std::size_t>(num_segments), 0.0);
  const double denom = static_cast<double>(num_segments - 1);
  const auto& masks = proposal.masks();
  const auto& attention = proposal.attention();
  for (std::size_t t = 0; t < curve.size(); ++t) {
    const double x = static_cast<double>(t) / denom;
    double value = 0.0;
    for (std::size_t m = 0; m < masks.size(); ++m) {
      value += attention[m] * mask_value(masks[m], x, base);
    }
    value = std::clamp(value, 0.0, 1.0);
    curve[t] = shape == MaskShape::kInverseGaussian ? 1.0 - value : value;
  }
  return curve;
}

TemporalSpan rescale_span(const TemporalSpan& span, double duration_sec) {
  if (span.unit() != SpanUnit::kNormalized) {
    throw ValidationError("rescale_span expects a normalized span");
  }
  if (!std::isfinite(duration_sec) || duration_sec <= 0.0) {
    throw ValidationError("duration must be > 0, got " + describe(duration_sec));
  }
  return TemporalSpan::Seconds(span.start() * duration_sec, span.end() * duration_sec);
}

double temporal_iou(const TemporalSpan& a, const TemporalSpan& b) {
  if (a.unit() != b.unit()) {
    throw ValidationError("cannot compare spans in different units");
  }
  const double inter = std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
  const double uni = a.length() + b.length() - inter;
  if (uni <= 0.0) {
    return (a.start() == b.start() && a.end() == b.end()) ? 1.0 : 0.0;
  }
  return inter / uni;
}

}  // namespace gmprop
