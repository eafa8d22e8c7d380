#pragma once

#include <cmath>
#include <vector>

#include "wqn/signal.hpp"
#include "wqn/wavelet.hpp"

namespace wqn {

// Artifact-removal thresholding: unlike classical denoising these keep the
// small coefficients and suppress (hard) or clip (soft) the large ones.

enum class ThresholdMethod { Hard, Soft };

/// Per-scale thresholds, index 0 for scale m = 1 through index M for the
/// approximation.
struct ThresholdSpec {
  ThresholdMethod method = ThresholdMethod::Soft;
  Vector per_scale;
};

struct OracleContext {
  const WaveletDecomposition& clean;
};

/// w if |w| < theta, else 0.
inline double apply_hard(double w, double theta) { return std::abs(w) < theta ? w : 0.0; }

/// sgn(w) min(|w|, theta).
inline double apply_soft(double w, double theta) {
  const double m = std::min(std::abs(w), theta);
  return w < 0.0 ? -m : (w > 0.0 ? m : 0.0);
}

inline double apply_threshold(double w, double theta, ThresholdMethod method) {
  return method == ThresholdMethod::Hard ? apply_hard(w, theta) : apply_soft(w, theta);
}

Vector apply_threshold(const Eigen::Ref<const Vector>& coefficients, double theta,
                       ThresholdMethod method);

/// sum_n (lambda_theta(y_n) - x_n)^2.
double threshold_objective(const Eigen::Ref<const Vector>& artifacted,
                           const Eigen::Ref<const Vector>& clean, double theta,
                           ThresholdMethod method);

struct ThresholdChoice {
  double theta = 0.0;
  double objective = 0.0;
};

/// Exact minimizer of threshold_objective over theta >= 0. Ties go to the
/// largest threshold (the least modification).
ThresholdChoice ideal_threshold(const Eigen::Ref<const Vector>& artifacted,
                                const Eigen::Ref<const Vector>& clean, ThresholdMethod method);

ThresholdSpec ideal_thresholds(const WaveletDecomposition& artifacted, const OracleContext& oracle,
                               ThresholdMethod method);

/// theta_m = sigma_m sqrt(2 ln N), applied with soft thresholding.
ThresholdSpec universal_thresholds(const Eigen::Ref<const Vector>& sigma, Index signal_length);

/// Stein unbiased estimate of the squared error of the clipped coefficients
/// sgn(w) min(|w|, theta) with respect to the Gaussian N(0, sigma^2) component:
/// N sigma^2 - 2 sigma^2 #{|w| <= theta} + sum min(|w|, theta)^2.
double sure_risk(const Eigen::Ref<const Vector>& coefficients, double sigma, double theta);

/// Hybrid SureShrink rule for one scale. When the energy test finds the scale
/// sparse the universal threshold for the scale's own coefficient count is
/// used; otherwise the SURE minimizer over [0, universal].
double sure_threshold(const Eigen::Ref<const Vector>& coefficients, double sigma);

ThresholdSpec sure_thresholds(const std::vector<Vector>& per_scale_coefficients,
                              const Eigen::Ref<const Vector>& sigma);

/// Convenience overload over a decomposition, scale order m = 1..M+1.
ThresholdSpec sure_thresholds(const WaveletDecomposition& artifacted,
                              const Eigen::Ref<const Vector>& sigma);

/// Keep the approximation, zero every detail array.
WaveletDecomposition lowpass_baseline(const WaveletDecomposition& decomposition);

WaveletDecomposition apply_thresholds(const WaveletDecomposition& decomposition,
                                      const ThresholdSpec& spec);

/// Population standard deviation of each scale, m = 1..M+1.
Vector coefficient_std(const WaveletDecomposition& decomposition);

/// Robust per-scale noise level, median(|c|) / 0.6745.
Vector coefficient_mad_sigma(const WaveletDecomposition& decomposition);

/// A threshold that leaves the given coefficients untouched by either rule.
double pass_through_threshold(const Eigen::Ref<const Vector>& coefficients);

}  // namespace wqn
