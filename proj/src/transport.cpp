#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wqn/normalization.hpp"

namespace wqn {

EmpiricalAmplitudeCDF::EmpiricalAmplitudeCDF(const Eigen::Ref<const Vector>& coefficients) {
  if (coefficients.size() == 0) {
    throw std::invalid_argument("empirical_cdf: empty coefficient array");
  }
  if (!coefficients.allFinite()) {
    throw std::invalid_argument("empirical_cdf: non-finite coefficient");
  }
  sorted_ = coefficients.cwiseAbs();
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalAmplitudeCDF::operator()(double x) const {
  const auto below = std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

double EmpiricalAmplitudeCDF::rank(double amplitude) const {
  const Index n = sorted_.size();
  const Index lo = std::lower_bound(sorted_.begin(), sorted_.end(), amplitude) - sorted_.begin();
  const Index hi = std::upper_bound(sorted_.begin(), sorted_.end(), amplitude) - sorted_.begin();
  if (lo < hi) return 0.5 * static_cast<double>(lo + hi - 1);
  if (lo == 0) return 0.0;
  if (lo == n) return static_cast<double>(n - 1);
  const double left = sorted_[lo - 1];
  const double right = sorted_[lo];
  return static_cast<double>(lo - 1) + (amplitude - left) / (right - left);
}

double EmpiricalAmplitudeCDF::at_rank(double r) const {
  const Index n = sorted_.size();
  if (!(r > 0.0)) return sorted_[0];
  if (r >= static_cast<double>(n - 1)) return sorted_[n - 1];
  const auto j = static_cast<Index>(std::floor(r));
  const double frac = r - static_cast<double>(j);
  if (frac == 0.0) return sorted_[j];
  return sorted_[j] + frac * (sorted_[j + 1] - sorted_[j]);
}

double EmpiricalAmplitudeCDF::position(double amplitude) const {
  return (rank(amplitude) + 0.5) / static_cast<double>(sorted_.size());
}

double EmpiricalAmplitudeCDF::quantile(double p) const {
  return at_rank(p * static_cast<double>(sorted_.size()) - 0.5);
}

double TransportMap::operator()(double amplitude) const {
  // Composed in rank space so that equal-size samples map order statistics
  // onto order statistics without rounding.
  const double n_src = static_cast<double>(source_.count());
  const double n_dst = static_cast<double>(target_.count());
  const double r = source_.rank(amplitude);
  const double t = ((r + 0.5) * n_dst) / n_src - 0.5;
  return target_.at_rank(t);
}

EmpiricalAmplitudeCDF empirical_cdf(const Eigen::Ref<const Vector>& coefficients) {
  return EmpiricalAmplitudeCDF(coefficients);
}

double transport(double amplitude, const TransportMap& map) { return map(amplitude); }

LevelNormalization normalize_coefficients(const Eigen::Ref<const Vector>& artifact,
                                          const Eigen::Ref<const Vector>& reference,
                                          int scale_index, NormalizeOptions options) {
  if (reference.size() == 0) {
    throw std::invalid_argument("normalize_coefficients: empty reference coefficients");
  }
  if (artifact.size() == 0) {
    throw std::invalid_argument("normalize_coefficients: empty artifact coefficients");
  }
  TransportMap map(EmpiricalAmplitudeCDF(artifact), EmpiricalAmplitudeCDF(reference), scale_index);
  Vector out(artifact.size());
  Index attenuated = 0;
  for (Index i = 0; i < artifact.size(); ++i) {
    const double c = artifact[i];
    const double magnitude = std::abs(c);
    const double mapped = map(magnitude);
    const double target = options.clamp ? std::min(magnitude, mapped) : mapped;
    if (target < magnitude) ++attenuated;
    out[i] = c < 0.0 ? -target : (c > 0.0 ? target : (options.clamp ? 0.0 : target));
  }
  return {std::move(out), std::move(map), attenuated};
}

namespace {

Vector amplitude_quantiles(const Eigen::Ref<const Vector>& coefficients) {
  const EmpiricalAmplitudeCDF cdf(coefficients);
  const Vector& levels = report_quantile_levels();
  Vector q(levels.size());
  for (Index i = 0; i < levels.size(); ++i) q[i] = cdf.quantile(levels[i]);
  return q;
}

}  // namespace

WaveletDecomposition normalize_decomposition(const WaveletDecomposition& artifact,
                                             const WaveletDecomposition& reference,
                                             CorrectionReport* report, NormalizeOptions options) {
  if (artifact.levels() != reference.levels()) {
    throw std::invalid_argument("normalize_decomposition: level counts differ");
  }
  WaveletDecomposition out = artifact;
  if (report) report->scales.clear();
  for (int m = 1; m <= artifact.scales(); ++m) {
    auto level = normalize_coefficients(artifact.scale(m), reference.scale(m), m, options);
    if (report) {
      ScaleReport s{m, level.map, artifact.scale(m).size(), level.attenuated,
                    artifact.scale(m).squaredNorm(), level.coefficients.squaredNorm(),
                    amplitude_quantiles(artifact.scale(m)), amplitude_quantiles(level.coefficients)};
      report->scales.push_back(std::move(s));
    }
    out.scale(m) = std::move(level.coefficients);
  }
  return out;
}

EpochCorrection correct_epoch(const Eigen::Ref<const Vector>& artifact_epoch,
                              const Eigen::Ref<const Vector>& reference_epoch,
                              const WaveletSpec& wavelet, int levels, BoundaryMode boundary,
                              NormalizeOptions options) {
  const Vector artifact = artifact_epoch;
  const Vector reference = reference_epoch;
  const auto art = decompose(artifact, wavelet, levels, boundary);
  const auto ref = decompose(reference, wavelet, levels, boundary);
  EpochCorrection result{Vector(), CorrectionReport{}};
  const auto corrected = normalize_decomposition(art, ref, &result.report, options);
  result.signal = reconstruct(corrected);
  return result;
}

}  // namespace wqn
