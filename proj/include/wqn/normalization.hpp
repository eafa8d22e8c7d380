#pragma once

#include <vector>

#include <Eigen/Core>

#include "wqn/signal.hpp"
#include "wqn/wavelet.hpp"

namespace wqn {

/// Empirical distribution of coefficient amplitudes |c| at one scale.
///
/// Two readings of the same sample are exposed. operator() is the counting
/// CDF, (1/N) #{n : |c_n| < x}. position() is the continuous version used for
/// transport: the i-th smallest amplitude sits at plotting position
/// (i - 0.5) / N, values between order statistics are linearly interpolated,
/// tied amplitudes take the mean position of their run, and positions clamp
/// to [0.5 / N, 1 - 0.5 / N] outside the sample range.
class EmpiricalAmplitudeCDF {
 public:
  explicit EmpiricalAmplitudeCDF(const Eigen::Ref<const Vector>& coefficients);

  double operator()(double x) const;
  double position(double amplitude) const;
  /// Generalized inverse of position(): interpolates the order statistics and
  /// clamps to [min, max] amplitude.
  double quantile(double p) const;

  /// Fractional 0-based rank of `amplitude`; equals position() * N - 0.5.
  double rank(double amplitude) const;
  /// Amplitude at fractional 0-based rank `r` (clamped to [0, N - 1]).
  double at_rank(double r) const;

  const Vector& sorted_amplitudes() const { return sorted_; }
  Index count() const { return sorted_.size(); }

 private:
  Vector sorted_;
};

/// Monotone amplitude map T(x) = F_ref^-1(F_art(x)) for one scale.
class TransportMap {
 public:
  TransportMap(EmpiricalAmplitudeCDF source, EmpiricalAmplitudeCDF target, int scale_index)
      : source_(std::move(source)), target_(std::move(target)), scale_(scale_index) {}

  double operator()(double amplitude) const;

  const EmpiricalAmplitudeCDF& source() const { return source_; }
  const EmpiricalAmplitudeCDF& target() const { return target_; }
  int scale_index() const { return scale_; }

 private:
  EmpiricalAmplitudeCDF source_;
  EmpiricalAmplitudeCDF target_;
  int scale_;
};

EmpiricalAmplitudeCDF empirical_cdf(const Eigen::Ref<const Vector>& coefficients);

double transport(double amplitude, const TransportMap& map);

struct NormalizeOptions {
  /// min(|c|, T(|c|)). Disabling it gives the pure transport and is only
  /// meant for testing distribution matching.
  bool clamp = true;
};

struct LevelNormalization {
  Vector coefficients;
  TransportMap map;
  Index attenuated = 0;
};

/// c -> sgn(c) * min(|c|, T(|c|)) with T built from the two coefficient sets.
LevelNormalization normalize_coefficients(const Eigen::Ref<const Vector>& artifact,
                                          const Eigen::Ref<const Vector>& reference,
                                          int scale_index = 1, NormalizeOptions options = {});

/// Per-scale introspection of one correction.
struct ScaleReport {
  int scale = 0;
  TransportMap map;
  Index total = 0;
  Index attenuated = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  /// Amplitude quantiles at `kReportLevels` before and after correction.
  Vector pre_quantiles;
  Vector post_quantiles;

  double attenuation_ratio() const {
    return energy_before > 0.0 ? energy_after / energy_before : 1.0;
  }
};

inline const Vector& report_quantile_levels() {
  static const Vector levels = (Vector(7) << 0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99).finished();
  return levels;
}

struct CorrectionReport {
  std::vector<ScaleReport> scales;
};

struct EpochCorrection {
  Vector signal;
  CorrectionReport report;
};

/// Decompose both epochs, normalize every detail level and the approximation
/// against the reference statistics, reconstruct.
EpochCorrection correct_epoch(const Eigen::Ref<const Vector>& artifact_epoch,
                              const Eigen::Ref<const Vector>& reference_epoch,
                              const WaveletSpec& wavelet, int levels,
                              BoundaryMode boundary = BoundaryMode::Symmetric,
                              NormalizeOptions options = {});

/// Coefficient-domain variant: normalizes `artifact` scale by scale against
/// `reference` (same level count; array lengths may differ).
WaveletDecomposition normalize_decomposition(const WaveletDecomposition& artifact,
                                             const WaveletDecomposition& reference,
                                             CorrectionReport* report = nullptr,
                                             NormalizeOptions options = {});

}  // namespace wqn
