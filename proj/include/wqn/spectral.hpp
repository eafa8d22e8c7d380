#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "wqn/signal.hpp"

namespace wqn {

struct WelchConfig {
  /// 0 picks default_segment_length().
  Index segment_length = 0;
  double overlap = 0.5;
};

/// length / 8 rounded to the nearest power of two, at least 8.
Index default_segment_length(Index signal_length);

/// One-sided power spectral density, Hann window, constant detrend.
struct PSDEstimate {
  Vector frequencies;
  Vector power;
  double sampling_rate = 1.0;
  Index segment_length = 0;
  Index overlap_samples = 0;
  Index segments = 0;
  std::string window = "hann";
};

PSDEstimate psd(const Signal& signal, const WelchConfig& config = {});

struct FitBand {
  double low = 0.0;
  double high = 0.0;
};

/// [4 fs / segment, fs / 4].
FitBand default_fit_band(const PSDEstimate& estimate);

struct PowerLawFit {
  double alpha = 0.0;
  double hurst = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitBand band;
  Index bins = 0;
};

/// Least-squares line through (log f, log P) on the band; alpha is minus the
/// slope and H = (alpha - 1) / 2.
PowerLawFit hurst_from_psd(const PSDEstimate& estimate, std::optional<FitBand> band = {});

struct SpectrogramEstimate {
  /// Frame centres in seconds.
  Vector times;
  Vector frequencies;
  /// times x frequencies, one-sided density.
  Eigen::MatrixXd power;
  double window_seconds = 0.0;
  double overlap = 0.0;
  Index window_samples = 0;
  Index hop_samples = 0;
  std::string window = "hann";
};

SpectrogramEstimate spectrogram(const Signal& signal, double window_seconds = 4.0,
                                double overlap = 0.9);

/// 10 log10(max(power, floor)).
Eigen::MatrixXd to_decibels(const Eigen::MatrixXd& power, double floor = 1e-20);

/// Mean power over the frequency columns inside [low, high].
Vector band_power(const SpectrogramEstimate& estimate, double low, double high);

}  // namespace wqn
