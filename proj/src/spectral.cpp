#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wqn/spectral.hpp"

namespace wqn {

namespace {

// Periodic Hann window.
Vector hann(Index n) {
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

// One-sided density periodogram of one detrended, windowed segment.
class Periodogram {
 public:
  Periodogram(Index n, double rate) : n_(n), window_(hann(n)), buffer_(n) {
    scale_ = 1.0 / (rate * window_.squaredNorm());
  }

  Index bins() const { return n_ / 2 + 1; }

  void accumulate(const Eigen::Ref<const Vector>& segment, Eigen::Ref<Vector> out) {
    const double mean = segment.mean();
    for (Index i = 0; i < n_; ++i) buffer_[i] = (segment[i] - mean) * window_[i];
    fft_.fwd(spectrum_, buffer_);
    for (Index k = 0; k < bins(); ++k) {
      double p = std::norm(spectrum_[k]) * scale_;
      if (k != 0 && !(n_ % 2 == 0 && k == n_ / 2)) p *= 2.0;
      out[k] += p;
    }
  }

 private:
  Index n_;
  Vector window_;
  std::vector<double> buffer_;
  std::vector<std::complex<double>> spectrum_;
  Eigen::FFT<double> fft_;
  double scale_ = 1.0;
};

}  // namespace

Index default_segment_length(Index signal_length) {
  const double target = static_cast<double>(signal_length) / 8.0;
  if (target <= 8.0) return 8;
  return Index{1} << static_cast<int>(std::lround(std::log2(target)));
}

PSDEstimate psd(const Signal& signal, const WelchConfig& config) {
  validate(signal);
  const Index n = signal.size();
  const Index seg = config.segment_length > 0 ? config.segment_length : default_segment_length(n);
  if (!(config.overlap >= 0.0 && config.overlap < 1.0)) {
    throw std::invalid_argument("psd: overlap must be in [0, 1)");
  }
  if (n < seg) {
    throw std::invalid_argument("psd: signal of " + std::to_string(n) +
                                " samples is shorter than the segment (" + std::to_string(seg) + ")");
  }
  const Index overlap = static_cast<Index>(std::floor(config.overlap * static_cast<double>(seg)));
  const Index step = seg - overlap;
  const Index count = (n - seg) / step + 1;

  Periodogram periodogram(seg, signal.sampling_rate);
  PSDEstimate out;
  out.power = Vector::Zero(periodogram.bins());
  for (Index s = 0; s < count; ++s) {
    periodogram.accumulate(signal.samples.segment(s * step, seg), out.power);
  }
  out.power /= static_cast<double>(count);
  out.frequencies = Vector::LinSpaced(periodogram.bins(), 0.0,
                                      static_cast<double>(periodogram.bins() - 1)) *
                    (signal.sampling_rate / static_cast<double>(seg));
  out.sampling_rate = signal.sampling_rate;
  out.segment_length = seg;
  out.overlap_samples = overlap;
  out.segments = count;
  return out;
}

FitBand default_fit_band(const PSDEstimate& estimate) {
  return {4.0 * estimate.sampling_rate / static_cast<double>(estimate.segment_length),
          estimate.sampling_rate / 4.0};
}

PowerLawFit hurst_from_psd(const PSDEstimate& estimate, std::optional<FitBand> band) {
  const FitBand b = band.value_or(default_fit_band(estimate));
  if (!(b.high > b.low) || !(b.low > 0.0)) {
    throw std::invalid_argument("hurst_from_psd: empty or nonpositive fit band");
  }
  const double slack = 1e-9 * b.high;
  std::vector<double> lx;
  std::vector<double> ly;
  for (Index k = 0; k < estimate.frequencies.size(); ++k) {
    const double f = estimate.frequencies[k];
    if (f < b.low - slack || f > b.high + slack) continue;
    if (!(estimate.power[k] > 0.0)) {
      throw std::invalid_argument("hurst_from_psd: nonpositive power at " + std::to_string(f) + " Hz");
    }
    lx.push_back(std::log(f));
    ly.push_back(std::log(estimate.power[k]));
  }
  if (lx.size() < 8) {
    throw std::invalid_argument("hurst_from_psd: " + std::to_string(lx.size()) +
                                " bins in the fit band, need at least 8");
  }
  const Eigen::Map<const Vector> x(lx.data(), static_cast<Index>(lx.size()));
  const Eigen::Map<const Vector> y(ly.data(), static_cast<Index>(ly.size()));
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double slope = xc.dot(yc) / xc.squaredNorm();
  const double residual = (yc - slope * xc).squaredNorm();
  const double total = yc.squaredNorm();

  PowerLawFit fit;
  fit.alpha = -slope;
  fit.hurst = (fit.alpha - 1.0) / 2.0;
  fit.intercept = y.mean() - slope * x.mean();
  fit.r_squared = total > 0.0 ? 1.0 - residual / total : 1.0;
  fit.band = b;
  fit.bins = x.size();
  return fit;
}

SpectrogramEstimate spectrogram(const Signal& signal, double window_seconds, double overlap) {
  validate(signal);
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw std::invalid_argument("spectrogram: overlap must be in [0, 1)");
  }
  const Index win = static_cast<Index>(std::llround(window_seconds * signal.sampling_rate));
  if (win < 2) throw std::invalid_argument("spectrogram: window shorter than two samples");
  if (win > signal.size()) {
    throw std::invalid_argument("spectrogram: window of " + std::to_string(win) +
                                " samples is longer than the signal (" +
                                std::to_string(signal.size()) + ")");
  }
  const Index hop = std::max<Index>(1, std::llround(static_cast<double>(win) * (1.0 - overlap)));
  const Index frames = (signal.size() - win) / hop + 1;

  Periodogram periodogram(win, signal.sampling_rate);
  SpectrogramEstimate out;
  out.power = Eigen::MatrixXd::Zero(frames, periodogram.bins());
  out.times.resize(frames);
  Vector row(periodogram.bins());
  for (Index t = 0; t < frames; ++t) {
    row.setZero();
    periodogram.accumulate(signal.samples.segment(t * hop, win), row);
    out.power.row(t) = row.transpose();
    out.times[t] = (static_cast<double>(t * hop) + 0.5 * static_cast<double>(win)) / signal.sampling_rate;
  }
  out.frequencies = Vector::LinSpaced(periodogram.bins(), 0.0,
                                      static_cast<double>(periodogram.bins() - 1)) *
                    (signal.sampling_rate / static_cast<double>(win));
  out.window_seconds = window_seconds;
  out.overlap = overlap;
  out.window_samples = win;
  out.hop_samples = hop;
  return out;
}

Eigen::MatrixXd to_decibels(const Eigen::MatrixXd& power, double floor) {
  return power.unaryExpr([floor](double p) { return 10.0 * std::log10(std::max(p, floor)); });
}

Vector band_power(const SpectrogramEstimate& estimate, double low, double high) {
  Vector out = Vector::Zero(estimate.times.size());
  Index bins = 0;
  for (Index k = 0; k < estimate.frequencies.size(); ++k) {
    if (estimate.frequencies[k] < low || estimate.frequencies[k] > high) continue;
    out += estimate.power.col(k);
    ++bins;
  }
  if (bins == 0) throw std::invalid_argument("band_power: no frequency bins inside the band");
  return out / static_cast<double>(bins);
}

}  // namespace wqn
