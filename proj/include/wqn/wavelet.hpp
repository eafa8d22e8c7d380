#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wqn/signal.hpp"

namespace wqn {

enum class WaveletFamily { Daubechies, Symlet };

/// Boundary extension used by the decimated transform.
///
/// Symmetric is half-sample reflection (x[-1] = x[0]) and produces
/// floor((n + L - 1) / 2) coefficients per level. Periodic wraps the signal
/// (odd lengths are padded by repeating the last sample) and produces
/// ceil(n / 2) coefficients, which makes the transform orthogonal.
enum class BoundaryMode { Symmetric, Periodic };

std::string_view to_string(BoundaryMode mode);
BoundaryMode boundary_from_string(std::string_view name);

/// Orthogonal wavelet filter bank. Taps are hard-coded constants checked
/// against the orthogonality identities on construction.
class WaveletSpec {
 public:
  static WaveletSpec daubechies(int vanishing_moments);
  static WaveletSpec symlet(int vanishing_moments);
  /// Accepts "db2".."db10" and "sym2".."sym10".
  static WaveletSpec from_name(std::string_view name);

  WaveletFamily family() const { return family_; }
  int vanishing_moments() const { return order_; }
  std::string name() const;
  int filter_length() const { return static_cast<int>(dec_lo_.size()); }

  const std::vector<double>& dec_lo() const { return dec_lo_; }
  const std::vector<double>& dec_hi() const { return dec_hi_; }
  const std::vector<double>& rec_lo() const { return rec_lo_; }
  const std::vector<double>& rec_hi() const { return rec_hi_; }

  friend bool operator==(const WaveletSpec& a, const WaveletSpec& b) {
    return a.family_ == b.family_ && a.order_ == b.order_;
  }

 private:
  WaveletSpec(WaveletFamily family, int order, std::vector<double> dec_lo);

  WaveletFamily family_;
  int order_;
  std::vector<double> dec_lo_, dec_hi_, rec_lo_, rec_hi_;
};

/// Largest deviation of the filter bank from the perfect-reconstruction
/// identities (unit norm, double-shift orthogonality, sum = sqrt(2), QMF).
double orthogonality_defect(const WaveletSpec& wavelet);

/// Coefficient count produced by one analysis step on `n` samples.
Index coefficient_length(Index n, int filter_length, BoundaryMode mode);

/// Input length of every level, from the original length down to the
/// approximation: entry m is the length of the level-m array (entry 0 = n).
std::vector<Index> level_lengths(Index n, int filter_length, int levels, BoundaryMode mode);

/// Largest level count whose coarsest array keeps at least one filter length
/// of coefficients, capped at `cap`. Returns 0 when not even one level fits.
int default_levels(Index n, const WaveletSpec& wavelet, BoundaryMode mode = BoundaryMode::Symmetric,
                   int cap = 5);

/// M detail arrays (details[0] is the finest scale m = 1) plus the final
/// approximation (scale m = M + 1).
template <typename Scalar>
struct Decomposition {
  std::vector<VectorX<Scalar>> details;
  VectorX<Scalar> approximation;
  WaveletSpec wavelet;
  BoundaryMode boundary = BoundaryMode::Symmetric;
  Index original_length = 0;

  int levels() const { return static_cast<int>(details.size()); }
  /// Number of coefficient arrays, M + 1.
  int scales() const { return levels() + 1; }

  /// Scale index m in 1..M+1; m = M + 1 is the approximation.
  VectorX<Scalar>& scale(int m) { return m == levels() + 1 ? approximation : details.at(m - 1); }
  const VectorX<Scalar>& scale(int m) const {
    return m == levels() + 1 ? approximation : details.at(m - 1);
  }

  Index total_coefficients() const {
    Index n = approximation.size();
    for (const auto& d : details) n += d.size();
    return n;
  }
  bool same_structure(const Decomposition& other) const;
};

using WaveletDecomposition = Decomposition<double>;

namespace detail {

void check_decompose_args(Index n, const WaveletSpec& wavelet, int levels, BoundaryMode mode);
[[noreturn]] void throw_non_finite();
[[noreturn]] void throw_inconsistent(const std::string& what);

inline Index reflect(Index i, Index n) {
  const Index period = 2 * n;
  Index r = i % period;
  if (r < 0) r += period;
  return r < n ? r : period - 1 - r;
}

inline Index wrap(Index i, Index n) {
  Index r = i % n;
  return r < 0 ? r + n : r;
}

template <typename Scalar>
void analysis_step(const VectorX<Scalar>& x, const WaveletSpec& w, BoundaryMode mode,
                   VectorX<Scalar>& approx, VectorX<Scalar>& detail) {
  const auto& lo = w.dec_lo();
  const auto& hi = w.dec_hi();
  const Index taps = w.filter_length();
  const Index n = x.size();
  if (mode == BoundaryMode::Symmetric) {
    const Index out = coefficient_length(n, static_cast<int>(taps), mode);
    approx.setZero(out);
    detail.setZero(out);
    for (Index k = 0; k < out; ++k) {
      Scalar a(0), d(0);
      for (Index j = 0; j < taps; ++j) {
        const Scalar v = x[reflect(2 * k + 1 - j, n)];
        a += Scalar(lo[j]) * v;
        d += Scalar(hi[j]) * v;
      }
      approx[k] = a;
      detail[k] = d;
    }
    return;
  }
  const Index padded = n + (n % 2);
  const Index out = padded / 2;
  approx.setZero(out);
  detail.setZero(out);
  for (Index k = 0; k < out; ++k) {
    Scalar a(0), d(0);
    for (Index j = 0; j < taps; ++j) {
      const Index i = wrap(2 * k + 1 - j, padded);
      const Scalar v = i < n ? x[i] : x[n - 1];
      a += Scalar(lo[j]) * v;
      d += Scalar(hi[j]) * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

template <typename Scalar>
VectorX<Scalar> synthesis_step(const VectorX<Scalar>& approx, const VectorX<Scalar>& detail,
                               const WaveletSpec& w, BoundaryMode mode, Index target_length) {
  const Index taps = w.filter_length();
  const Index nc = approx.size();
  VectorX<Scalar> x = VectorX<Scalar>::Zero(target_length);
  if (mode == BoundaryMode::Symmetric) {
    // Inner part of the upsampled convolution with the reconstruction filters.
    const auto& lo = w.rec_lo();
    const auto& hi = w.rec_hi();
    for (Index i = 0; i < target_length; ++i) {
      Scalar acc(0);
      const Index kmin = i / 2;
      const Index kmax = std::min<Index>(nc - 1, (i + taps - 2) / 2);
      for (Index k = kmin; k <= kmax; ++k) {
        const Index t = i + taps - 2 - 2 * k;
        acc += Scalar(lo[t]) * approx[k] + Scalar(hi[t]) * detail[k];
      }
      x[i] = acc;
    }
    return x;
  }
  // Periodic analysis is an orthogonal operator; synthesis is its transpose.
  const auto& lo = w.dec_lo();
  const auto& hi = w.dec_hi();
  const Index padded = 2 * nc;
  VectorX<Scalar> full = VectorX<Scalar>::Zero(padded);
  for (Index k = 0; k < nc; ++k) {
    for (Index j = 0; j < taps; ++j) {
      full[wrap(2 * k + 1 - j, padded)] += Scalar(lo[j]) * approx[k] + Scalar(hi[j]) * detail[k];
    }
  }
  x = full.head(target_length);
  return x;
}

}  // namespace detail

template <typename Scalar>
bool Decomposition<Scalar>::same_structure(const Decomposition& other) const {
  if (levels() != other.levels() || !(wavelet == other.wavelet) || boundary != other.boundary ||
      original_length != other.original_length) {
    return false;
  }
  for (int m = 1; m <= scales(); ++m) {
    if (scale(m).size() != other.scale(m).size()) return false;
  }
  return true;
}

/// M-level decimated discrete wavelet transform.
template <typename Derived>
Decomposition<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& signal,
                                                  const WaveletSpec& wavelet, int levels,
                                                  BoundaryMode mode = BoundaryMode::Symmetric) {
  using Scalar = typename Derived::Scalar;
  detail::check_decompose_args(signal.size(), wavelet, levels, mode);
  if (!signal.allFinite()) detail::throw_non_finite();

  Decomposition<Scalar> out{{}, {}, wavelet, mode, signal.size()};
  out.details.resize(levels);
  VectorX<Scalar> current = signal.derived();
  VectorX<Scalar> approx;
  for (int m = 0; m < levels; ++m) {
    detail::analysis_step(current, wavelet, mode, approx, out.details[m]);
    current.swap(approx);
  }
  out.approximation = std::move(current);
  return out;
}

/// Inverse transform; the result has `original_length` samples.
template <typename Scalar>
VectorX<Scalar> reconstruct(const Decomposition<Scalar>& dec) {
  const int levels = dec.levels();
  if (levels < 1) detail::throw_inconsistent("decomposition has no levels");
  const auto lengths =
      level_lengths(dec.original_length, dec.wavelet.filter_length(), levels, dec.boundary);
  if (dec.approximation.size() != lengths[levels]) {
    detail::throw_inconsistent("approximation length");
  }
  VectorX<Scalar> current = dec.approximation;
  for (int m = levels; m >= 1; --m) {
    if (dec.details[m - 1].size() != lengths[m]) {
      detail::throw_inconsistent("detail length at level " + std::to_string(m));
    }
    current = detail::synthesis_step(current, dec.details[m - 1], dec.wavelet, dec.boundary,
                                     lengths[m - 1]);
  }
  return current;
}

}  // namespace wqn
