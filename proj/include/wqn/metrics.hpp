#pragma once

#include <string>

#include "wqn/signal.hpp"
#include "wqn/wavelet.hpp"

namespace wqn {

/// Mean of squared differences.
double mse(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);
double mse(const Signal& a, const Signal& b);

/// One-dimensional Wasserstein-1 distance between two empirical samples,
/// the integral of |F_p - F_q|. Sizes may differ.
double wasserstein1(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& q);

enum class CoefficientValues { Signed, Absolute };

/// Mean over scales m = 1..M+1 of wasserstein1 between the coefficient sets.
double avg_coefficient_wasserstein(const WaveletDecomposition& restored,
                                   const WaveletDecomposition& original,
                                   CoefficientValues values = CoefficientValues::Signed);

struct Histogram {
  /// bins + 1 increasing edges; the last bin is closed on the right.
  Vector edges;
  Vector counts;
  /// counts / (total * width).
  Vector density;
  Index total = 0;

  Index bins() const { return counts.size(); }
  Vector widths() const { return edges.tail(bins()) - edges.head(bins()); }
  /// Index of the bin holding `value`, -1 outside the edges.
  Index bin_of(double value) const;
};

/// Equal-width bins over [min, max]. A constant sample gets unit-width bins
/// centred on its value.
Histogram histogram(const Eigen::Ref<const Vector>& values, Index bins);
/// Values outside the edges are counted in `total` but in no bin.
Histogram histogram(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& edges);

Histogram coefficient_histogram(const WaveletDecomposition& decomposition, int level, Index bins);
Histogram coefficient_histogram(const WaveletDecomposition& decomposition, int level,
                                const Eigen::Ref<const Vector>& edges);

/// Zero-mean generalized Gaussian beta / (2 alpha Gamma(1/beta)) exp(-(|x|/alpha)^beta).
struct GGDFit {
  double alpha = 0.0;
  double beta = 0.0;
  double loglik = 0.0;
  /// d loglik / d beta at the solution (alpha profiled out).
  double gradient = 0.0;
  int iterations = 0;

  double density(double x) const;
};

struct GGDFitOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  double beta_min = 0.1;
  double beta_max = 10.0;
};

double ggd_log_likelihood(const Eigen::Ref<const Vector>& samples, double alpha, double beta);

/// Shape from the kurtosis Gamma(5/b) Gamma(1/b) / Gamma(3/b)^2, clamped to
/// the search range.
double ggd_moment_shape(const Eigen::Ref<const Vector>& samples, const GGDFitOptions& options = {});

/// Maximum-likelihood fit: alpha in closed form given beta, beta by a
/// safeguarded Newton iteration on the profile score. Throws
/// std::invalid_argument for fewer than 16 samples or a constant sample and
/// std::runtime_error when no root is found.
GGDFit fit_generalized_gaussian(const Eigen::Ref<const Vector>& samples,
                                const GGDFitOptions& options = {});

}  // namespace wqn
