#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/SpecialFunctions>

#include "wqn/metrics.hpp"

namespace wqn {

namespace {

struct ProfileSums {
  double s = 0.0;     // sum |x|^beta
  double slog = 0.0;  // sum |x|^beta ln|x|
};

ProfileSums profile_sums(const Vector& amp, const Vector& log_amp, double beta) {
  ProfileSums out;
  for (Index i = 0; i < amp.size(); ++i) {
    if (amp[i] == 0.0) continue;
    const double p = std::exp(beta * log_amp[i]);
    out.s += p;
    out.slog += p * log_amp[i];
  }
  return out;
}

double profile_alpha(double n, double beta, const ProfileSums& sums) {
  return std::pow(beta * sums.s / n, 1.0 / beta);
}

// d loglik / d beta with alpha at its optimum for this beta.
double profile_score(double n, const Vector& amp, const Vector& log_amp, double beta) {
  const ProfileSums sums = profile_sums(amp, log_amp, beta);
  const double g = 1.0 + Eigen::numext::digamma(1.0 / beta) / beta +
                   std::log(beta * sums.s / n) / beta - sums.slog / sums.s;
  return n * g / beta;
}

double kurtosis_of_shape(double beta) {
  return std::exp(std::lgamma(5.0 / beta) + std::lgamma(1.0 / beta) - 2.0 * std::lgamma(3.0 / beta));
}

}  // namespace

double GGDFit::density(double x) const {
  return beta / (2.0 * alpha * std::tgamma(1.0 / beta)) * std::exp(-std::pow(std::abs(x) / alpha, beta));
}

double ggd_log_likelihood(const Eigen::Ref<const Vector>& samples, double alpha, double beta) {
  const double n = static_cast<double>(samples.size());
  double tail = 0.0;
  for (double x : samples) tail += std::pow(std::abs(x) / alpha, beta);
  return n * (std::log(beta) - std::log(2.0 * alpha) - std::lgamma(1.0 / beta)) - tail;
}

double ggd_moment_shape(const Eigen::Ref<const Vector>& samples, const GGDFitOptions& options) {
  const double m2 = samples.squaredNorm() / static_cast<double>(samples.size());
  const double m4 = samples.array().square().square().mean();
  const double kurt = m4 / (m2 * m2);
  // Kurtosis decreases in beta.
  double lo = options.beta_min;
  double hi = options.beta_max;
  if (kurt >= kurtosis_of_shape(lo)) return lo;
  if (kurt <= kurtosis_of_shape(hi)) return hi;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kurtosis_of_shape(mid) > kurt) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

GGDFit fit_generalized_gaussian(const Eigen::Ref<const Vector>& samples, const GGDFitOptions& options) {
  if (samples.size() < 16) {
    throw std::invalid_argument("fit_generalized_gaussian: need at least 16 samples, got " +
                                std::to_string(samples.size()));
  }
  if (!samples.allFinite()) throw std::invalid_argument("fit_generalized_gaussian: non-finite sample");
  if (samples.maxCoeff() == samples.minCoeff()) {
    throw std::invalid_argument("fit_generalized_gaussian: degenerate sample (all values equal)");
  }
  const double n = static_cast<double>(samples.size());
  const Vector amp = samples.cwiseAbs();
  const Vector log_amp = amp.unaryExpr([](double a) { return a > 0.0 ? std::log(a) : 0.0; });
  auto score = [&](double beta) { return profile_score(n, amp, log_amp, beta); };

  // Bracket the root around the moment estimate, growing geometrically.
  const double start = ggd_moment_shape(samples, options);
  double lo = start;
  double hi = start;
  double f_lo = score(lo);
  double f_hi = f_lo;
  for (int i = 0; i < 60 && !(f_lo > 0.0 && f_hi < 0.0); ++i) {
    if (f_lo <= 0.0) {
      if (lo <= options.beta_min) break;
      lo = std::max(options.beta_min, lo / 1.5);
      f_lo = score(lo);
    }
    if (f_hi >= 0.0) {
      if (hi >= options.beta_max) break;
      hi = std::min(options.beta_max, hi * 1.5);
      f_hi = score(hi);
    }
  }
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw std::runtime_error("fit_generalized_gaussian: no likelihood maximum for beta in [" +
                             std::to_string(options.beta_min) + ", " +
                             std::to_string(options.beta_max) + "]");
  }

  double beta = std::clamp(start, lo, hi);
  double f = score(beta);
  int it = 0;
  for (; it < options.max_iterations && std::abs(f) > options.gradient_tolerance; ++it) {
    if (f > 0.0) {
      lo = beta;
    } else {
      hi = beta;
    }
    const double h = 1e-6 * beta;
    const double slope = (score(beta + h) - score(beta - h)) / (2.0 * h);
    double next = beta - f / slope;
    if (!(slope < 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == beta || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * beta) break;
    beta = next;
    f = score(beta);
  }
  if (std::abs(f) > options.gradient_tolerance &&
      hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * beta) {
    throw std::runtime_error("fit_generalized_gaussian: no convergence after " +
                             std::to_string(options.max_iterations) + " iterations");
  }
  GGDFit fit;
  fit.beta = beta;
  fit.alpha = profile_alpha(n, beta, profile_sums(amp, log_amp, beta));
  fit.loglik = ggd_log_likelihood(samples, fit.alpha, beta);
  fit.gradient = f;
  fit.iterations = it;
  return fit;
}

}  // namespace wqn
