#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wqn/thresholding.hpp"

namespace wqn {

namespace {

std::vector<Index> order_by_amplitude(const Eigen::Ref<const Vector>& y) {
  std::vector<Index> order(y.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(y[a]) < std::abs(y[b]); });
  return order;
}

double sign(double v) { return v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0); }

// Relative slack used when comparing candidate objectives assembled from
// running sums.
bool better(double candidate, double best) {
  return candidate < best - 1e-13 * std::max(1.0, std::abs(best));
}

ThresholdChoice ideal_soft(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& x) {
  const Index n = y.size();
  const auto order = order_by_amplitude(y);
  Vector amp(n);
  for (Index i = 0; i < n; ++i) amp[i] = std::abs(y[order[i]]);

  // Suffix sums over the clipped set {k, ..., n-1} in sorted order.
  Vector b(n + 1), xx(n + 1);
  b[n] = 0.0;
  xx[n] = 0.0;
  for (Index i = n - 1; i >= 0; --i) {
    const Index j = order[i];
    b[i] = b[i + 1] + sign(y[j]) * x[j];
    xx[i] = xx[i + 1] + x[j] * x[j];
  }
  // Objective on the segment where the first k sorted coefficients are kept
  // and the remaining n - k are clipped to theta.
  double kept = 0.0;
  auto segment_value = [&](Index k, double theta) {
    const double clipped = static_cast<double>(n - k);
    return kept + clipped * theta * theta - 2.0 * theta * b[k] + xx[k];
  };

  // Scan from large to small thresholds so exact ties keep the larger one.
  ThresholdChoice best{amp[n - 1], 0.0};
  std::vector<double> prefix(n + 1, 0.0);
  for (Index i = 0; i < n; ++i) {
    const Index j = order[i];
    prefix[i + 1] = prefix[i] + (y[j] - x[j]) * (y[j] - x[j]);
  }
  kept = prefix[n];
  best.objective = kept;
  for (Index k = n - 1; k >= 0; --k) {
    kept = prefix[k];
    const double lo = k == 0 ? 0.0 : amp[k - 1];
    const double hi = amp[k];
    const double vertex = std::clamp(b[k] / static_cast<double>(n - k), lo, hi);
    for (double theta : {hi, vertex, lo}) {
      const double value = segment_value(k, theta);
      if (better(value, best.objective)) best = {theta, value};
    }
  }
  return best;
}

ThresholdChoice ideal_hard(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& x) {
  const Index n = y.size();
  const auto order = order_by_amplitude(y);
  // keep[g]: error of keeping the first g sorted coefficients and zeroing the rest.
  double kept = 0.0;
  double zeroed = x.squaredNorm();
  struct Candidate {
    Index keep;
    double value;
  };
  std::vector<Candidate> candidates{{0, zeroed}};
  for (Index i = 0; i < n; ++i) {
    const Index j = order[i];
    kept += (y[j] - x[j]) * (y[j] - x[j]);
    zeroed -= x[j] * x[j];
    const bool group_end = i + 1 == n || std::abs(y[order[i + 1]]) > std::abs(y[j]);
    if (group_end) candidates.push_back({i + 1, kept + std::max(zeroed, 0.0)});
  }
  Candidate best = candidates.back();
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (better(it->value, best.value)) best = *it;
  }
  double theta = 0.0;
  if (best.keep == n) {
    theta = pass_through_threshold(y);
  } else if (best.keep > 0) {
    theta = std::abs(y[order[best.keep]]);
  }
  return {theta, best.value};
}

void check_pair(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& x) {
  if (y.size() != x.size()) {
    throw std::invalid_argument("ideal_threshold: artifacted and clean scales differ in length");
  }
  if (y.size() == 0) throw std::invalid_argument("ideal_threshold: empty coefficient array");
}

}  // namespace

Vector apply_threshold(const Eigen::Ref<const Vector>& coefficients, double theta,
                       ThresholdMethod method) {
  return coefficients.unaryExpr([&](double w) { return apply_threshold(w, theta, method); });
}

double threshold_objective(const Eigen::Ref<const Vector>& artifacted,
                           const Eigen::Ref<const Vector>& clean, double theta,
                           ThresholdMethod method) {
  check_pair(artifacted, clean);
  return (apply_threshold(artifacted, theta, method) - clean).squaredNorm();
}

ThresholdChoice ideal_threshold(const Eigen::Ref<const Vector>& artifacted,
                                const Eigen::Ref<const Vector>& clean, ThresholdMethod method) {
  check_pair(artifacted, clean);
  ThresholdChoice choice =
      method == ThresholdMethod::Soft ? ideal_soft(artifacted, clean) : ideal_hard(artifacted, clean);
  choice.objective = threshold_objective(artifacted, clean, choice.theta, method);
  return choice;
}

ThresholdSpec ideal_thresholds(const WaveletDecomposition& artifacted, const OracleContext& oracle,
                               ThresholdMethod method) {
  if (!artifacted.same_structure(oracle.clean)) {
    throw std::invalid_argument("ideal_thresholds: decompositions have different structures");
  }
  ThresholdSpec spec{method, Vector(artifacted.scales())};
  for (int m = 1; m <= artifacted.scales(); ++m) {
    spec.per_scale[m - 1] = ideal_threshold(artifacted.scale(m), oracle.clean.scale(m), method).theta;
  }
  return spec;
}

ThresholdSpec universal_thresholds(const Eigen::Ref<const Vector>& sigma, Index signal_length) {
  if (signal_length < 2) throw std::invalid_argument("universal_thresholds: N must be >= 2");
  if ((sigma.array() < 0.0).any() || !sigma.allFinite()) {
    throw std::invalid_argument("universal_thresholds: sigma must be finite and >= 0");
  }
  const double factor = std::sqrt(2.0 * std::log(static_cast<double>(signal_length)));
  return {ThresholdMethod::Soft, sigma * factor};
}

double sure_risk(const Eigen::Ref<const Vector>& coefficients, double sigma, double theta) {
  const double n = static_cast<double>(coefficients.size());
  const double var = sigma * sigma;
  double risk = n * var;
  for (double w : coefficients) {
    const double a = std::abs(w);
    if (a <= theta) risk -= 2.0 * var;
    const double m = std::min(a, theta);
    risk += m * m;
  }
  return risk;
}

double sure_threshold(const Eigen::Ref<const Vector>& coefficients, double sigma) {
  const Index n = coefficients.size();
  if (n == 0) throw std::invalid_argument("sure_threshold: empty coefficient array");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sure_threshold: sigma must be positive");
  }
  if (n == 1) return std::abs(coefficients[0]);

  const double nd = static_cast<double>(n);
  const double var = sigma * sigma;
  const double universal = sigma * std::sqrt(2.0 * std::log(nd));
  const double eta = (coefficients.squaredNorm() / var - nd) / nd;
  const double critical = std::pow(std::log2(nd), 1.5) / std::sqrt(nd);
  if (eta <= critical) return universal;

  Vector amp = coefficients.cwiseAbs();
  std::sort(amp.begin(), amp.end());
  // SURE is increasing between breakpoints, so on [0, universal] the minimum
  // sits on a breakpoint or on the universal threshold itself.
  double best_theta = universal;
  double best_risk = sure_risk(coefficients, sigma, universal);
  if (nd * var <= best_risk) {
    best_theta = 0.0;
    best_risk = nd * var;
  }
  double cumulative = 0.0;
  for (Index i = 0; i < n && amp[i] <= universal;) {
    Index j = i;
    while (j < n && amp[j] == amp[i]) {
      cumulative += amp[j] * amp[j];
      ++j;
    }
    const double theta = amp[i];
    const double risk = nd * var - 2.0 * var * static_cast<double>(j) + cumulative +
                        static_cast<double>(n - j) * theta * theta;
    if (risk < best_risk) {
      best_risk = risk;
      best_theta = theta;
    }
    i = j;
  }
  return best_theta;
}

ThresholdSpec sure_thresholds(const std::vector<Vector>& per_scale_coefficients,
                              const Eigen::Ref<const Vector>& sigma) {
  if (static_cast<Index>(per_scale_coefficients.size()) != sigma.size()) {
    throw std::invalid_argument("sure_thresholds: one sigma per scale is required");
  }
  ThresholdSpec spec{ThresholdMethod::Soft, Vector(sigma.size())};
  for (Index m = 0; m < sigma.size(); ++m) {
    spec.per_scale[m] = sure_threshold(per_scale_coefficients[m], sigma[m]);
  }
  return spec;
}

ThresholdSpec sure_thresholds(const WaveletDecomposition& artifacted,
                              const Eigen::Ref<const Vector>& sigma) {
  std::vector<Vector> scales;
  for (int m = 1; m <= artifacted.scales(); ++m) scales.push_back(artifacted.scale(m));
  return sure_thresholds(scales, sigma);
}

WaveletDecomposition lowpass_baseline(const WaveletDecomposition& decomposition) {
  WaveletDecomposition out = decomposition;
  for (auto& d : out.details) d.setZero();
  return out;
}

WaveletDecomposition apply_thresholds(const WaveletDecomposition& decomposition,
                                      const ThresholdSpec& spec) {
  if (spec.per_scale.size() != decomposition.scales()) {
    throw std::invalid_argument("apply_thresholds: expected " +
                                std::to_string(decomposition.scales()) + " thresholds, got " +
                                std::to_string(spec.per_scale.size()));
  }
  if ((spec.per_scale.array() < 0.0).any() || spec.per_scale.hasNaN()) {
    throw std::invalid_argument("apply_thresholds: thresholds must be nonnegative");
  }
  WaveletDecomposition out = decomposition;
  for (int m = 1; m <= out.scales(); ++m) {
    out.scale(m) = apply_threshold(decomposition.scale(m), spec.per_scale[m - 1], spec.method);
  }
  return out;
}

Vector coefficient_std(const WaveletDecomposition& decomposition) {
  Vector sigma(decomposition.scales());
  for (int m = 1; m <= decomposition.scales(); ++m) {
    sigma[m - 1] = standard_deviation(decomposition.scale(m));
  }
  return sigma;
}

Vector coefficient_mad_sigma(const WaveletDecomposition& decomposition) {
  Vector sigma(decomposition.scales());
  for (int m = 1; m <= decomposition.scales(); ++m) {
    Vector a = decomposition.scale(m).cwiseAbs();
    const Index mid = a.size() / 2;
    std::nth_element(a.begin(), a.begin() + mid, a.end());
    double median = a[mid];
    if (a.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(a.begin(), a.begin() + mid));
    }
    sigma[m - 1] = median / 0.6745;
  }
  return sigma;
}

double pass_through_threshold(const Eigen::Ref<const Vector>& coefficients) {
  const double top = coefficients.size() ? coefficients.cwiseAbs().maxCoeff() : 0.0;
  return std::nextafter(top, std::numeric_limits<double>::infinity());
}

}  // namespace wqn
