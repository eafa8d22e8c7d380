#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wqn/metrics.hpp"

namespace wqn {

double mse(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mse: lengths differ (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) throw std::invalid_argument("mse: empty input");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double mse(const Signal& a, const Signal& b) { return mse(a.samples, b.samples); }

double wasserstein1(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& q) {
  if (p.size() == 0 || q.size() == 0) throw std::invalid_argument("wasserstein1: empty sample");
  std::vector<double> a(p.begin(), p.end());
  std::vector<double> b(q.begin(), q.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
  }
  // Integrate |F_a - F_b| over the merged breakpoints.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double x = std::min(a[0], b[0]);
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    const double next = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - x);
    x = next;
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
  }
  return total;
}

double avg_coefficient_wasserstein(const WaveletDecomposition& restored,
                                   const WaveletDecomposition& original, CoefficientValues values) {
  if (!restored.same_structure(original)) {
    throw std::invalid_argument("avg_coefficient_wasserstein: decompositions differ in structure");
  }
  double sum = 0.0;
  for (int m = 1; m <= restored.scales(); ++m) {
    if (values == CoefficientValues::Absolute) {
      sum += wasserstein1(restored.scale(m).cwiseAbs(), original.scale(m).cwiseAbs());
    } else {
      sum += wasserstein1(restored.scale(m), original.scale(m));
    }
  }
  return sum / restored.scales();
}

Index Histogram::bin_of(double value) const {
  const Index n = bins();
  if (n == 0 || value < edges[0] || value > edges[n]) return -1;
  if (value == edges[n]) return n - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<Index>(it - edges.begin()) - 1;
}

Histogram histogram(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: need at least two edges");
  for (Index i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument("histogram: edges must increase");
  }
  if (values.size() == 0) throw std::invalid_argument("histogram: empty sample");
  Histogram h;
  h.edges = edges;
  h.counts = Vector::Zero(edges.size() - 1);
  h.total = values.size();
  for (double v : values) {
    const Index b = h.bin_of(v);
    if (b >= 0) h.counts[b] += 1.0;
  }
  h.density = h.counts.cwiseQuotient(h.widths()) / static_cast<double>(h.total);
  return h;
}

Histogram histogram(const Eigen::Ref<const Vector>& values, Index bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (values.size() == 0) throw std::invalid_argument("histogram: empty sample");
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Vector edges = Vector::LinSpaced(bins + 1, lo, hi);
  edges[bins] = hi;
  return histogram(values, edges);
}

namespace {

void check_level(const WaveletDecomposition& d, int level) {
  if (level < 1 || level > d.scales()) {
    throw std::invalid_argument("coefficient_histogram: level " + std::to_string(level) +
                                " outside 1.." + std::to_string(d.scales()));
  }
}

}  // namespace

Histogram coefficient_histogram(const WaveletDecomposition& decomposition, int level, Index bins) {
  check_level(decomposition, level);
  return histogram(decomposition.scale(level), bins);
}

Histogram coefficient_histogram(const WaveletDecomposition& decomposition, int level,
                                const Eigen::Ref<const Vector>& edges) {
  check_level(decomposition, level);
  return histogram(decomposition.scale(level), edges);
}

}  // namespace wqn
