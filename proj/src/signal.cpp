#include "wqn/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace wqn {

bool all_finite(const Eigen::Ref<const Vector>& x) { return x.allFinite(); }

void validate(const Signal& signal) {
  if (!(signal.sampling_rate > 0.0) || !std::isfinite(signal.sampling_rate)) {
    throw std::invalid_argument("signal: sampling rate must be positive and finite");
  }
  if (!signal.samples.allFinite()) {
    throw std::invalid_argument("signal: samples must be finite");
  }
}

double standard_deviation(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 0) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().mean());
}

Vector normalize_std(const Eigen::Ref<const Vector>& x) {
  const double sd = standard_deviation(x);
  if (!(sd > 0.0)) throw std::invalid_argument("normalize_std: signal has zero variance");
  return x / sd;
}

}  // namespace wqn
