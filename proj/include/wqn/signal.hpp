#pragma once

#include <Eigen/Core>

namespace wqn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Uniformly sampled real-valued time series.
struct Signal {
  Vector samples;
  double sampling_rate = 1.0;

  Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sampling_rate; }
};

/// Throws std::invalid_argument on non-finite samples or a nonpositive rate.
void validate(const Signal& signal);

bool all_finite(const Eigen::Ref<const Vector>& x);

/// Population (1/N) standard deviation.
double standard_deviation(const Eigen::Ref<const Vector>& x);

/// Rescale to unit population standard deviation; the mean is kept.
Vector normalize_std(const Eigen::Ref<const Vector>& x);

}  // namespace wqn
