#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wqn/signal.hpp"

namespace wqn {

using Seed = std::uint64_t;

/// Seed of stream `stream` within realization `index`; every generator
/// call in the harness draws from a stream derived here.
Seed derive_seed(Seed base, std::uint64_t index, std::uint64_t stream = 0);

enum class ArtifactShape { Square, Triangle };

std::string to_string(ArtifactShape shape);
ArtifactShape artifact_shape_from_string(const std::string& name);

struct ArtifactSpec {
  ArtifactShape shape = ArtifactShape::Square;
  /// Target standard deviation of the wave over its support.
  double amplitude = 2.0;
  /// Period in samples, >= 2.
  double period = 128.0;
  /// Phase offset in samples; unset draws it uniformly from [0, period).
  std::optional<double> phase;
  /// Half-open sample range covered by the wave; unset is the whole epoch.
  std::optional<std::pair<Index, Index>> support;
};

/// Random walk of i.i.d. standard Gaussian increments rescaled to unit
/// standard deviation.
Signal brownian(Index length, Seed seed);

/// Raw (unnormalized) random walk.
Vector random_walk(Index length, Seed seed);

/// Zero-mean periodic square or triangle wave scaled to the requested
/// standard deviation over its support. Outside the support it is zero.
Signal artifact_wave(const ArtifactSpec& spec, Index length, Seed seed);

/// Phase actually used by artifact_wave for (spec, seed).
double artifact_phase(const ArtifactSpec& spec, Seed seed);

/// y = x + a.
Signal corrupt(const Signal& clean, const Signal& artifact);

/// Gaussian noise with power spectrum proportional to 1 / f^exponent,
/// unit standard deviation.
Signal colored_noise(Index length, double exponent, Seed seed, double sampling_rate = 1.0);

/// Draws from the zero-mean generalized Gaussian with scale alpha, shape beta.
Vector sample_generalized_gaussian(Index count, double alpha, double beta, Seed seed);

/// One signal per column of a plain-text numeric table.
std::vector<Signal> load_epochs(const std::string& path, double sampling_rate = 256.0,
                                bool normalize = false);

}  // namespace wqn
