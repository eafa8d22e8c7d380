#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqn/simulate.hpp"
#include "wqn/wavelet.hpp"

namespace wqn {

enum class BenchMethod { HardIdeal, SoftIdeal, SureShrink, Universal, Lowpass, Wqn };

std::string to_string(BenchMethod method);
BenchMethod bench_method_from_string(const std::string& name);
const std::vector<BenchMethod>& all_bench_methods();

/// How the WQN reference epoch is drawn for each realization.
enum class ReferenceMode {
  /// Second half of a random walk of twice the epoch length whose first
  /// half is the clean signal; both halves share the clean signal's scaling.
  Contiguous,
  /// A separate unit-variance random walk.
  Independent,
  /// The clean signal itself (oracle access to its coefficient statistics).
  Clean,
};

std::string to_string(ReferenceMode mode);
ReferenceMode reference_mode_from_string(const std::string& name);

/// Invalid key or value in a bench configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Universal-threshold N: the full signal length or each scale's own size.
enum class UniversalCount { Signal, Scale };

struct ExperimentConfig {
  Index realizations = 200;
  Index epoch_length = 2048;
  std::vector<ArtifactShape> shapes{ArtifactShape::Square, ArtifactShape::Triangle};
  std::vector<double> amplitudes{2.0};
  double period = 128.0;
  std::string wavelet = "sym5";
  int levels = 7;
  BoundaryMode boundary = BoundaryMode::Periodic;
  std::vector<BenchMethod> methods = all_bench_methods();
  Seed seed = 20240601;
  ReferenceMode reference = ReferenceMode::Contiguous;
  bool sure_on_approximation = false;
  bool universal_on_approximation = true;
  UniversalCount universal_count = UniversalCount::Signal;
  bool hurst = true;
  /// 0 uses the hardware concurrency.
  int threads = 0;
  std::string records_path;
  std::string summary_path;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Flat "key = value" text; '#' starts a comment, lists are comma-separated.
/// Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "config");
ExperimentConfig load_config(const std::string& path);
/// Applies one key/value pair on top of `config`.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

struct MetricRecord {
  BenchMethod method = BenchMethod::Wqn;
  ArtifactShape shape = ArtifactShape::Square;
  double amplitude = 0.0;
  Index realization = 0;
  double mse = 0.0;
  double wasserstein = 0.0;
  double wasserstein_abs = 0.0;
  double alpha = 0.0;
  double hurst = 0.0;
  double r_squared = 0.0;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

Summary summarize(std::vector<double> values);

struct AggregateKey {
  BenchMethod method;
  ArtifactShape shape;
  double amplitude;
  auto operator<=>(const AggregateKey&) const = default;
};

struct Aggregate {
  Index count = 0;
  Summary mse;
  Summary wasserstein;
  Summary wasserstein_abs;
  Summary alpha;
  Summary hurst;
  Summary r_squared;
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Ordered by shape, amplitude, realization, method.
  std::vector<MetricRecord> records;
  std::map<AggregateKey, Aggregate> aggregates;

  const Aggregate& at(BenchMethod method, ArtifactShape shape, double amplitude) const;
};

/// Realization r draws every random quantity from derive_seed(seed, r, .),
/// so records do not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// run_experiment over an amplitude grid of at least two increasing values.
ExperimentResult amplitude_sweep(const ExperimentConfig& config);

std::map<AggregateKey, Aggregate> aggregate(const std::vector<MetricRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<MetricRecord>& records);
nlohmann::json summary_json(const ExperimentResult& result);
/// Metric rows by method columns, one block per shape and amplitude.
void print_table(std::ostream& out, const ExperimentResult& result);
/// Median and interquartile range of the MSE per method and amplitude.
void print_sweep(std::ostream& out, const ExperimentResult& result);

/// Writes records_path / summary_path when set.
void write_outputs(const ExperimentResult& result);

}  // namespace wqn
