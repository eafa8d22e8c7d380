#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "wqn/bench.hpp"
#include "wqn/io.hpp"
#include "wqn/metrics.hpp"
#include "wqn/normalization.hpp"
#include "wqn/spectral.hpp"
#include "wqn/thresholding.hpp"

namespace wqn {

using nlohmann::json;

namespace {

constexpr std::uint64_t kCleanStream = 0;
constexpr std::uint64_t kReferenceStream = 1;
constexpr std::uint64_t kPhaseStream = 2;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
}

long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

template <typename F>
auto rethrow_as_config(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

// The restored signal and its metrics for one method.
struct RestoredMetrics {
  double mse, w, w_abs, alpha, hurst, r2;
};

RestoredMetrics score(const Vector& restored, const Vector& clean,
                      const WaveletDecomposition& clean_dec, const ExperimentConfig& config) {
  const auto dec = decompose(restored, clean_dec.wavelet, clean_dec.levels(), clean_dec.boundary);
  RestoredMetrics m{};
  m.mse = mse(restored, clean);
  m.w = avg_coefficient_wasserstein(dec, clean_dec, CoefficientValues::Signed);
  m.w_abs = avg_coefficient_wasserstein(dec, clean_dec, CoefficientValues::Absolute);
  if (config.hurst) {
    const auto fit = hurst_from_psd(psd(Signal{restored, 1.0}));
    m.alpha = fit.alpha;
    m.hurst = fit.hurst;
    m.r2 = fit.r_squared;
  } else {
    m.alpha = m.hurst = m.r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

WaveletDecomposition restore(BenchMethod method, const WaveletDecomposition& cy,
                             const WaveletDecomposition& cx, const WaveletDecomposition& cref,
                             const ExperimentConfig& config) {
  const Vector sigma = coefficient_std(cx);
  const int approx = cy.scales();
  switch (method) {
    case BenchMethod::HardIdeal:
      return apply_thresholds(cy, ideal_thresholds(cy, OracleContext{cx}, ThresholdMethod::Hard));
    case BenchMethod::SoftIdeal:
      return apply_thresholds(cy, ideal_thresholds(cy, OracleContext{cx}, ThresholdMethod::Soft));
    case BenchMethod::SureShrink: {
      ThresholdSpec spec = sure_thresholds(cy, sigma);
      if (!config.sure_on_approximation) {
        spec.per_scale[approx - 1] = pass_through_threshold(cy.scale(approx));
      }
      return apply_thresholds(cy, spec);
    }
    case BenchMethod::Universal: {
      ThresholdSpec spec = universal_thresholds(sigma, config.epoch_length);
      if (config.universal_count == UniversalCount::Scale) {
        for (int m = 1; m <= cy.scales(); ++m) {
          spec.per_scale[m - 1] = universal_thresholds(sigma.segment(m - 1, 1),
                                                       std::max<Index>(2, cy.scale(m).size()))
                                      .per_scale[0];
        }
      }
      if (!config.universal_on_approximation) {
        spec.per_scale[approx - 1] = pass_through_threshold(cy.scale(approx));
      }
      return apply_thresholds(cy, spec);
    }
    case BenchMethod::Lowpass:
      return lowpass_baseline(cy);
    case BenchMethod::Wqn:
      return normalize_decomposition(cy, cref);
  }
  throw std::logic_error("unhandled bench method");
}

std::vector<MetricRecord> run_realization(const ExperimentConfig& config, const WaveletSpec& wavelet,
                                          Index r) {
  const Index n = config.epoch_length;
  Vector clean;
  Vector reference;
  if (config.reference == ReferenceMode::Contiguous) {
    const Vector walk = random_walk(2 * n, derive_seed(config.seed, r, kCleanStream));
    const double sd = standard_deviation(walk.head(n));
    clean = walk.head(n) / sd;
    reference = walk.tail(n) / sd;
  } else {
    clean = brownian(n, derive_seed(config.seed, r, kCleanStream)).samples;
    reference = config.reference == ReferenceMode::Clean
                    ? clean
                    : brownian(n, derive_seed(config.seed, r, kReferenceStream)).samples;
  }
  const auto cx = decompose(clean, wavelet, config.levels, config.boundary);
  const auto cref = decompose(reference, wavelet, config.levels, config.boundary);

  std::vector<MetricRecord> out;
  for (ArtifactShape shape : config.shapes) {
    for (double amplitude : config.amplitudes) {
      ArtifactSpec spec;
      spec.shape = shape;
      spec.amplitude = amplitude;
      spec.period = config.period;
      const Signal artifact = artifact_wave(spec, n, derive_seed(config.seed, r, kPhaseStream));
      const Vector y = clean + artifact.samples;
      const auto cy = decompose(y, wavelet, config.levels, config.boundary);
      for (BenchMethod method : config.methods) {
        const Vector restored = reconstruct(restore(method, cy, cx, cref, config));
        const RestoredMetrics m = score(restored, clean, cx, config);
        out.push_back({method, shape, amplitude, r, m.mse, m.w, m.w_abs, m.alpha, m.hurst, m.r2});
      }
    }
  }
  return out;
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

json summary_to_json(const Summary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"q25", s.q25}, {"q75", s.q75}};
}

}  // namespace

std::string to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::HardIdeal: return "hard-ideal";
    case BenchMethod::SoftIdeal: return "soft-ideal";
    case BenchMethod::SureShrink: return "sureshrink";
    case BenchMethod::Universal: return "universal";
    case BenchMethod::Lowpass: return "lowpass";
    case BenchMethod::Wqn: return "wqn";
  }
  return "?";
}

BenchMethod bench_method_from_string(const std::string& name) {
  for (BenchMethod m : all_bench_methods()) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected hard-ideal, soft-ideal, sureshrink, universal, lowpass "
                              "or wqn)");
}

const std::vector<BenchMethod>& all_bench_methods() {
  static const std::vector<BenchMethod> methods{BenchMethod::SoftIdeal, BenchMethod::HardIdeal,
                                                BenchMethod::SureShrink, BenchMethod::Universal,
                                                BenchMethod::Lowpass,    BenchMethod::Wqn};
  return methods;
}

std::string to_string(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::Contiguous: return "contiguous";
    case ReferenceMode::Independent: return "independent";
    case ReferenceMode::Clean: return "clean";
  }
  return "?";
}

ReferenceMode reference_mode_from_string(const std::string& name) {
  if (name == "contiguous") return ReferenceMode::Contiguous;
  if (name == "independent") return ReferenceMode::Independent;
  if (name == "clean") return ReferenceMode::Clean;
  throw std::invalid_argument("unknown reference mode '" + name +
                              "' (expected contiguous, independent or clean)");
}

void ExperimentConfig::validate() const {
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (epoch_length < 2) throw ConfigError("epoch_length must be >= 2");
  if (shapes.empty()) throw ConfigError("shapes must not be empty");
  if (amplitudes.empty()) throw ConfigError("amplitudes must not be empty");
  for (double a : amplitudes) {
    if (!(a >= 0.0)) throw ConfigError("amplitudes must be >= 0");
  }
  if (!(period >= 2.0)) throw ConfigError("period must be >= 2 samples");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  const WaveletSpec w = rethrow_as_config("wavelet", [&] { return WaveletSpec::from_name(wavelet); });
  rethrow_as_config("levels", [&] {
    detail::check_decompose_args(epoch_length, w, levels, boundary);
    return 0;
  });
  if (hurst) {
    const Index seg = default_segment_length(epoch_length);
    if (epoch_length < seg || seg < 32) {
      throw ConfigError("epoch_length " + std::to_string(epoch_length) +
                        " is too short for the Hurst fit (set hurst = false)");
    }
  }
}

json ExperimentConfig::to_json() const {
  std::vector<std::string> shape_names, method_names;
  for (auto s : shapes) shape_names.push_back(to_string(s));
  for (auto m : methods) method_names.push_back(to_string(m));
  return {{"realizations", realizations},
          {"epoch_length", epoch_length},
          {"shapes", shape_names},
          {"amplitudes", amplitudes},
          {"amplitude_unit", "multiple of the clean-signal standard deviation"},
          {"period", period},
          {"wavelet", wavelet},
          {"levels", levels},
          {"boundary", std::string(wqn::to_string(boundary))},
          {"methods", method_names},
          {"seed", seed},
          {"reference", to_string(reference)},
          {"sure_on_approximation", sure_on_approximation},
          {"universal_on_approximation", universal_on_approximation},
          {"universal_count", universal_count == UniversalCount::Signal ? "signal" : "scale"},
          {"hurst", hurst},
          {"sigma_source", "clean-signal coefficient standard deviation"},
          {"wasserstein", "signed coefficients (absolute variant reported as wasserstein_abs)"}};
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto list = [&] {
    auto items = split_list(value);
    if (items.empty()) throw ConfigError("config key '" + key + "': empty list");
    return items;
  };
  if (key == "realizations") {
    c.realizations = parse_integer(key, value);
  } else if (key == "epoch_length") {
    c.epoch_length = parse_integer(key, value);
  } else if (key == "shapes") {
    c.shapes.clear();
    for (const auto& s : list()) {
      c.shapes.push_back(rethrow_as_config(key, [&] { return artifact_shape_from_string(s); }));
    }
  } else if (key == "amplitudes") {
    c.amplitudes.clear();
    for (const auto& s : list()) c.amplitudes.push_back(parse_real(key, s));
  } else if (key == "period") {
    c.period = parse_real(key, value);
  } else if (key == "wavelet") {
    c.wavelet = value;
  } else if (key == "levels") {
    c.levels = static_cast<int>(parse_integer(key, value));
  } else if (key == "boundary") {
    c.boundary = rethrow_as_config(key, [&] { return boundary_from_string(value); });
  } else if (key == "methods") {
    c.methods.clear();
    for (const auto& s : list()) {
      c.methods.push_back(rethrow_as_config(key, [&] { return bench_method_from_string(s); }));
    }
  } else if (key == "seed") {
    c.seed = static_cast<Seed>(parse_integer(key, value));
  } else if (key == "reference") {
    c.reference = rethrow_as_config(key, [&] { return reference_mode_from_string(value); });
  } else if (key == "sure_on_approximation") {
    c.sure_on_approximation = parse_bool(key, value);
  } else if (key == "universal_on_approximation") {
    c.universal_on_approximation = parse_bool(key, value);
  } else if (key == "universal_count") {
    if (value == "signal") {
      c.universal_count = UniversalCount::Signal;
    } else if (value == "scale") {
      c.universal_count = UniversalCount::Scale;
    } else {
      throw ConfigError("config key 'universal_count': expected signal or scale, got '" + value + "'");
    }
  } else if (key == "hurst") {
    c.hurst = parse_bool(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_integer(key, value));
  } else if (key == "records") {
    c.records_path = value;
  } else if (key == "summary") {
    c.summary_path = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(row) + ": expected 'key = value'");
    }
    try {
      apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  return s;
}

std::map<AggregateKey, Aggregate> aggregate(const std::vector<MetricRecord>& records) {
  struct Columns {
    std::vector<double> mse, w, w_abs, alpha, hurst, r2;
  };
  std::map<AggregateKey, Columns> grouped;
  for (const auto& r : records) {
    auto& c = grouped[{r.method, r.shape, r.amplitude}];
    c.mse.push_back(r.mse);
    c.w.push_back(r.wasserstein);
    c.w_abs.push_back(r.wasserstein_abs);
    c.alpha.push_back(r.alpha);
    c.hurst.push_back(r.hurst);
    c.r2.push_back(r.r_squared);
  }
  std::map<AggregateKey, Aggregate> out;
  for (auto& [key, c] : grouped) {
    Aggregate a;
    a.count = static_cast<Index>(c.mse.size());
    a.mse = summarize(c.mse);
    a.wasserstein = summarize(c.w);
    a.wasserstein_abs = summarize(c.w_abs);
    a.alpha = summarize(c.alpha);
    a.hurst = summarize(c.hurst);
    a.r_squared = summarize(c.r2);
    out.emplace(key, a);
  }
  return out;
}

const Aggregate& ExperimentResult::at(BenchMethod method, ArtifactShape shape, double amplitude) const {
  const auto it = aggregates.find({method, shape, amplitude});
  if (it == aggregates.end()) {
    throw std::out_of_range("no aggregate for " + to_string(method) + " / " + to_string(shape));
  }
  return it->second;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const WaveletSpec wavelet = WaveletSpec::from_name(config.wavelet);
  const Index count = config.realizations;
  std::vector<std::vector<MetricRecord>> slots(count);

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<Index>(workers, count));
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (Index r = next++; r < count; r = next++) {
      try {
        slots[r] = run_realization(config, wavelet, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.config = config;
  const std::size_t per_case = config.methods.size();
  const std::size_t cases = config.shapes.size() * config.amplitudes.size();
  result.records.reserve(cases * per_case * static_cast<std::size_t>(count));
  for (std::size_t c = 0; c < cases; ++c) {
    for (Index r = 0; r < count; ++r) {
      const auto first = slots[r].begin() + static_cast<std::ptrdiff_t>(c * per_case);
      result.records.insert(result.records.end(), first, first + static_cast<std::ptrdiff_t>(per_case));
    }
  }
  result.aggregates = aggregate(result.records);
  return result;
}

ExperimentResult amplitude_sweep(const ExperimentConfig& config) {
  if (config.amplitudes.size() < 2) throw ConfigError("amplitude sweep needs at least two amplitudes");
  for (std::size_t i = 1; i < config.amplitudes.size(); ++i) {
    if (!(config.amplitudes[i] > config.amplitudes[i - 1])) {
      throw ConfigError("amplitude sweep grid must be strictly increasing");
    }
  }
  return run_experiment(config);
}

void write_records_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
  out << "method,shape,amplitude,realization,mse,wasserstein,wasserstein_abs,alpha,hurst,r_squared\n";
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << to_string(r.shape) << ',' << format_number(r.amplitude)
        << ',' << r.realization << ',' << format_number(r.mse) << ',' << format_number(r.wasserstein)
        << ',' << format_number(r.wasserstein_abs) << ',' << format_number(r.alpha) << ','
        << format_number(r.hurst) << ',' << format_number(r.r_squared) << '\n';
  }
}

json summary_json(const ExperimentResult& result) {
  json rows = json::array();
  for (const auto& [key, a] : result.aggregates) {
    rows.push_back({{"method", to_string(key.method)},
                    {"shape", to_string(key.shape)},
                    {"amplitude", key.amplitude},
                    {"count", a.count},
                    {"mse", summary_to_json(a.mse)},
                    {"wasserstein", summary_to_json(a.wasserstein)},
                    {"wasserstein_abs", summary_to_json(a.wasserstein_abs)},
                    {"alpha", summary_to_json(a.alpha)},
                    {"hurst", summary_to_json(a.hurst)},
                    {"r_squared", summary_to_json(a.r_squared)}});
  }
  return {{"config", result.config.to_json()},
          {"records", result.records.size()},
          {"aggregates", rows}};
}

void print_table(std::ostream& out, const ExperimentResult& result) {
  const auto& c = result.config;
  out << "Restoration of Brownian signals, mean over " << c.realizations << " realizations\n";
  for (ArtifactShape shape : c.shapes) {
    for (double amplitude : c.amplitudes) {
      out << "\n" << to_string(shape) << " artifact, amplitude " << format_number(amplitude) << "\n";
      out << std::left << std::setw(16) << "metric";
      for (BenchMethod m : c.methods) out << std::right << std::setw(12) << to_string(m);
      out << "\n";
      auto row = [&](const char* name, auto field) {
        out << std::left << std::setw(16) << name;
        for (BenchMethod m : c.methods) {
          const Aggregate& a = result.at(m, shape, amplitude);
          std::ostringstream cell;
          cell << std::fixed << std::setprecision(3) << field(a);
          out << std::right << std::setw(12) << cell.str();
        }
        out << "\n";
      };
      row("MSE", [](const Aggregate& a) { return a.mse.mean; });
      row("Avg Wasserstein", [](const Aggregate& a) { return a.wasserstein.mean; });
      if (c.hurst) {
        row("Hurst", [](const Aggregate& a) { return a.hurst.mean; });
        row("PSD fit R2", [](const Aggregate& a) { return a.r_squared.mean; });
      }
    }
  }
}

void print_sweep(std::ostream& out, const ExperimentResult& result) {
  const auto& c = result.config;
  out << "MSE median [q25, q75] over " << c.realizations << " realizations\n";
  for (ArtifactShape shape : c.shapes) {
    out << "\n" << to_string(shape) << " artifact\n";
    out << std::left << std::setw(12) << "amplitude";
    for (BenchMethod m : c.methods) out << std::right << std::setw(26) << to_string(m);
    out << "\n";
    for (double amplitude : c.amplitudes) {
      out << std::left << std::setw(12) << format_number(amplitude);
      for (BenchMethod m : c.methods) {
        const Summary& s = result.at(m, shape, amplitude).mse;
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(3) << s.median << " [" << s.q25 << ", " << s.q75
             << "]";
        out << std::right << std::setw(26) << cell.str();
      }
      out << "\n";
    }
  }
}

void write_outputs(const ExperimentResult& result) {
  if (!result.config.records_path.empty()) {
    std::ostringstream s;
    write_records_csv(s, result.records);
    write_text_file(result.config.records_path, s.str());
  }
  if (!result.config.summary_path.empty()) {
    write_text_file(result.config.summary_path, summary_json(result).dump(2) + "\n");
  }
}

}  // namespace wqn
