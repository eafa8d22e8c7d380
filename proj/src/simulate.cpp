#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "wqn/simulate.hpp"

namespace wqn {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 engine(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool has_comma = line.find(',') != std::string::npos;
  auto flush = [&]() {
    fields.push_back(current);
    current.clear();
  };
  if (has_comma) {
    for (char c : line) {
      if (c == ',') {
        flush();
      } else {
        current.push_back(c);
      }
    }
    flush();
    for (auto& f : fields) {
      const auto b = f.find_first_not_of(" \t\r");
      const auto e = f.find_last_not_of(" \t\r");
      f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
  } else {
    std::istringstream in(line);
    std::string token;
    while (in >> token) fields.push_back(token);
  }
  return fields;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  char* end = nullptr;
  value = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(value);
}

}  // namespace

Seed derive_seed(Seed base, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(base) + index) ^ (stream * 0xd1b54a32d192ed03ULL));
}

std::string to_string(ArtifactShape shape) {
  return shape == ArtifactShape::Square ? "square" : "triangle";
}

ArtifactShape artifact_shape_from_string(const std::string& name) {
  if (name == "square") return ArtifactShape::Square;
  if (name == "triangle") return ArtifactShape::Triangle;
  throw std::invalid_argument("unknown artifact shape '" + name + "' (expected square or triangle)");
}

Vector random_walk(Index length, Seed seed) {
  if (length < 2) throw std::invalid_argument("brownian: length must be >= 2");
  auto gen = engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(length);
  double acc = 0.0;
  for (Index i = 0; i < length; ++i) {
    acc += normal(gen);
    x[i] = acc;
  }
  return x;
}

Signal brownian(Index length, Seed seed) {
  const Vector walk = random_walk(length, seed);
  return {walk / standard_deviation(walk), 1.0};
}

double artifact_phase(const ArtifactSpec& spec, Seed seed) {
  if (spec.phase) return *spec.phase;
  auto gen = engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, spec.period);
  return uniform(gen);
}

Signal artifact_wave(const ArtifactSpec& spec, Index length, Seed seed) {
  if (!(spec.period >= 2.0) || !std::isfinite(spec.period)) {
    throw std::invalid_argument("artifact period must be >= 2 samples");
  }
  if (!std::isfinite(spec.amplitude) || spec.amplitude < 0.0) {
    throw std::invalid_argument("artifact amplitude must be finite and >= 0");
  }
  Index begin = 0;
  Index end = length;
  if (spec.support) {
    std::tie(begin, end) = *spec.support;
    if (begin < 0 || end > length || end - begin < 2) {
      throw std::invalid_argument("artifact support must be a range of >= 2 samples inside the epoch");
    }
  }
  Signal out{Vector::Zero(length), 1.0};
  if (spec.amplitude == 0.0) return out;

  const double phase = artifact_phase(spec, seed);
  Vector wave(end - begin);
  for (Index i = 0; i < wave.size(); ++i) {
    const double t = std::fmod(static_cast<double>(i) + phase, spec.period) / spec.period;
    wave[i] = spec.shape == ArtifactShape::Square ? (t < 0.5 ? 1.0 : -1.0)
                                                  : 1.0 - 4.0 * std::abs(t - 0.5);
  }
  wave.array() -= wave.mean();
  const double sd = standard_deviation(wave);
  if (sd == 0.0) throw std::invalid_argument("artifact support too short for the period");
  out.samples.segment(begin, wave.size()) = wave * (spec.amplitude / sd);
  return out;
}

Signal corrupt(const Signal& clean, const Signal& artifact) {
  if (clean.size() != artifact.size()) {
    throw std::invalid_argument("corrupt: clean signal has " + std::to_string(clean.size()) +
                                " samples, artifact has " + std::to_string(artifact.size()));
  }
  return {clean.samples + artifact.samples, clean.sampling_rate};
}

Signal colored_noise(Index length, double exponent, Seed seed, double sampling_rate) {
  if (length < 2) throw std::invalid_argument("colored_noise: length must be >= 2");
  auto gen = engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index half = length / 2 + 1;
  std::vector<std::complex<double>> spectrum(length);
  for (Index k = 1; k < half; ++k) {
    const double gain = std::pow(static_cast<double>(k) / static_cast<double>(length), -exponent / 2.0);
    std::complex<double> c(normal(gen), normal(gen));
    if (length % 2 == 0 && k == length / 2) c = {c.real() * std::sqrt(2.0), 0.0};
    spectrum[k] = gain * c;
    if (k != length - k) spectrum[length - k] = std::conj(spectrum[k]);
  }
  Eigen::FFT<double> fft;
  std::vector<double> time(length);
  fft.inv(time, spectrum);
  Vector x = Eigen::Map<Vector>(time.data(), length);
  x.array() -= x.mean();
  return {x / standard_deviation(x), sampling_rate};
}

Vector sample_generalized_gaussian(Index count, double alpha, double beta, Seed seed) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("generalized Gaussian parameters must be positive");
  }
  auto gen = engine(seed);
  std::gamma_distribution<double> gamma(1.0 / beta, 1.0);
  std::bernoulli_distribution coin(0.5);
  Vector x(count);
  for (Index i = 0; i < count; ++i) {
    const double magnitude = alpha * std::pow(gamma(gen), 1.0 / beta);
    x[i] = coin(gen) ? magnitude : -magnitude;
  }
  return x;
}

std::vector<Signal> load_epochs(const std::string& path, double sampling_rate, bool normalize) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  if (!(sampling_rate > 0.0)) throw std::invalid_argument("sampling rate must be positive");

  std::vector<std::vector<double>> columns;
  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::vector<double> values(fields.size());
    std::size_t bad = fields.size();
    for (std::size_t c = 0; c < fields.size() && bad == fields.size(); ++c) {
      if (!parse_double(fields[c], values[c])) bad = c;
    }
    if (first) {
      first = false;
      columns.resize(fields.size());
      if (bad != fields.size()) continue;  // header line
    }
    if (bad != fields.size()) {
      throw std::invalid_argument(path + ": row " + std::to_string(row) + ", column " +
                               std::to_string(bad + 1) + ": non-numeric value '" + fields[bad] +
                               "'");
    }
    if (fields.size() != columns.size()) {
      throw std::invalid_argument(path + ": row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " columns, expected " +
                               std::to_string(columns.size()));
    }
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
  }
  if (columns.empty() || columns.front().empty()) {
    throw std::invalid_argument(path + ": no numeric data");
  }
  std::vector<Signal> out;
  for (const auto& col : columns) {
    Signal s{Eigen::Map<const Vector>(col.data(), static_cast<Index>(col.size())), sampling_rate};
    if (normalize) s.samples = normalize_std(s.samples);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wqn
