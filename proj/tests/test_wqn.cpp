#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wqn/normalization.hpp"
#include "wqn/simulate.hpp"
#include "wqn/stream.hpp"

using namespace wqn;

namespace {

Vector gaussian(Index n, double scale, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Vector x(n);
  for (auto& v : x) v = normal(gen);
  return x;
}

Vector sorted_abs(const Vector& x) {
  Vector a = x.cwiseAbs();
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST_CASE("counting cdf and plotting positions") {
  const Vector c = (Vector(4) << -3.0, 1.0, 2.0, -4.0).finished();
  const EmpiricalAmplitudeCDF cdf(c);
  CHECK(cdf.count() == 4);
  CHECK(cdf(0.5) == 0.0);
  CHECK(cdf(1.0) == 0.0);
  CHECK(cdf(1.5) == 0.25);
  CHECK(cdf(3.5) == 0.75);
  CHECK(cdf(10.0) == 1.0);
  CHECK(cdf.position(1.0) == doctest::Approx(0.125));
  CHECK(cdf.position(4.0) == doctest::Approx(0.875));
  CHECK(cdf.position(2.5) == doctest::Approx(0.5));
  CHECK(cdf.position(2.25) == doctest::Approx(0.4375));
  CHECK(cdf.position(0.0) == doctest::Approx(0.125));
  CHECK(cdf.position(9.0) == doctest::Approx(0.875));
  CHECK(cdf.quantile(0.4375) == doctest::Approx(2.25));
  CHECK(cdf.quantile(0.0) == 1.0);
  CHECK(cdf.quantile(1.0) == 4.0);
  CHECK(cdf.rank(3.0) == doctest::Approx(2.0));
  CHECK(cdf.at_rank(1.5) == doctest::Approx(2.5));
}

TEST_CASE("tied amplitudes share the mean position") {
  const Vector c = (Vector(4) << 1.0, -1.0, 1.0, 5.0).finished();
  const EmpiricalAmplitudeCDF cdf(c);
  CHECK(cdf.position(1.0) == doctest::Approx((0.125 + 0.375 + 0.625) / 3.0));
  CHECK_THROWS_AS(EmpiricalAmplitudeCDF{Vector()}, std::invalid_argument);
}

TEST_CASE("transport between identical samples is the identity") {
  const Vector c = gaussian(200, 1.0, 7);
  const TransportMap map(empirical_cdf(c), empirical_cdf(c), 1);
  for (Index i = 0; i < c.size(); ++i) {
    CHECK(map(std::abs(c[i])) == doctest::Approx(std::abs(c[i])).epsilon(1e-12));
  }
}

TEST_CASE("transport is monotone") {
  const TransportMap map(empirical_cdf(gaussian(300, 3.0, 1)), empirical_cdf(gaussian(250, 1.0, 2)), 1);
  double prev = -1.0;
  for (double a = 0.0; a < 12.0; a += 0.05) {
    const double t = map(a);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("normalization never increases an amplitude and keeps signs") {
  const Vector art = gaussian(500, 4.0, 3);
  const Vector ref = gaussian(400, 1.0, 4);
  const auto out = normalize_coefficients(art, ref);
  for (Index i = 0; i < art.size(); ++i) {
    CHECK(std::abs(out.coefficients[i]) <= std::abs(art[i]));
    CHECK(out.coefficients[i] * art[i] >= 0.0);
  }
  CHECK(out.attenuated > 400);
}

TEST_CASE("unclamped transport reproduces the reference distribution") {
  const Vector art = gaussian(256, 5.0, 5);
  const Vector ref = gaussian(256, 1.0, 6);
  const auto out = normalize_coefficients(art, ref, 1, NormalizeOptions{false});
  CHECK((sorted_abs(out.coefficients) - sorted_abs(ref)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reference dominating the artifact leaves coefficients unchanged") {
  const Vector art = gaussian(256, 0.5, 8);
  const Vector ref = gaussian(256, 1.0, 8) * 3.0;
  const auto out = normalize_coefficients(art, ref);
  CHECK((out.coefficients - art).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.attenuated == 0);
}

TEST_CASE("epoch correction against itself is the identity") {
  const Vector x = brownian(512, 3).samples;
  const auto fixed = correct_epoch(x, x, WaveletSpec::symlet(5), 5);
  CHECK((fixed.signal - x).norm() < 1e-10);
  CHECK(fixed.report.scales.size() == 6);
}

TEST_CASE("epoch correction is idempotent") {
  const Vector ref = brownian(512, 10).samples;
  Vector art = brownian(512, 11).samples;
  art += artifact_wave(ArtifactSpec{ArtifactShape::Square, 4.0, 64.0, 0.0}, 512, 1).samples;
  const auto w = WaveletSpec::symlet(5);
  const auto once = correct_epoch(art, ref, w, 5, BoundaryMode::Periodic);
  const auto twice = correct_epoch(once.signal, ref, w, 5, BoundaryMode::Periodic);
  const auto d1 = decompose(once.signal, w, 5, BoundaryMode::Periodic);
  const auto d2 = decompose(twice.signal, w, 5, BoundaryMode::Periodic);
  for (int m = 1; m <= d1.scales(); ++m) {
    CHECK((d2.scale(m).cwiseAbs() - d1.scale(m).cwiseAbs()).maxCoeff() <= 1e-12);
  }
  CHECK(once.signal.squaredNorm() < art.squaredNorm());
}

TEST_CASE("scale reports") {
  const Vector ref = gaussian(512, 1.0, 12);
  const Vector art = gaussian(512, 6.0, 13);
  const auto fixed = correct_epoch(art, ref, WaveletSpec::daubechies(4), 4);
  for (const auto& s : fixed.report.scales) {
    CHECK(s.energy_after <= s.energy_before);
    CHECK(s.attenuation_ratio() < 0.5);
    CHECK(s.pre_quantiles.size() == report_quantile_levels().size());
    CHECK(s.total > 0);
  }
}

TEST_CASE("stream correction touches only the intervals") {
  const double fs = 64.0;
  Signal sig{brownian(1024, 20).samples, fs};
  Vector art = artifact_wave(ArtifactSpec{ArtifactShape::Triangle, 5.0, 32.0, 0.0}, 1024, 1).samples;
  const SampleRange bad{300, 420};
  for (Index i = 0; i < 1024; ++i) {
    if (i < bad.begin || i >= bad.end) art[i] = 0.0;
  }
  Signal noisy{sig.samples + art, fs};
  const Interval iv{bad.begin / fs, bad.end / fs};
  StreamOptions options;
  options.epoch_seconds = 2.0;
  const auto out = correct_stream(noisy, std::span<const Interval>(&iv, 1), options);
  for (Index i = 0; i < 1024; ++i) {
    if (i < bad.begin || i >= bad.end) REQUIRE(out.signal.samples[i] == noisy.samples[i]);
  }
  const double before = (noisy.samples - sig.samples).segment(bad.begin, bad.size()).squaredNorm();
  const double after = (out.signal.samples - sig.samples).segment(bad.begin, bad.size()).squaredNorm();
  CHECK(after < before);
  REQUIRE(!out.epochs.empty());
  for (const auto& e : out.epochs) CHECK(e.reference_epoch != e.epoch);
}

TEST_CASE("stream without intervals is unchanged") {
  Signal sig{brownian(700, 21).samples, 100.0};
  const auto out = correct_stream(sig, {});
  CHECK(out.signal.samples == sig.samples);
  CHECK(out.epochs.empty());
}

TEST_CASE("stream handles a trailing partial epoch") {
  Signal sig{brownian(1100, 22).samples, 128.0};
  Vector y = sig.samples;
  y.tail(100).array() += 8.0 * Eigen::ArrayXd::LinSpaced(100, -1.0, 1.0);
  const Interval iv{1000 / 128.0, 1100 / 128.0};
  const auto out = correct_stream(Signal{y, 128.0}, std::span<const Interval>(&iv, 1));
  CHECK(out.signal.size() == 1100);
  CHECK(out.signal.samples.head(1000) == y.head(1000));
  CHECK(out.signal.samples.allFinite());
}

TEST_CASE("stream needs a clean reference epoch") {
  Signal sig{brownian(512, 23).samples, 128.0};
  const Interval iv{0.0, 4.0};
  CHECK_THROWS_AS(correct_stream(sig, std::span<const Interval>(&iv, 1)), std::runtime_error);
}

TEST_CASE("interval validation") {
  const Interval overlap[] = {{1.0, 2.0}, {1.5, 3.0}};
  CHECK_THROWS_AS(validate_intervals(overlap, 10.0), std::invalid_argument);
  const Interval outside[] = {{9.0, 11.0}};
  CHECK_THROWS_AS(validate_intervals(outside, 10.0), std::invalid_argument);
  const Interval empty[] = {{2.0, 2.0}};
  CHECK_THROWS_AS(validate_intervals(empty, 10.0), std::invalid_argument);
  const Interval fine[] = {{3.0, 4.0}, {1.0, 2.0}};
  CHECK_NOTHROW(validate_intervals(fine, 10.0));
}

TEST_CASE("all-epoch processing covers every sample") {
  Signal sig{brownian(1000, 24).samples, 100.0};
  StreamOptions options;
  const auto out = process_all_epochs(sig, options, [](const Vector& a, const Vector&, CorrectionReport&) {
    return Vector(Vector::Zero(a.size()));
  });
  CHECK(out.signal.samples.cwiseAbs().maxCoeff() == 0.0);
}
