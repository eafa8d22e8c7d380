#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wqn/bench.hpp"
#include "wqn/metrics.hpp"
#include "wqn/normalization.hpp"
#include "wqn/simulate.hpp"
#include "wqn/spectral.hpp"
#include "wqn/stream.hpp"
#include "wqn/thresholding.hpp"
#include "wqn/wavelet.hpp"

using namespace wqn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Vector gaussian(Index n, double scale, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector x(n);
  for (auto& v : x) v = normal(gen);
  return x;
}

std::vector<WaveletSpec> all_wavelets() {
  std::vector<WaveletSpec> out;
  for (int n = 2; n <= 10; ++n) {
    out.push_back(WaveletSpec::daubechies(n));
    out.push_back(WaveletSpec::symlet(n));
  }
  return out;
}

Outcome perfect_reconstruction() {
  std::mt19937_64 gen(101);
  const auto wavelets = all_wavelets();
  std::uniform_int_distribution<Index> length(20, 4096);
  std::uniform_int_distribution<std::size_t> pick(0, wavelets.size() - 1);
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    const Index n = length(gen);
    const WaveletSpec& w = wavelets[pick(gen)];
    const BoundaryMode mode = done % 2 == 0 ? BoundaryMode::Symmetric : BoundaryMode::Periodic;
    const int max_levels = default_levels(n, w, mode, 12);
    if (max_levels < 1) continue;
    const int levels = std::uniform_int_distribution<int>(1, max_levels)(gen);
    const Vector x = gaussian(n, 1.0, gen);
    const Vector back = reconstruct(decompose(x, w, levels, mode));
    worst = std::max(worst, (back - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
    ++done;
  }
  return {worst <= 1e-10, "1000 signals, max relative error " + sci(worst) + " (limit 1e-10)"};
}

Outcome decreasing_invariant() {
  std::mt19937_64 gen(202);
  const auto wavelets = all_wavelets();
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  Index checked = 0, violations = 0;
  for (int pair = 0; pair < 10000; ++pair) {
    const WaveletSpec& w = wavelets[pair % wavelets.size()];
    const BoundaryMode mode = pair % 3 == 0 ? BoundaryMode::Periodic : BoundaryMode::Symmetric;
    const Index n = 256;
    Vector art = brownian(n, derive_seed(202, pair, 0)).samples * scale(gen);
    if (pair % 2 == 0) {
      ArtifactSpec spec{pair % 4 == 0 ? ArtifactShape::Square : ArtifactShape::Triangle, scale(gen),
                        std::uniform_real_distribution<double>(4.0, 128.0)(gen)};
      art += artifact_wave(spec, n, derive_seed(202, pair, 2)).samples;
    }
    const Vector ref = gaussian(n, scale(gen), gen);
    const int levels = default_levels(n, w, mode);
    const auto da = decompose(art, w, levels, mode);
    const auto fixed = normalize_decomposition(da, decompose(ref, w, levels, mode));
    for (int m = 1; m <= da.scales(); ++m) {
      for (Index i = 0; i < da.scale(m).size(); ++i) {
        ++checked;
        if (!(std::abs(fixed.scale(m)[i]) <= std::abs(da.scale(m)[i]))) ++violations;
      }
    }
  }
  return {violations == 0, "10000 epoch pairs, " + std::to_string(checked) + " coefficients, " +
                               std::to_string(violations) + " with increased amplitude"};
}

Outcome idempotence() {
  double worst = 0.0;
  for (int e = 0; e < 100; ++e) {
    const Index n = 256 + 16 * e;
    const Vector x = brownian(n, derive_seed(303, e)).samples;
    const auto w = WaveletSpec::symlet(5);
    const BoundaryMode mode = e % 2 ? BoundaryMode::Periodic : BoundaryMode::Symmetric;
    const auto fixed = correct_epoch(x, x, w, default_levels(n, w, mode), mode);
    worst = std::max(worst, (fixed.signal - x).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "100 epochs, max |correct(x, x) - x| = " + sci(worst) + " (limit 1e-10)"};
}

struct TableTarget {
  ArtifactShape shape;
  double soft, hard, sure, universal, wqn;
  double w_wqn;
  double h_wqn, h_universal;
};

struct TableScore {
  int within = 0;
  int total = 0;
  bool ordering = true;
  std::string lines;
};

TableScore score_table(const ExperimentResult& result, double amplitude) {
  const TableTarget targets[] = {
      {ArtifactShape::Square, 0.07, 0.09, 0.07, 1.41, 0.15, 0.26, 0.44, 0.57},
      {ArtifactShape::Triangle, 0.07, 0.09, 0.07, 1.19, 0.15, 0.26, 0.48, 0.69},
  };
  TableScore out;
  for (const auto& t : targets) {
    auto agg = [&](BenchMethod m) { return result.at(m, t.shape, amplitude); };
    std::ostringstream line;
    line << "      " << to_string(t.shape) << ":";
    auto check = [&](const std::string& name, double value, double target, double tol) {
      const bool ok = std::abs(value - target) <= tol;
      out.within += ok;
      ++out.total;
      line << " " << name << " " << fmt(value) << (ok ? "" : "!") << " (" << fmt(target, 2) << ")";
    };
    check("ST", agg(BenchMethod::SoftIdeal).mse.mean, t.soft, 0.03);
    check("HT", agg(BenchMethod::HardIdeal).mse.mean, t.hard, 0.03);
    check("SURE", agg(BenchMethod::SureShrink).mse.mean, t.sure, 0.03);
    check("univ", agg(BenchMethod::Universal).mse.mean, t.universal, 0.4);
    check("WQN", agg(BenchMethod::Wqn).mse.mean, t.wqn, 0.05);
    const double w_wqn = agg(BenchMethod::Wqn).wasserstein.mean;
    bool w_min = true;
    for (BenchMethod m : result.config.methods) {
      if (m != BenchMethod::Wqn && !(w_wqn < agg(m).wasserstein.mean)) w_min = false;
    }
    check("W(WQN)", w_wqn, t.w_wqn, 0.08);
    line << (w_min ? " [W min]" : " [W not min]");
    check("H(WQN)", agg(BenchMethod::Wqn).hurst.mean, t.h_wqn, 0.07);
    check("H(univ)", agg(BenchMethod::Universal).hurst.mean, t.h_universal, 0.08);

    const double st = agg(BenchMethod::SoftIdeal).mse.mean;
    const double ht = agg(BenchMethod::HardIdeal).mse.mean;
    const double sure = agg(BenchMethod::SureShrink).mse.mean;
    const double wqn = agg(BenchMethod::Wqn).mse.mean;
    const double uni = agg(BenchMethod::Universal).mse.mean;
    const bool order = st <= sure && sure < ht && ht < wqn && wqn < uni && w_min;
    out.ordering = out.ordering && order;
    line << (order ? " [order holds]" : " [order broken]") << "\n";
    out.lines += line.str();
  }
  return out;
}

Outcome table_reproduction() {
  ExperimentConfig config;
  config.shapes = {ArtifactShape::Square, ArtifactShape::Triangle};
  config.amplitudes = {2.0};
  config.realizations = 200;
  const auto result = run_experiment(config);
  const TableScore s = score_table(result, 2.0);

  // Oracle reference statistics, for information only.
  ExperimentConfig oracle = config;
  oracle.reference = ReferenceMode::Clean;
  oracle.methods = {BenchMethod::Wqn};
  const auto oracle_result = run_experiment(oracle);
  std::string info = "      with the clean epoch as reference (not the benchmark policy): WQN MSE";
  for (auto shape : config.shapes) {
    const auto& a = oracle_result.at(BenchMethod::Wqn, shape, 2.0);
    info += " " + to_string(shape) + " " + fmt(a.mse.mean) + ", W " + fmt(a.wasserstein.mean) +
            ", H " + fmt(a.hurst.mean) + ";";
  }

  const bool all_within = s.within == s.total;
  return {all_within || s.ordering,
          "200 realizations, N = " + std::to_string(config.epoch_length) + ", " +
              std::to_string(s.within) + "/" + std::to_string(s.total) +
              " values within tolerance, ordering " + (s.ordering ? "holds" : "broken") + "\n" +
              s.lines + info};
}

Outcome spectral_scaling() {
  ExperimentConfig config;
  config.shapes = {ArtifactShape::Square};
  config.realizations = 100;
  config.methods = {BenchMethod::SoftIdeal, BenchMethod::HardIdeal, BenchMethod::SureShrink,
                    BenchMethod::Wqn};
  const auto result = run_experiment(config);

  ExperimentConfig before = config;
  before.amplitudes = {0.0};
  before.methods = {BenchMethod::SoftIdeal};
  const auto clean = run_experiment(before).at(BenchMethod::SoftIdeal, ArtifactShape::Square, 0.0);

  auto agg = [&](BenchMethod m) { return result.at(m, ArtifactShape::Square, 2.0); };
  const auto& wqn = agg(BenchMethod::Wqn);
  const bool alpha_ok = std::abs(wqn.alpha.mean - 2.0) <= 0.3;
  const bool before_ok = std::abs(clean.hurst.mean - 0.5) <= 0.15;
  const bool after_ok = wqn.hurst.mean >= 0.35 && wqn.hurst.mean <= 0.55;
  bool r2_ok = true;
  std::string margins;
  for (BenchMethod m : {BenchMethod::SoftIdeal, BenchMethod::HardIdeal, BenchMethod::SureShrink}) {
    const double margin = wqn.r_squared.mean - agg(m).r_squared.mean;
    r2_ok = r2_ok && margin > 0.0;
    margins += " " + to_string(m) + " R2 " + fmt(agg(m).r_squared.mean) + " (margin " + fmt(margin) + ")";
  }
  return {alpha_ok && before_ok && after_ok && r2_ok,
          "100 realizations: clean H " + fmt(clean.hurst.mean) + ", WQN alpha " + fmt(wqn.alpha.mean) +
              ", WQN H " + fmt(wqn.hurst.mean) + ", WQN R2 " + fmt(wqn.r_squared.mean) + ";" + margins};
}

struct HistogramTally {
  double hard_zero_ratio = 0.0;
  double soft_peak_ratio = 0.0;
  int wqn_outside = 0;
  double wqn_worst = 0.0;
  Index coefficients = 0;
};

// Pooled level-5 histograms over fixed realizations. Threshold bins are laid
// out per realization with width theta / 4 centred on 0 and on +-theta; the
// WQN comparison uses one absolute grid over the pooled clean coefficients.
HistogramTally histogram_tally(ArtifactShape shape) {
  const Index n = 4096;
  const int level = 5, levels = 7, k = 4, realizations = 20, span = 64;
  const auto w = WaveletSpec::symlet(5);
  const BoundaryMode mode = BoundaryMode::Periodic;
  Vector clean_hist = Vector::Zero(2 * span + 1), hard_hist = clean_hist, soft_hist = clean_hist;
  std::vector<Vector> clean_coefs, wqn_coefs;
  for (int r = 0; r < realizations; ++r) {
    const Vector walk = random_walk(2 * n, derive_seed(606, r, 0));
    const double sd = standard_deviation(walk.head(n));
    const Vector clean = walk.head(n) / sd;
    const Vector reference = walk.tail(n) / sd;
    const ArtifactSpec spec{shape, 2.0, 256.0};
    const Vector y = clean + artifact_wave(spec, n, derive_seed(606, r, 2)).samples;
    const auto cx = decompose(clean, w, levels, mode);
    const auto cy = decompose(y, w, levels, mode);
    const auto hard = apply_thresholds(cy, ideal_thresholds(cy, OracleContext{cx}, ThresholdMethod::Hard));
    const auto soft_spec = ideal_thresholds(cy, OracleContext{cx}, ThresholdMethod::Soft);
    const auto soft = apply_thresholds(cy, soft_spec);
    const double theta = soft_spec.per_scale[level - 1];
    if (!(theta > 0.0) || !std::isfinite(theta)) throw std::runtime_error("degenerate soft threshold");
    Vector edges(2 * span + 2);
    for (Index j = 0; j < edges.size(); ++j) edges[j] = (static_cast<double>(j - span) - 0.5) * theta / k;
    clean_hist += histogram(cx.scale(level), edges).counts;
    hard_hist += histogram(hard.scale(level), edges).counts;
    soft_hist += histogram(soft.scale(level), edges).counts;
    clean_coefs.push_back(cx.scale(level));
    wqn_coefs.push_back(normalize_decomposition(cy, decompose(reference, w, levels, mode)).scale(level));
  }

  HistogramTally t;
  const Index zero = span;
  t.hard_zero_ratio = hard_hist[zero] / std::max(1.0, clean_hist[zero]);
  t.soft_peak_ratio = std::numeric_limits<double>::infinity();
  for (Index centre : {zero + k, zero - k}) {
    const double neighbour = std::max(soft_hist[centre - 1], soft_hist[centre + 1]);
    t.soft_peak_ratio = std::min(t.soft_peak_ratio, soft_hist[centre] / std::max(1.0, neighbour));
  }

  Index total = 0;
  for (const auto& c : clean_coefs) total += c.size();
  Vector pooled_clean(total), pooled_wqn(total);
  Index at = 0;
  for (std::size_t r = 0; r < clean_coefs.size(); ++r) {
    pooled_clean.segment(at, clean_coefs[r].size()) = clean_coefs[r];
    pooled_wqn.segment(at, wqn_coefs[r].size()) = wqn_coefs[r];
    at += clean_coefs[r].size();
  }
  const Histogram hx = histogram(pooled_clean, 40);
  const Histogram hw = histogram(pooled_wqn, hx.edges);
  for (Index b = 0; b < hx.bins(); ++b) {
    const double p = (hx.counts[b] + hw.counts[b]) / (2.0 * total);
    const double band = 2.5758 * std::sqrt(2.0 * total * p * (1.0 - p));
    const double diff = std::abs(hw.counts[b] - hx.counts[b]);
    if (diff > band) ++t.wqn_outside;
    if (band > 0.0) t.wqn_worst = std::max(t.wqn_worst, diff / band);
  }
  // Restored values beyond the clean range deviate as well.
  const double beyond = static_cast<double>(hw.total - static_cast<Index>(hw.counts.sum()));
  if (beyond > 2.5758 * std::sqrt(beyond + 1.0)) ++t.wqn_outside;
  t.coefficients = total;
  return t;
}

Outcome histogram_signatures() {
  bool ok = true;
  std::string detail = "level 5, 20 realizations:";
  for (auto shape : {ArtifactShape::Square, ArtifactShape::Triangle}) {
    const HistogramTally t = histogram_tally(shape);
    ok = ok && t.hard_zero_ratio >= 5.0 && t.soft_peak_ratio >= 2.0 && t.wqn_outside == 0;
    detail += " " + to_string(shape) + " (" + std::to_string(t.coefficients) + " coefficients): hard zero-bin ratio " +
              fmt(t.hard_zero_ratio, 1) + ", soft +-theta peak ratio " + fmt(t.soft_peak_ratio, 1) +
              ", WQN bins outside 99% band " + std::to_string(t.wqn_outside) + " (largest " + fmt(t.wqn_worst, 2) +
              " of band);";
  }
  detail.pop_back();
  return {ok, detail + "; limits 5, 2, 0"};
}

Outcome ggd_recovery() {
  bool ok = true;
  std::string detail = "1e5 draws:";
  for (double beta : {1.0, 1.5, 2.0, 3.0}) {
    const Vector s = sample_generalized_gaussian(100000, 1.0, beta, derive_seed(707, static_cast<int>(beta * 10)));
    const GGDFit fit = fit_generalized_gaussian(s);
    const bool good = std::abs(fit.beta - beta) <= 0.05;
    ok = ok && good;
    detail += " beta " + fmt(beta, 1) + " -> " + fmt(fit.beta) + (good ? "" : "!");
  }
  return {ok, detail};
}

Outcome sure_validity() {
  std::mt19937_64 gen(808);
  const Index n = 256;
  const double sigma = 1.0;
  Vector a = Vector::Zero(n);
  for (Index i = 0; i < n; i += 6) a[i] = (i % 12 == 0 ? 5.0 : -3.0);
  const int reps = 10000;
  const int points = 10;
  std::vector<double> thetas;
  for (int t = 0; t < points; ++t) thetas.push_back(0.3 + 0.35 * t);
  std::vector<double> sum(points, 0.0), sum_sq(points, 0.0), risk_sum(points, 0.0);
  for (int r = 0; r < reps; ++r) {
    const Vector g = gaussian(n, sigma, gen);
    const Vector w = g + a;
    for (int t = 0; t < points; ++t) {
      double loss = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double e = apply_soft(w[i], thetas[t]) - g[i];
        loss += e * e;
      }
      const double d = sure_risk(w, sigma, thetas[t]) - loss;
      sum[t] += d;
      sum_sq[t] += d * d;
      risk_sum[t] += loss;
    }
  }
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const double mean = sum[t] / reps;
    const double se = std::sqrt((sum_sq[t] / reps - mean * mean) / reps);
    worst = std::max(worst, std::abs(mean) / se);
  }
  return {worst <= 3.0, "10 thresholds, 10000 replications, largest |SURE - risk| = " + fmt(worst, 2) +
                            " standard errors"};
}

// Minimum over a uniform grid, refined by repeated zooming around the best
// grid points; no knowledge of where the objective breaks.
double brute_force_minimum(const Vector& y, const Vector& x, ThresholdMethod method) {
  const double top = y.cwiseAbs().maxCoeff() * 1.05 + 0.1;
  const int grid = 100000;
  std::vector<std::pair<double, double>> scored;
  for (int i = 0; i <= grid; ++i) {
    const double t = top * i / grid;
    scored.emplace_back(threshold_objective(y, x, t, method), t);
  }
  std::partial_sort(scored.begin(), scored.begin() + 16, scored.end());
  double best = scored.front().first;
  for (int c = 0; c < 16; ++c) {
    double centre = scored[c].second, step = top / grid;
    for (int round = 0; round < 10; ++round) {
      double local = std::numeric_limits<double>::infinity(), arg = centre;
      for (int i = -100; i <= 100; ++i) {
        const double t = std::max(0.0, centre + step * i / 100.0);
        const double v = threshold_objective(y, x, t, method);
        if (v < local) {
          local = v;
          arg = t;
        }
      }
      best = std::min(best, local);
      centre = arg;
      step /= 50.0;
    }
  }
  return best;
}

Outcome ideal_optimality() {
  std::mt19937_64 gen(909);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const Index n = 8;
    const Vector x = gaussian(n, 1.0, gen);
    Vector y = x + gaussian(n, 2.0, gen);
    if (inst % 3 == 0) y[0] = x[0];
    for (auto method : {ThresholdMethod::Hard, ThresholdMethod::Soft}) {
      const auto best = ideal_threshold(y, x, method);
      worst = std::max(worst, std::abs(brute_force_minimum(y, x, method) - best.objective));
    }
  }
  return {worst <= 1e-9, "100 instances, hard and soft, largest objective gap " + sci(worst) + " (limit 1e-9)"};
}

Outcome spectrogram_restoration() {
  const double fs = 256.0;
  const Index n = static_cast<Index>(fs * 120);
  Vector clean = colored_noise(n, 1.0, derive_seed(1010, 0), fs).samples;
  for (Index i = 0; i < n; ++i) clean[i] += std::sqrt(2.0) * std::sin(2.0 * M_PI * 10.0 * i / fs);
  const std::vector<Interval> intervals{{20.3, 24.1}, {55.0, 58.0}, {90.5, 93.7}};
  Vector y = clean;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const Index begin = static_cast<Index>(std::ceil(intervals[k].start * fs));
    const Index end = static_cast<Index>(std::ceil(intervals[k].end * fs));
    ArtifactSpec spec{ArtifactShape::Square, 6.0, fs * (0.4 + 0.3 * k)};
    spec.support = std::pair<Index, Index>{begin, end};
    y += artifact_wave(spec, n, derive_seed(1010, k, 2)).samples;
  }
  const auto restored = correct_stream(Signal{y, fs}, intervals);

  const auto sx = spectrogram(Signal{clean, fs});
  const auto sy = spectrogram(Signal{y, fs});
  const auto sr = spectrogram(restored.signal);
  const Vector bx = band_power(sx, 0.5, fs / 2), by = band_power(sy, 0.5, fs / 2), br = band_power(sr, 0.5, fs / 2);
  const Vector tx = band_power(sx, 9.0, 11.0), ty = band_power(sy, 9.0, 11.0), tr = band_power(sr, 9.0, 11.0);

  double excess_before = 0.0, excess_after = 0.0, tone_change = 0.0;
  int artifact_frames = 0, clean_frames = 0;
  for (Index t = 0; t < sx.times.size(); ++t) {
    const double lo = sx.times[t] - sx.window_seconds / 2, hi = sx.times[t] + sx.window_seconds / 2;
    bool hit = false;
    for (const auto& iv : intervals) hit = hit || (iv.start < hi && iv.end > lo);
    if (hit) {
      excess_before += by[t] - bx[t];
      excess_after += std::max(0.0, br[t] - bx[t]);
      ++artifact_frames;
    } else {
      tone_change = std::max(tone_change, std::abs(tr[t] / ty[t] - 1.0));
      ++clean_frames;
    }
  }
  const double ratio = excess_after / excess_before;
  return {ratio <= 0.25 && tone_change < 0.05,
          std::to_string(artifact_frames) + " artifact frames: broadband excess after/before " + fmt(ratio) +
              " (<= 0.25); " + std::to_string(clean_frames) + " clean frames: max tone-band change " +
              fmt(100.0 * tone_change, 2) + "% (< 5%)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected_failures;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--expect-fail" && i + 1 < argc) expected_failures.insert(std::atoi(argv[++i]));
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"perfect reconstruction", perfect_reconstruction},
      {"coefficient amplitudes never increase", decreasing_invariant},
      {"WQN idempotence", idempotence},
      {"Brownian restoration table", table_reproduction},
      {"spectral scaling after restoration", spectral_scaling},
      {"histogram signatures", histogram_signatures},
      {"generalized Gaussian recovery", ggd_recovery},
      {"SURE validity", sure_validity},
      {"ideal threshold optimality", ideal_optimality},
      {"spectrogram restoration", spectrogram_restoration},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expected = expected_failures.count(id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << " [" << fmt(secs, 1)
              << " s]" << (!o.pass && expected ? " (known failure)" : "") << ": " << o.detail << std::endl;
    if (o.pass == expected) ++unexpected;
  }
  if (unexpected > 0) std::cout << unexpected << " criteria did not match the expected outcome" << std::endl;
  return unexpected > 0 ? 1 : 0;
}
