#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wqn/bench.hpp"
#include "wqn/cli.hpp"
#include "wqn/io.hpp"
#include "wqn/metrics.hpp"
#include "wqn/normalization.hpp"
#include "wqn/simulate.hpp"
#include "wqn/spectral.hpp"
#include "wqn/stream.hpp"
#include "wqn/thresholding.hpp"

namespace wqn {

using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string input;
  std::string output;
  double sampling_rate = 256.0;
  bool normalize = false;
};

struct DenoiseOptions {
  std::string intervals;
  std::string method = "wqn";
  std::string wavelet = "sym5";
  int levels = 0;
  std::string boundary = "symmetric";
  double epoch_seconds = 2.0;
  double threshold = std::numeric_limits<double>::infinity();
};

struct BenchOptions {
  std::string config;
  std::string output;
  std::optional<Seed> seed;
  std::optional<Index> realizations;
  std::optional<int> threads;
};

std::vector<Signal> read_input(const CommonOptions& o) {
  return load_epochs(o.input, o.sampling_rate, o.normalize);
}

int resolve_levels(int requested, Index n, const WaveletSpec& w, BoundaryMode mode) {
  if (requested < 0) throw UsageError("--levels must be >= 0");
  if (requested > 0) return requested;
  const int levels = default_levels(n, w, mode);
  if (levels == 0) {
    throw UsageError(std::to_string(n) + " samples are too few for " + w.name());
  }
  return levels;
}

double interval_variance(const Vector& x, const SampleRange& r) {
  const auto seg = x.segment(r.begin, r.size());
  return (seg.array() - seg.mean()).square().mean();
}

EpochCorrector threshold_corrector(const DenoiseOptions& o, const WaveletSpec& w, int levels,
                                   BoundaryMode mode, Index epoch) {
  return [&o, w, levels, mode, epoch](const Vector& art, const Vector& ref, CorrectionReport&) {
    const auto cy = decompose(art, w, levels, mode);
    const int approx = cy.scales();
    if (o.method == "lowpass") return reconstruct(lowpass_baseline(cy));
    ThresholdSpec spec;
    if (o.method == "hard" || o.method == "soft") {
      spec.method = o.method == "hard" ? ThresholdMethod::Hard : ThresholdMethod::Soft;
      spec.per_scale = Vector::Constant(cy.scales(), o.threshold);
    } else {
      const Vector sigma = coefficient_mad_sigma(decompose(ref, w, levels, mode));
      if (o.method == "universal") {
        spec = universal_thresholds(sigma, epoch);
      } else {
        spec = sure_thresholds(cy, sigma.cwiseMax(std::numeric_limits<double>::min()));
        spec.per_scale[approx - 1] = pass_through_threshold(cy.scale(approx));
      }
    }
    return reconstruct(apply_thresholds(cy, spec));
  };
}

int run_denoise(const CommonOptions& common, const DenoiseOptions& o, std::ostream& out) {
  static const std::vector<std::string> methods{"wqn", "lowpass", "universal", "sureshrink", "hard", "soft"};
  if (o.method == "hard-ideal" || o.method == "soft-ideal") {
    throw UsageError("--method " + o.method +
                     " needs the clean signal and is only available in the bench subcommand");
  }
  if (std::find(methods.begin(), methods.end(), o.method) == methods.end()) {
    throw UsageError("--method: unknown method '" + o.method + "'");
  }
  const bool explicit_threshold = !std::isinf(o.threshold);
  if (explicit_threshold && o.method != "hard" && o.method != "soft") {
    throw UsageError("--threshold only applies to --method hard or soft");
  }
  if (!(o.threshold >= 0.0)) throw UsageError("--threshold must be >= 0");
  if (o.method == "wqn" && o.intervals.empty()) {
    throw UsageError("--method wqn requires --intervals (artifact intervals are not detected)");
  }
  if (common.output.empty()) throw UsageError("--output is required");
  if (!(o.epoch_seconds > 0.0)) throw UsageError("--epoch-seconds must be positive");

  StreamOptions options;
  options.epoch_seconds = o.epoch_seconds;
  options.wavelet = WaveletSpec::from_name(o.wavelet);
  options.boundary = boundary_from_string(o.boundary);
  const Index epoch = static_cast<Index>(std::llround(o.epoch_seconds * common.sampling_rate));
  options.levels = resolve_levels(o.levels, epoch, options.wavelet, options.boundary);
  detail::check_decompose_args(epoch, options.wavelet, options.levels, options.boundary);

  std::vector<Interval> intervals;
  if (!o.intervals.empty()) intervals = read_intervals(o.intervals);
  const auto channels = read_input(common);
  for (const auto& c : channels) validate_intervals(intervals, c.duration());

  json sidecar = {{"input", common.input},
                  {"output", common.output},
                  {"method", o.method},
                  {"wavelet", options.wavelet.name()},
                  {"levels", options.levels},
                  {"boundary", std::string(to_string(options.boundary))},
                  {"epoch_seconds", o.epoch_seconds},
                  {"sampling_rate", common.sampling_rate},
                  {"channels", json::array()}};
  if (o.method == "hard" || o.method == "soft") sidecar["threshold"] = format_number(o.threshold);

  std::vector<Vector> corrected;
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const Signal& signal = channels[ch];
    StreamCorrection result;
    if (o.method == "wqn") {
      result = correct_stream(signal, intervals, options);
    } else {
      const auto corrector = threshold_corrector(o, options.wavelet, options.levels, options.boundary, epoch);
      result = intervals.empty() && !o.intervals.empty()
                   ? StreamCorrection{signal, {}}
                   : (intervals.empty() ? process_all_epochs(signal, options, corrector)
                                        : process_stream(signal, intervals, options, corrector));
    }
    json epochs = json::array();
    for (const auto& e : result.epochs) epochs.push_back(to_json(e, signal.sampling_rate));
    json spans = json::array();
    for (const auto& iv : intervals) {
      SampleRange r{static_cast<Index>(std::ceil(iv.start * signal.sampling_rate - 1e-9)),
                    static_cast<Index>(std::ceil(iv.end * signal.sampling_rate - 1e-9))};
      r.end = std::min(r.end, signal.size());
      if (r.size() < 1) continue;
      const double before = interval_variance(signal.samples, r);
      const double after = interval_variance(result.signal.samples, r);
      spans.push_back({{"start", iv.start},
                       {"end", iv.end},
                       {"variance_before", before},
                       {"variance_after", after},
                       {"attenuation", before > 0.0 ? after / before : 1.0}});
    }
    sidecar["channels"].push_back({{"channel", ch}, {"intervals", spans}, {"epochs", epochs}});
    corrected.push_back(result.signal.samples);
  }
  write_columns(common.output, corrected);
  write_text_file(common.output + ".json", sidecar.dump(2) + "\n");
  out << "wrote " << common.output << " (" << corrected.size() << " channel"
      << (corrected.size() == 1 ? "" : "s") << ", " << corrected.front().size() << " samples)\n";
  return 0;
}

ExperimentConfig bench_config(const BenchOptions& o) {
  ExperimentConfig config = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (o.realizations) config.realizations = *o.realizations;
  if (o.threads) config.threads = *o.threads;
  if (!o.output.empty()) {
    config.records_path = o.output + ".csv";
    config.summary_path = o.output + ".json";
  }
  config.validate();
  return config;
}

int run_bench(const BenchOptions& o, bool sweep, std::ostream& out) {
  ExperimentConfig config = bench_config(o);
  if (sweep && config.amplitudes.size() < 2) config.amplitudes = {0.5, 1.0, 2.0, 4.0, 8.0};
  const ExperimentResult result = sweep ? amplitude_sweep(config) : run_experiment(config);
  write_outputs(result);
  if (sweep) {
    print_sweep(out, result);
  } else {
    print_table(out, result);
  }
  return 0;
}

int run_fit_ggd(const CommonOptions& common, const std::string& wavelet_name, int levels_flag,
                const std::string& boundary, std::ostream& out) {
  const WaveletSpec w = WaveletSpec::from_name(wavelet_name);
  const BoundaryMode mode = boundary_from_string(boundary);
  json report = json::array();
  const auto channels = read_input(common);
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const Signal& s = channels[ch];
    const int levels = resolve_levels(levels_flag, s.size(), w, mode);
    const auto dec = decompose(s.samples, w, levels, mode);
    json fits = json::array();
    for (int m = 1; m <= dec.scales(); ++m) {
      GGDFit fit;
      try {
        fit = fit_generalized_gaussian(dec.scale(m));
      } catch (const std::exception& e) {
        throw std::runtime_error("channel " + std::to_string(ch) + ", level " + std::to_string(m) +
                                 ": " + e.what());
      }
      json j = to_json(fit);
      j["level"] = m;
      j["kind"] = m == dec.scales() ? "approximation" : "detail";
      j["coefficients"] = dec.scale(m).size();
      fits.push_back(j);
    }
    report.push_back({{"channel", ch}, {"wavelet", w.name()}, {"levels", fits}});
  }
  const std::string text = report.dump(2) + "\n";
  if (!common.output.empty()) write_text_file(common.output, text);
  out << text;
  return 0;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run_psd(const CommonOptions& common, Index segment, std::ostream& out) {
  const auto channels = read_input(common);
  json report = json::array();
  std::ostringstream csv;
  json estimates = json::array();
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const PSDEstimate e = psd(channels[ch], {segment, 0.5});
    json entry = {{"channel", ch},
                  {"segment_length", e.segment_length},
                  {"overlap_samples", e.overlap_samples},
                  {"segments", e.segments},
                  {"window", e.window}};
    try {
      entry["fit"] = to_json(hurst_from_psd(e));
    } catch (const std::invalid_argument& ex) {
      entry["fit"] = nullptr;
      entry["fit_error"] = ex.what();
    }
    report.push_back(entry);
    if (ch == 0) write_csv(csv, e);
    estimates.push_back(to_json(e));
  }
  if (!common.output.empty()) {
    write_text_file(common.output, ends_with(common.output, ".json") ? estimates.dump(2) + "\n" : csv.str());
  } else if (channels.size() == 1) {
    out << csv.str();
    return 0;
  }
  out << report.dump(2) << "\n";
  return 0;
}

int run_spectrogram(const CommonOptions& common, double window_seconds, double overlap, bool db,
                    std::ostream& out) {
  const auto channels = read_input(common);
  const SpectrogramEstimate e = spectrogram(channels.front(), window_seconds, overlap);
  std::string text;
  if (ends_with(common.output, ".json")) {
    text = to_json(e, db).dump() + "\n";
  } else {
    std::ostringstream s;
    write_csv(s, e, db);
    text = s.str();
  }
  if (common.output.empty()) {
    out << text;
  } else {
    write_text_file(common.output, text);
    out << "wrote " << common.output << " (" << e.times.size() << " frames, "
        << e.frequencies.size() << " frequencies)\n";
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool output_required = false) {
  cmd->add_option("input,--input", o.input, "Plain-text signal file, one channel per column")
      ->required()
      ->check(CLI::ExistingFile);
  auto* opt = cmd->add_option("--output,-o", o.output, "Output path");
  if (output_required) opt->required();
  cmd->add_option("--sampling-rate", o.sampling_rate, "Sampling rate in Hz")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--normalize", o.normalize, "Rescale every channel to unit standard deviation");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet quantile normalization and thresholding baselines", "wqn"};
  app.require_subcommand(1);

  CommonOptions denoise_io;
  DenoiseOptions denoise;
  auto* cmd_denoise = app.add_subcommand("denoise", "Correct annotated artifact intervals");
  add_common(cmd_denoise, denoise_io, true);
  cmd_denoise->add_option("--intervals", denoise.intervals, "File of 'start end' lines in seconds")
      ->check(CLI::ExistingFile);
  cmd_denoise->add_option("--method", denoise.method,
                          "wqn, lowpass, universal, sureshrink, hard or soft")
      ->capture_default_str();
  cmd_denoise->add_option("--wavelet", denoise.wavelet, "db2..db10 or sym2..sym10")->capture_default_str();
  cmd_denoise->add_option("--levels", denoise.levels, "Decomposition levels, 0 for automatic")
      ->capture_default_str();
  cmd_denoise->add_option("--boundary", denoise.boundary, "symmetric or periodic")->capture_default_str();
  cmd_denoise->add_option("--epoch-seconds", denoise.epoch_seconds, "Epoch length")->capture_default_str();
  cmd_denoise->add_option("--threshold", denoise.threshold, "Threshold for --method hard or soft");

  BenchOptions bench;
  auto* cmd_bench = app.add_subcommand("bench", "Monte Carlo comparison of the restoration methods");
  auto* cmd_sweep = app.add_subcommand("sweep", "Artifact amplitude sweep");
  for (auto* cmd : {cmd_bench, cmd_sweep}) {
    cmd->add_option("--config", bench.config, "Flat key = value configuration file");
    cmd->add_option("--output,-o", bench.output, "Prefix for <prefix>.csv and <prefix>.json");
    cmd->add_option("--seed", bench.seed, "Base seed");
    cmd->add_option("--realizations", bench.realizations, "Realizations per case");
    cmd->add_option("--threads", bench.threads, "Worker threads, 0 for all cores");
  }

  CommonOptions fit_io;
  std::string fit_wavelet = "sym5";
  int fit_levels = 0;
  std::string fit_boundary = "symmetric";
  auto* cmd_fit = app.add_subcommand("fit-ggd", "Generalized Gaussian fit of each wavelet scale");
  add_common(cmd_fit, fit_io);
  cmd_fit->add_option("--wavelet", fit_wavelet)->capture_default_str();
  cmd_fit->add_option("--levels", fit_levels, "0 for automatic")->capture_default_str();
  cmd_fit->add_option("--boundary", fit_boundary)->capture_default_str();

  CommonOptions spec_io;
  double window_seconds = 4.0;
  double overlap = 0.9;
  bool decibels = false;
  auto* cmd_spec = app.add_subcommand("spectrogram", "Short-time power spectrum of the first channel");
  add_common(cmd_spec, spec_io);
  cmd_spec->add_option("--window-seconds", window_seconds)->capture_default_str();
  cmd_spec->add_option("--overlap", overlap, "Fraction in [0, 1)")->capture_default_str();
  cmd_spec->add_flag("--db", decibels, "Emit 10 log10(power)");

  CommonOptions psd_io;
  Index segment = 0;
  auto* cmd_psd = app.add_subcommand("psd", "Welch power spectrum and power-law fit");
  add_common(cmd_psd, psd_io);
  cmd_psd->add_option("--segment", segment, "Segment length in samples, 0 for automatic")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    err << "error: " << what << "\n";
    return 2;
  }

  try {
    if (*cmd_denoise) return run_denoise(denoise_io, denoise, out);
    if (*cmd_bench) return run_bench(bench, false, out);
    if (*cmd_sweep) return run_bench(bench, true, out);
    if (*cmd_fit) return run_fit_ggd(fit_io, fit_wavelet, fit_levels, fit_boundary, out);
    if (*cmd_spec) return run_spectrogram(spec_io, window_seconds, overlap, decibels, out);
    if (*cmd_psd) return run_psd(psd_io, segment, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace wqn
