#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wqn/stream.hpp"

namespace wqn {

namespace {

constexpr double kTimeSlack = 1e-9;

Index to_sample(double seconds, double rate) {
  return static_cast<Index>(std::ceil(seconds * rate - kTimeSlack));
}

std::vector<SampleRange> masked_runs(const std::vector<char>& mask, Index begin, Index end) {
  std::vector<SampleRange> runs;
  Index i = begin;
  while (i < end) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    Index j = i;
    while (j < end && mask[j]) ++j;
    runs.push_back({i, j});
    i = j;
  }
  return runs;
}

}  // namespace

void validate_intervals(std::span<const Interval> intervals, double duration) {
  std::vector<Interval> sorted(intervals.begin(), intervals.end());
  for (const auto& iv : sorted) {
    if (!std::isfinite(iv.start) || !std::isfinite(iv.end)) {
      throw std::invalid_argument("interval bounds must be finite");
    }
    if (!(iv.end > iv.start)) {
      throw std::invalid_argument("degenerate interval [" + std::to_string(iv.start) + ", " +
                                  std::to_string(iv.end) + ")");
    }
    if (iv.start < -kTimeSlack || iv.end > duration + kTimeSlack) {
      throw std::invalid_argument("interval [" + std::to_string(iv.start) + ", " +
                                  std::to_string(iv.end) + ") is outside the signal (0, " +
                                  std::to_string(duration) + " s)");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) {
      throw std::invalid_argument("overlapping intervals at " + std::to_string(sorted[i].start) +
                                  " s");
    }
  }
}

StreamCorrection process_stream(const Signal& signal, std::span<const Interval> intervals,
                                const StreamOptions& options, const EpochCorrector& corrector) {
  validate(signal);
  validate_intervals(intervals, signal.duration());
  StreamCorrection result{signal, {}};
  if (intervals.empty()) return result;

  const Index n = signal.size();
  const double rate = signal.sampling_rate;
  const Index epoch = static_cast<Index>(std::llround(options.epoch_seconds * rate));
  if (epoch < options.wavelet.filter_length()) {
    throw std::invalid_argument("epoch of " + std::to_string(epoch) +
                                " samples is shorter than the wavelet filter");
  }
  if (n < epoch) throw std::invalid_argument("signal is shorter than one epoch");

  std::vector<char> mask(n, 0);
  for (const auto& iv : intervals) {
    const Index b = std::clamp<Index>(to_sample(iv.start, rate), 0, n);
    const Index e = std::clamp<Index>(to_sample(iv.end, rate), 0, n);
    std::fill(mask.begin() + b, mask.begin() + e, 1);
  }

  const Index count = (n + epoch - 1) / epoch;
  auto nominal = [&](Index k) { return SampleRange{k * epoch, std::min(n, (k + 1) * epoch)}; };
  auto window = [&](Index k) {
    SampleRange r = nominal(k);
    if (r.size() < epoch) r.begin = n - epoch;
    return r;
  };
  std::vector<char> clean(count, 0);
  for (Index k = 0; k < count; ++k) {
    const SampleRange w = window(k);
    clean[k] = std::none_of(mask.begin() + w.begin, mask.begin() + w.end, [](char c) { return c; });
  }

  Vector corrected = signal.samples;
  for (Index k = 0; k < count; ++k) {
    const SampleRange own = nominal(k);
    if (std::none_of(mask.begin() + own.begin, mask.begin() + own.end, [](char c) { return c; })) {
      continue;
    }
    Index ref = -1;
    for (Index j = k - 1; j >= 0 && ref < 0; --j) {
      if (clean[j]) ref = j;
    }
    for (Index j = k + 1; j < count && ref < 0; ++j) {
      if (clean[j]) ref = j;
    }
    if (ref < 0) {
      throw std::runtime_error("no clean reference epoch available for epoch " +
                               std::to_string(k) + " (starting at " +
                               std::to_string(static_cast<double>(own.begin) / rate) + " s)");
    }
    EpochRecord record;
    record.epoch = k;
    record.window = window(k);
    record.reference_epoch = ref;
    record.reference_window = window(ref);
    record.replaced = masked_runs(mask, own.begin, own.end);
    const Vector art = signal.samples.segment(record.window.begin, record.window.size());
    const Vector refseg =
        signal.samples.segment(record.reference_window.begin, record.reference_window.size());
    const Vector fixed = corrector(art, refseg, record.report);
    if (fixed.size() != art.size()) {
      throw std::logic_error("epoch corrector changed the epoch length");
    }
    for (const auto& run : record.replaced) {
      corrected.segment(run.begin, run.size()) =
          fixed.segment(run.begin - record.window.begin, run.size());
    }
    result.epochs.push_back(std::move(record));
  }

  const Index fade = static_cast<Index>(std::llround(options.crossfade_fraction * epoch));
  Vector& out = result.signal.samples;
  for (const auto& run : masked_runs(mask, 0, n)) {
    const Index ramp = std::min(fade, run.size() / 2);
    for (Index i = run.begin; i < run.end; ++i) {
      const Index from_start = run.begin == 0 ? ramp : i - run.begin;
      const Index from_end = run.end == n ? ramp : run.end - 1 - i;
      const Index d = std::min(from_start, from_end);
      double w = 1.0;
      if (d < ramp) {
        w = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(d + 1) /
                                  static_cast<double>(ramp + 1)));
      }
      out[i] = w * corrected[i] + (1.0 - w) * signal.samples[i];
    }
  }
  return result;
}

StreamCorrection process_all_epochs(const Signal& signal, const StreamOptions& options,
                                    const EpochCorrector& corrector) {
  validate(signal);
  const Index n = signal.size();
  const Index epoch = static_cast<Index>(std::llround(options.epoch_seconds * signal.sampling_rate));
  if (epoch < options.wavelet.filter_length()) {
    throw std::invalid_argument("epoch of " + std::to_string(epoch) +
                                " samples is shorter than the wavelet filter");
  }
  if (n < epoch) throw std::invalid_argument("signal is shorter than one epoch");
  StreamCorrection result{signal, {}};
  const Index count = (n + epoch - 1) / epoch;
  for (Index k = 0; k < count; ++k) {
    EpochRecord record;
    record.epoch = k;
    const SampleRange own{k * epoch, std::min(n, (k + 1) * epoch)};
    record.window = own;
    if (own.size() < epoch) record.window.begin = n - epoch;
    record.reference_epoch = k;
    record.reference_window = record.window;
    record.replaced = {own};
    const Vector art = signal.samples.segment(record.window.begin, epoch);
    const Vector fixed = corrector(art, art, record.report);
    if (fixed.size() != epoch) throw std::logic_error("epoch corrector changed the epoch length");
    result.signal.samples.segment(own.begin, own.size()) =
        fixed.segment(own.begin - record.window.begin, own.size());
    result.epochs.push_back(std::move(record));
  }
  return result;
}

StreamCorrection correct_stream(const Signal& signal, std::span<const Interval> intervals,
                                const StreamOptions& options) {
  const Index epoch = static_cast<Index>(std::llround(options.epoch_seconds * signal.sampling_rate));
  int levels = options.levels;
  if (levels == 0) {
    levels = default_levels(epoch, options.wavelet, options.boundary);
    if (levels == 0) throw std::invalid_argument("epoch too short for a wavelet decomposition");
  }
  auto corrector = [&](const Vector& art, const Vector& ref, CorrectionReport& report) {
    auto corrected = correct_epoch(art, ref, options.wavelet, levels, options.boundary);
    report = std::move(corrected.report);
    return std::move(corrected.signal);
  };
  return process_stream(signal, intervals, options, corrector);
}

}  // namespace wqn
