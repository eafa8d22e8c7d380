#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wqn/normalization.hpp"
#include "wqn/signal.hpp"
#include "wqn/wavelet.hpp"

namespace wqn {

/// Artifact interval in seconds, start inclusive, end exclusive.
struct Interval {
  double start = 0.0;
  double end = 0.0;
};

struct StreamOptions {
  double epoch_seconds = 2.0;
  WaveletSpec wavelet = WaveletSpec::symlet(5);
  /// 0 selects default_levels() for the epoch length.
  int levels = 0;
  BoundaryMode boundary = BoundaryMode::Symmetric;
  /// Raised-cosine ramp length at interval edges, as a fraction of the epoch.
  double crossfade_fraction = 1.0 / 16.0;
};

/// Sample half-open range [begin, end).
struct SampleRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
};

struct EpochRecord {
  Index epoch = 0;
  SampleRange window;
  Index reference_epoch = 0;
  SampleRange reference_window;
  /// Samples of this epoch that lie inside artifact intervals.
  std::vector<SampleRange> replaced;
  CorrectionReport report;
};

struct StreamCorrection {
  Signal signal;
  std::vector<EpochRecord> epochs;
};

/// Per-epoch correction hook: (artifact epoch, reference epoch, report) ->
/// corrected epoch of the same length.
using EpochCorrector = std::function<Vector(const Vector& artifact, const Vector& reference,
                                            CorrectionReport& report)>;

/// Partition-and-splice driver shared by WQN and the thresholding baselines.
///
/// The signal is cut into epochs of `epoch_seconds`; the trailing partial
/// epoch is absorbed by shifting its window back to end at the last sample.
/// Every epoch that overlaps an interval is corrected against the nearest
/// fully clean epoch (preceding preferred) and only the samples inside the
/// intervals are written back, ramped in with a raised cosine over
/// `crossfade_fraction` of an epoch from each interval edge.
StreamCorrection process_stream(const Signal& signal, std::span<const Interval> intervals,
                                const StreamOptions& options, const EpochCorrector& corrector);

/// Corrects every epoch against itself and writes the result back in full;
/// used by the thresholding baselines when no intervals are given.
StreamCorrection process_all_epochs(const Signal& signal, const StreamOptions& options,
                                    const EpochCorrector& corrector);

/// WQN correction of the annotated intervals of a continuous recording.
StreamCorrection correct_stream(const Signal& signal, std::span<const Interval> intervals,
                                const StreamOptions& options = {});

/// Throws std::invalid_argument on out-of-range, empty or overlapping intervals.
void validate_intervals(std::span<const Interval> intervals, double duration);

}  // namespace wqn
