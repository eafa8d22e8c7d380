#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqn/metrics.hpp"
#include "wqn/normalization.hpp"
#include "wqn/signal.hpp"
#include "wqn/spectral.hpp"
#include "wqn/stream.hpp"

namespace wqn {

/// Significant digits of every numeric text output.
inline constexpr int kTextDigits = 9;

std::string format_number(double value);

/// One "start end" pair (seconds) per line; blank lines and '#' comments skipped.
std::vector<Interval> read_intervals(const std::string& path);

/// One channel per whitespace-separated column.
void write_columns(std::ostream& out, const std::vector<Vector>& columns);
void write_columns(const std::string& path, const std::vector<Vector>& columns);

void write_csv(std::ostream& out, const PSDEstimate& estimate);
void write_csv(std::ostream& out, const Histogram& histogram);
/// One row per frame: time, then one column per frequency.
void write_csv(std::ostream& out, const SpectrogramEstimate& estimate, bool decibels = false);

nlohmann::json to_json(const PSDEstimate& estimate);
nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(const Histogram& histogram);
nlohmann::json to_json(const SpectrogramEstimate& estimate, bool decibels = false);
nlohmann::json to_json(const GGDFit& fit);
nlohmann::json to_json(const ScaleReport& report);
nlohmann::json to_json(const CorrectionReport& report);
nlohmann::json to_json(const EpochRecord& record, double sampling_rate);

nlohmann::json to_json(const Vector& values);

/// Writes the whole file or throws std::runtime_error naming the path.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wqn
