#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wqn/io.hpp"

namespace wqn {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(kTextDigits) << value;
  return s.str();
}

std::vector<Interval> read_intervals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open intervals file '" + path + "'");
  std::vector<Interval> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto fail = [&](const std::string& why) {
      return std::invalid_argument(path + ": line " + std::to_string(row) + ": " + why);
    };
    if (!(fields >> b) || (fields >> extra)) throw fail("expected 'start_seconds end_seconds'");
    Interval iv;
    try {
      std::size_t used_a = 0, used_b = 0;
      iv.start = std::stod(a, &used_a);
      iv.end = std::stod(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw fail("non-numeric interval bound");
    }
    out.push_back(iv);
  }
  return out;
}

void write_columns(std::ostream& out, const std::vector<Vector>& columns) {
  if (columns.empty()) return;
  const Index rows = columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw std::invalid_argument("write_columns: columns differ in length");
  }
  for (Index i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ' ';
      out << format_number(columns[c][i]);
    }
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_columns(const std::string& path, const std::vector<Vector>& columns) {
  std::ostringstream s;
  write_columns(s, columns);
  write_text_file(path, s.str());
}

void write_csv(std::ostream& out, const PSDEstimate& estimate) {
  out << "frequency,power\n";
  for (Index k = 0; k < estimate.frequencies.size(); ++k) {
    out << format_number(estimate.frequencies[k]) << ',' << format_number(estimate.power[k]) << '\n';
  }
}

void write_csv(std::ostream& out, const Histogram& h) {
  out << "left,right,count,density\n";
  for (Index k = 0; k < h.bins(); ++k) {
    out << format_number(h.edges[k]) << ',' << format_number(h.edges[k + 1]) << ','
        << format_number(h.counts[k]) << ',' << format_number(h.density[k]) << '\n';
  }
}

void write_csv(std::ostream& out, const SpectrogramEstimate& estimate, bool decibels) {
  const Eigen::MatrixXd p = decibels ? to_decibels(estimate.power) : estimate.power;
  out << "time";
  for (double f : estimate.frequencies) out << ',' << format_number(f);
  out << '\n';
  for (Index t = 0; t < p.rows(); ++t) {
    out << format_number(estimate.times[t]);
    for (Index k = 0; k < p.cols(); ++k) out << ',' << format_number(p(t, k));
    out << '\n';
  }
}

json to_json(const Vector& values) { return std::vector<double>(values.begin(), values.end()); }

json to_json(const PSDEstimate& e) {
  return {{"frequencies", to_json(e.frequencies)},
          {"power", to_json(e.power)},
          {"sampling_rate", e.sampling_rate},
          {"segment_length", e.segment_length},
          {"overlap_samples", e.overlap_samples},
          {"segments", e.segments},
          {"window", e.window},
          {"detrend", "constant"},
          {"scaling", "density"}};
}

json to_json(const PowerLawFit& fit) {
  return {{"alpha", fit.alpha},
          {"hurst", fit.hurst},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"band", {fit.band.low, fit.band.high}},
          {"bins", fit.bins}};
}

json to_json(const Histogram& h) {
  return {{"edges", to_json(h.edges)},
          {"counts", to_json(h.counts)},
          {"density", to_json(h.density)},
          {"total", h.total}};
}

json to_json(const SpectrogramEstimate& e, bool decibels) {
  const Eigen::MatrixXd p = decibels ? to_decibels(e.power) : e.power;
  json rows = json::array();
  for (Index t = 0; t < p.rows(); ++t) rows.push_back(to_json(Vector(p.row(t).transpose())));
  return {{"times", to_json(e.times)},
          {"frequencies", to_json(e.frequencies)},
          {"power", rows},
          {"units", decibels ? "dB" : "power/Hz"},
          {"window", e.window},
          {"window_seconds", e.window_seconds},
          {"window_samples", e.window_samples},
          {"hop_samples", e.hop_samples},
          {"overlap", e.overlap}};
}

json to_json(const GGDFit& fit) {
  return {{"alpha", fit.alpha}, {"beta", fit.beta}, {"loglik", fit.loglik}, {"gradient", fit.gradient}};
}

json to_json(const ScaleReport& r) {
  return {{"scale", r.scale},
          {"coefficients", r.total},
          {"attenuated", r.attenuated},
          {"energy_before", r.energy_before},
          {"energy_after", r.energy_after},
          {"attenuation_ratio", r.attenuation_ratio()},
          {"quantile_levels", to_json(report_quantile_levels())},
          {"pre_quantiles", to_json(r.pre_quantiles)},
          {"post_quantiles", to_json(r.post_quantiles)}};
}

json to_json(const CorrectionReport& report) {
  json scales = json::array();
  for (const auto& s : report.scales) scales.push_back(to_json(s));
  return scales;
}

json to_json(const EpochRecord& r, double rate) {
  auto seconds = [rate](const SampleRange& s) {
    return json::array({static_cast<double>(s.begin) / rate, static_cast<double>(s.end) / rate});
  };
  json replaced = json::array();
  for (const auto& s : r.replaced) replaced.push_back(seconds(s));
  return {{"epoch", r.epoch},
          {"window", seconds(r.window)},
          {"reference_epoch", r.reference_epoch},
          {"reference_window", seconds(r.reference_window)},
          {"replaced", replaced},
          {"scales", to_json(r.report)}};
}

}  // namespace wqn
