#pragma once

// CSV export of analytical curves and simulation sweeps (long format, one row
// per curve and SNR point) plus a gnuplot script for a quick look.

#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "daf/analysis.hpp"
#include "daf/harness.hpp"

namespace daf {

inline constexpr const char* kAnalyzeColumns =
    "case,scenario,weight_scheme,q,snr_db,ber_analytical,error_floor";
inline constexpr const char* kSimulateColumns =
    "case,scenario,weight_scheme,q,snr_db,ber_analytical,ber_simulated,bit_errors,bits_simulated,"
    "ci95_low,ci95_high,error_floor,truncated";

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

struct AnalysisCurve {
  SweepConfig config;
  std::vector<double> ber;  // one per config.snr_grid_db entry
  double error_floor = 0.0;
};

inline AnalysisCurve analyze_curve(const SweepConfig& config) {
  config.validate();
  AnalysisCurve curve{config, {}, 0.0};
  const auto model = config.model();
  for (double snr : config.snr_grid_db) curve.ber.push_back(ber_at(model, snr));
  curve.error_floor = error_floor(model);
  return curve;
}

namespace detail {

inline std::string curve_prefix(const SweepConfig& c) {
  return c.fading.label + ',' + c.scenario.label + ',' + scheme_name(c.weight_scheme) + ',' +
         format_real(c.power_split_q);
}

}  // namespace detail

inline void write_analysis_csv(std::ostream& os, const std::vector<AnalysisCurve>& curves) {
  os << kAnalyzeColumns << '\n';
  for (const auto& c : curves) {
    const auto prefix = detail::curve_prefix(c.config);
    for (std::size_t i = 0; i < c.ber.size(); ++i) {
      os << prefix << ',' << format_real(c.config.snr_grid_db[i]) << ',' << format_real(c.ber[i]) << ','
         << format_real(c.error_floor) << '\n';
    }
  }
}

inline void write_simulation_csv(std::ostream& os, const std::vector<SweepResult>& results) {
  os << kSimulateColumns << '\n';
  for (const auto& r : results) {
    const auto prefix = detail::curve_prefix(r.config);
    for (const auto& p : r.points) {
      os << prefix << ',' << format_real(p.snr_db) << ',' << format_real(p.ber_analytical) << ','
         << format_real(p.ber_simulated) << ',' << p.bit_errors << ',' << p.bits_simulated << ','
         << format_real(p.ci95_low) << ',' << format_real(p.ci95_high) << ','
         << format_real(r.error_floor) << ',' << (p.truncated ? 1 : 0) << '\n';
    }
  }
}

/// Identifies one curve of a long-format CSV by its first three columns.
struct PlotCurve {
  std::string fading;
  std::string scenario;
  std::string scheme;

  static PlotCurve of(const SweepConfig& c) {
    return {c.fading.label, c.scenario.label, scheme_name(c.weight_scheme)};
  }
  std::string title() const { return fading + " " + scenario + " " + scheme; }
};

/// gnuplot script plotting every curve of `csv_name` on a log BER axis. With
/// `simulated`, simulated points are drawn over the analytical lines.
inline void write_plot_script(std::ostream& os, const std::string& csv_name,
                              const std::vector<PlotCurve>& curves, bool simulated) {
  os << "set datafile separator ','\n"
     << "set logscale y\n"
     << "set format y '10^{%L}'\n"
     << "set xlabel 'P/N0 (dB)'\n"
     << "set ylabel 'BER'\n"
     << "set grid\n"
     << "set key outside right\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const std::string match = "(strcol(1) eq '" + c.fading + "' && strcol(2) eq '" + c.scenario +
                              "' && strcol(3) eq '" + c.scheme + "')";
    os << "  '" << csv_name << "' using 5:(" << match << " ? $6 : NaN) with lines lc " << i + 1
       << " title '" << c.title() << "'";
    if (simulated) {
      os << ", \\\n  '" << csv_name << "' using 5:(" << match << " ? $7 : NaN) with points lc " << i + 1
         << " notitle";
    }
    os << (i + 1 < curves.size() ? ", \\\n" : "\n");
  }
}

}  // namespace daf
