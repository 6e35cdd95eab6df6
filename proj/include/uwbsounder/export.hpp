#pragma once

// Row-oriented text exports for estimates: CSV with a header line, or one
// JSON object per line. PDP rows are peak-relative dB per snapshot.

#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "uwbsounder/config_io.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/estimator.hpp"
#include "uwbsounder/waveform.hpp"

namespace uwbs {

enum class ExportFormat { csv, json_lines };

inline ExportFormat parse_export_format(std::string_view s) {
  if (s == "csv") return ExportFormat::csv;
  if (s == "json-lines") return ExportFormat::json_lines;
  throw ConfigError("unknown export format '" + std::string(s) + "' (csv or json-lines)");
}

namespace detail {

inline void set_precision(std::ostream& out) {
  out.precision(17);
}

}  // namespace detail

inline void write_pdp_header(std::ostream& out, ExportFormat fmt) {
  if (fmt == ExportFormat::csv) out << "snapshot,delay_s,power_db\n";
}

inline void write_pdp(std::ostream& out, ExportFormat fmt, std::size_t snapshot,
                      const PowerDelayProfile& pdp) {
  detail::set_precision(out);
  for (std::size_t i = 0; i < pdp.power_db.size(); ++i) {
    if (fmt == ExportFormat::csv) {
      out << snapshot << ',' << pdp.delay_s(i) << ',' << pdp.power_db[i] << '\n';
    } else {
      out << json{{"snapshot", snapshot}, {"delay_s", pdp.delay_s(i)}, {"power_db", pdp.power_db[i]}}
                 .dump()
          << '\n';
    }
  }
}

inline void write_cir_header(std::ostream& out, ExportFormat fmt) {
  if (fmt == ExportFormat::csv) out << "snapshot,delay_s,re,im\n";
}

inline void write_cir(std::ostream& out, ExportFormat fmt, std::size_t snapshot, const Cir& cir,
                      double sample_period_s) {
  detail::set_precision(out);
  for (std::size_t i = 0; i < cir.taps.size(); ++i) {
    const double delay = static_cast<double>(i) * sample_period_s;
    const auto v = cir.taps[i];
    if (fmt == ExportFormat::csv) {
      out << snapshot << ',' << delay << ',' << v.real() << ',' << v.imag() << '\n';
    } else {
      out << json{{"snapshot", snapshot}, {"delay_s", delay}, {"re", v.real()}, {"im", v.imag()}}
                 .dump()
          << '\n';
    }
  }
}

inline void write_response_header(std::ostream& out, ExportFormat fmt) {
  if (fmt == ExportFormat::csv) out << "snapshot,bin,frequency_offset_hz,re,im,magnitude_db\n";
}

/// Occupied bins only, ordered by centered bin index.
inline void write_response(std::ostream& out, ExportFormat fmt, std::size_t snapshot,
                           const FrequencyResponse& resp, double sample_rate_hz) {
  detail::set_precision(out);
  const std::size_t l = resp.bins.size();
  const auto half = static_cast<std::ptrdiff_t>(l / 2);
  for (std::ptrdiff_t k = -half; k < static_cast<std::ptrdiff_t>(l) - half; ++k) {
    const std::size_t idx = natural_index(k, l);
    if (!resp.occupied_mask[idx]) continue;
    const auto v = resp.bins[idx];
    const double mag = std::abs(v);
    const double db = mag > 0.0 ? 20.0 * std::log10(mag) : kPdpFloorDb;
    const double freq = static_cast<double>(k) * sample_rate_hz / static_cast<double>(l);
    if (fmt == ExportFormat::csv) {
      out << snapshot << ',' << k << ',' << freq << ',' << v.real() << ',' << v.imag() << ','
          << db << '\n';
    } else {
      out << json{{"snapshot", snapshot}, {"bin", k}, {"frequency_offset_hz", freq},
                  {"re", v.real()},       {"im", v.imag()}, {"magnitude_db", db}}
                 .dump()
          << '\n';
    }
  }
}

}  // namespace uwbs
