#pragma once

// JSON text forms of the sounder configuration, channel model and calibration
// profile. Physical quantities carry their unit in the key name. Missing keys
// fall back to the defaults; unknown keys are rejected so typos surface.

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include "uwbsounder/channel.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/estimator.hpp"
#include "uwbsounder/sounder_config.hpp"
#include "uwbsounder/sync.hpp"

namespace uwbs {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                                std::string_view where) {
  if (!j.is_object()) throw FormatError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw FormatError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline json complex_to_json(std::complex<double> v) { return json::array({v.real(), v.imag()}); }

inline std::complex<double> complex_from_json(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError(std::string(what) + " must be a [real, imag] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline json config_to_json(const SounderConfig& c) {
  return json{
      {"sound_length_samples", c.sound_length},
      {"discard_samples", c.discard},
      {"average_count", c.average_count},
      {"shift_bits", c.shift_bits},
      {"repetition_period_s", c.repetition_period_s},
      {"sample_period_s", c.sample_period_s},
      {"center_frequency_hz", c.center_frequency_hz},
      {"tx_power_dbm", c.tx_power_dbm},
      {"zc_length", c.zc.length},
      {"zc_root", c.zc.root},
      {"backoff_linear", c.backoff},
      {"snapshots", c.n_snapshots},
  };
}

inline SounderConfig config_from_json(const json& j) {
  detail::reject_unknown_keys(
      j,
      {"sound_length_samples", "discard_samples", "average_count", "shift_bits",
       "repetition_period_s", "sample_period_s", "center_frequency_hz", "tx_power_dbm",
       "zc_length", "zc_root", "backoff_linear", "snapshots", "schedule"},
      "sounder config");
  SounderConfig c;
  detail::read_opt(j, "sound_length_samples", c.sound_length);
  detail::read_opt(j, "discard_samples", c.discard);
  detail::read_opt(j, "average_count", c.average_count);
  detail::read_opt(j, "shift_bits", c.shift_bits);
  detail::read_opt(j, "repetition_period_s", c.repetition_period_s);
  detail::read_opt(j, "sample_period_s", c.sample_period_s);
  detail::read_opt(j, "center_frequency_hz", c.center_frequency_hz);
  detail::read_opt(j, "tx_power_dbm", c.tx_power_dbm);
  detail::read_opt(j, "zc_length", c.zc.length);
  detail::read_opt(j, "zc_root", c.zc.root);
  detail::read_opt(j, "backoff_linear", c.backoff);
  detail::read_opt(j, "snapshots", c.n_snapshots);
  return c;
}

/// Schedule stored under "schedule" in a config file; timing comes from the config.
inline PpsSchedule schedule_from_json(const json& j, const SounderConfig& cfg) {
  PpsSchedule s;
  s.t_rep = cfg.repetition_period_s;
  s.t_s = cfg.sample_period_s;
  if (!j.contains("schedule")) return s;
  const auto& sj = j.at("schedule");
  detail::reject_unknown_keys(sj, {"tx_start_flank", "rx_start_flank", "timing_error_samples"},
                              "schedule");
  detail::read_opt(sj, "tx_start_flank", s.tx_start_flank);
  detail::read_opt(sj, "rx_start_flank", s.rx_start_flank);
  detail::read_opt(sj, "timing_error_samples", s.timing_error);
  return s;
}

inline json schedule_to_json(const PpsSchedule& s) {
  return json{{"tx_start_flank", s.tx_start_flank},
              {"rx_start_flank", s.rx_start_flank},
              {"timing_error_samples", s.timing_error}};
}

inline json channel_to_json(const ChannelModel& m) {
  json taps = json::array();
  for (const auto& t : m.taps)
    taps.push_back({{"delay_samples", t.delay}, {"gain", detail::complex_to_json(t.gain)}});
  json tones = json::array();
  for (const auto& it : m.interferers)
    tones.push_back({{"normalized_freq", it.normalized_freq},
                     {"amplitude", it.amplitude},
                     {"phase_rad", it.phase}});
  return json{{"taps", taps}, {"noise_std", m.noise_std}, {"interferers", tones}, {"seed", m.seed}};
}

inline ChannelModel channel_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"taps", "noise_std", "interferers", "seed"}, "channel model");
  if (j.contains("interferers") && !j.at("interferers").is_array())
    throw FormatError("'interferers' must be an array");
  ChannelModel m;
  m.taps.clear();
  if (!j.contains("taps") || !j.at("taps").is_array())
    throw FormatError("channel model needs a 'taps' array");
  for (const auto& tj : j.at("taps")) {
    detail::reject_unknown_keys(tj, {"delay_samples", "gain"}, "tap");
    Tap t;
    detail::read_opt(tj, "delay_samples", t.delay);
    if (tj.contains("gain")) t.gain = detail::complex_from_json(tj.at("gain"), "tap gain");
    m.taps.push_back(t);
  }
  detail::read_opt(j, "noise_std", m.noise_std);
  detail::read_opt(j, "seed", m.seed);
  if (j.contains("interferers")) {
    for (const auto& ij : j.at("interferers")) {
      detail::reject_unknown_keys(ij, {"normalized_freq", "amplitude", "phase_rad"}, "interferer");
      Interferer it;
      detail::read_opt(ij, "normalized_freq", it.normalized_freq);
      detail::read_opt(ij, "amplitude", it.amplitude);
      detail::read_opt(ij, "phase_rad", it.phase);
      m.interferers.push_back(it);
    }
  }
  m.normalize();
  return m;
}

/// FNV-1a over the canonical (key-sorted, compact) JSON text of the model.
inline std::string channel_digest(const ChannelModel& m) {
  const std::string text = channel_to_json(m).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline json calibration_to_json(const CalibrationProfile& cal) {
  json bins = json::array();
  json mask = json::array();
  for (std::size_t k = 0; k < cal.reference.bins.size(); ++k) {
    bins.push_back(detail::complex_to_json(cal.reference.bins[k]));
    mask.push_back(cal.reference.occupied_mask[k] ? 1 : 0);
  }
  return json{{"format", "uwbs-calibration"},
              {"version", 1},
              {"fft_size", cal.reference.bins.size()},
              {"threshold", cal.min_magnitude_threshold},
              {"occupied", mask},
              {"bins", bins}};
}

inline CalibrationProfile calibration_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"format", "version", "fft_size", "threshold", "occupied", "bins"},
                              "calibration file");
  try {
    if (j.value("format", "") != "uwbs-calibration") throw FormatError("not a calibration file");
    if (j.value("version", 0) != 1) throw FormatError("unsupported calibration file version");
    CalibrationProfile cal;
    const auto n = j.at("fft_size").get<std::size_t>();
    detail::read_opt(j, "threshold", cal.min_magnitude_threshold);
    const auto& bins = j.at("bins");
    const auto& mask = j.at("occupied");
    if (bins.size() != n || mask.size() != n)
      throw FormatError("calibration bins/occupied length does not match fft_size");
    for (std::size_t k = 0; k < n; ++k) {
      cal.reference.bins.push_back(detail::complex_from_json(bins[k], "calibration bin"));
      cal.reference.occupied_mask.push_back(mask[k].get<int>() != 0);
    }
    return cal;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed calibration file: ") + e.what());
  }
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace uwbs
