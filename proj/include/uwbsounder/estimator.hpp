#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "uwbsounder/averager.hpp"
#include "uwbsounder/dft.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"
#include "uwbsounder/waveform.hpp"

namespace uwbs {

/// Channel transfer function on the L-point DFT grid (natural order).
struct FrequencyResponse {
  std::vector<std::complex<double>> bins;
  std::vector<bool> occupied_mask;
};

struct Cir {
  std::vector<std::complex<double>> taps;  // delay domain, spacing T_s
};

/// Back-to-back reference. Bins whose reference magnitude falls below the
/// threshold are treated as unusable and zeroed on application.
struct CalibrationProfile {
  FrequencyResponse reference;
  double min_magnitude_threshold{1e-3};
};

struct PowerDelayProfile {
  std::vector<double> power_db;
  double sample_period_s{0.0};

  double delay_s(std::size_t i) const noexcept { return static_cast<double>(i) * sample_period_s; }
};

inline constexpr double kPdpFloorDb = -200.0;
inline constexpr double kDegenerateBinTolerance = 1e-12;

/// Snapshot sums in full-scale units, rescaled to an average by 2^K / M.
inline std::vector<std::complex<double>> rescale_snapshot(const Snapshot& snap) {
  const double gain = static_cast<double>(std::size_t{1} << snap.config.shift) /
                      static_cast<double>(snap.config.count);
  std::vector<std::complex<double>> out;
  out.reserve(snap.data.size());
  for (const auto& s : snap.data) out.push_back(to_float(s) * gain);
  return out;
}

/// Frequency-domain deconvolution of one snapshot by the known sounding symbol.
///
/// The averaged window starts P samples into the periodic transmission, so the
/// reference is the symbol advanced by P: DFT bin k picks up exp(+j2 pi k P/L).
inline FrequencyResponse estimate_response(const Snapshot& snap, const SoundingWaveform& wf,
                                           const SounderConfig& cfg) {
  const std::size_t l = cfg.sound_length;
  if (snap.config != cfg.averager())
    throw ConfigError("snapshot was produced with a different averager configuration");
  if (snap.data.size() != l || wf.fft_size != l)
    throw ConfigError("snapshot, waveform and configuration disagree on L");

  const auto averaged = rescale_snapshot(snap);
  const auto spectrum = dft::forward(averaged);
  const std::size_t p_mod = cfg.discard % l;

  FrequencyResponse resp{std::vector<std::complex<double>>(l), wf.occupied_mask};
  for (std::size_t k = 0; k < l; ++k) {
    if (!wf.occupied_mask[k]) continue;
    const std::complex<double> tx = wf.tx_bin(k);
    if (std::abs(tx) < kDegenerateBinTolerance)
      throw DegenerateWaveformError("occupied bin " + std::to_string(k) +
                                    " of the sounding symbol has vanishing magnitude");
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * p_mod) % l) /
                         static_cast<double>(l);
    resp.bins[k] = spectrum[k] / (tx * std::polar(1.0, angle));
  }
  return resp;
}

struct CalibrationResult {
  FrequencyResponse response;
  std::vector<std::size_t> zeroed_bins;
};

inline CalibrationResult apply_calibration(const FrequencyResponse& resp,
                                           const CalibrationProfile& cal) {
  if (resp.occupied_mask != cal.reference.occupied_mask ||
      resp.bins.size() != cal.reference.bins.size())
    throw ConfigError("calibration occupied-bin mask does not match the response");
  CalibrationResult out{{std::vector<std::complex<double>>(resp.bins.size()), resp.occupied_mask},
                        {}};
  for (std::size_t k = 0; k < resp.bins.size(); ++k) {
    if (!resp.occupied_mask[k]) continue;
    const auto ref = cal.reference.bins[k];
    if (std::abs(ref) < cal.min_magnitude_threshold) {
      out.zeroed_bins.push_back(k);
      continue;
    }
    out.response.bins[k] = resp.bins[k] / ref;
  }
  return out;
}

/// Mean of several back-to-back responses, used as the calibration reference.
inline CalibrationProfile make_calibration(std::span<const FrequencyResponse> responses,
                                           double threshold = 1e-3) {
  if (responses.empty()) throw ConfigError("calibration needs at least one response");
  CalibrationProfile cal{responses.front(), threshold};
  for (std::size_t r = 1; r < responses.size(); ++r) {
    if (responses[r].occupied_mask != cal.reference.occupied_mask)
      throw ConfigError("calibration responses use different occupied masks");
    for (std::size_t k = 0; k < cal.reference.bins.size(); ++k)
      cal.reference.bins[k] += responses[r].bins[k];
  }
  const double inv = 1.0 / static_cast<double>(responses.size());
  for (auto& b : cal.reference.bins) b *= inv;
  return cal;
}

inline Cir to_cir(const FrequencyResponse& resp) { return Cir{dft::inverse(resp.bins)}; }

inline PowerDelayProfile power_delay_profile(const Cir& cir, double sample_period_s = 0.0) {
  PowerDelayProfile pdp{std::vector<double>(cir.taps.size()), sample_period_s};
  for (std::size_t i = 0; i < cir.taps.size(); ++i) {
    const double mag = std::abs(cir.taps[i]);
    pdp.power_db[i] = mag > 0.0 ? std::max(20.0 * std::log10(mag), kPdpFloorDb) : kPdpFloorDb;
  }
  return pdp;
}

/// Shift so the strongest tap reads 0 dB. Floor entries stay at the floor.
inline PowerDelayProfile peak_relative(PowerDelayProfile pdp) {
  if (pdp.power_db.empty()) return pdp;
  const double peak = *std::max_element(pdp.power_db.begin(), pdp.power_db.end());
  if (peak <= kPdpFloorDb) return pdp;
  for (auto& v : pdp.power_db) v = v <= kPdpFloorDb ? kPdpFloorDb : std::max(v - peak, kPdpFloorDb);
  return pdp;
}

/// Delay-domain response of a unit flat channel seen through `mask`
/// (the band-limiting kernel every CIR tap is convolved with).
inline std::vector<std::complex<double>> band_limited_kernel(const std::vector<bool>& mask) {
  std::vector<std::complex<double>> flat(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) flat[k] = mask[k] ? 1.0 : 0.0;
  return dft::inverse(flat);
}

/// Successive strongest-tap picking: take the largest |cir| bin, blank
/// +/- `guard` bins (circularly) around it, repeat `count` times.
inline std::vector<std::size_t> find_paths(const Cir& cir, std::size_t count, std::size_t guard) {
  const std::size_t l = cir.taps.size();
  std::vector<bool> blanked(l, false);
  std::vector<std::size_t> delays;
  for (std::size_t p = 0; p < count; ++p) {
    double best = -1.0;
    std::size_t best_idx = l;
    for (std::size_t i = 0; i < l; ++i) {
      if (blanked[i]) continue;
      const double mag = std::abs(cir.taps[i]);
      if (mag > best) {
        best = mag;
        best_idx = i;
      }
    }
    if (best_idx == l) break;
    delays.push_back(best_idx);
    for (std::size_t g = 0; g <= guard && g < l; ++g) {
      blanked[(best_idx + g) % l] = true;
      blanked[(best_idx + l - g % l) % l] = true;
    }
  }
  std::sort(delays.begin(), delays.end());
  return delays;
}

/// Least-squares complex gains of paths at known integer `delays`, modelling
/// the CIR as sum_j g_j * kernel[(n - d_j) mod L]. Undoes the leakage of
/// each path's band-limited sidelobes onto the others.
inline std::vector<std::complex<double>> resolve_tap_gains(const Cir& cir,
                                                           const std::vector<bool>& mask,
                                                           std::span<const std::size_t> delays) {
  const std::size_t l = cir.taps.size();
  if (mask.size() != l) throw ConfigError("mask length does not match CIR length");
  if (delays.empty()) return {};
  const auto kernel = band_limited_kernel(mask);
  const auto rows = static_cast<Eigen::Index>(l);
  const auto cols = static_cast<Eigen::Index>(delays.size());
  Eigen::MatrixXcd basis(rows, cols);
  Eigen::VectorXcd observed(rows);
  for (Eigen::Index n = 0; n < rows; ++n) {
    observed(n) = cir.taps[static_cast<std::size_t>(n)];
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::size_t d = delays[static_cast<std::size_t>(j)] % l;
      basis(n, j) = kernel[(static_cast<std::size_t>(n) + l - d) % l];
    }
  }
  const Eigen::VectorXcd gains = basis.colPivHouseholderQr().solve(observed);
  return {gains.data(), gains.data() + gains.size()};
}

}  // namespace uwbs
