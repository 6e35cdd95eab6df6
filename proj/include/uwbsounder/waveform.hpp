#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "uwbsounder/dft.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"

namespace uwbs {

/// OFDM sounding symbol: ZC values on the occupied bins and its time-domain image.
///
/// `freq_bins` holds the unit-modulus ZC values (zero off the mask) in natural
/// DFT order, i.e. bin k at index k mod L. `time_signal` is
/// amplitude_scale * IDFT(freq_bins), with amplitude_scale chosen so the largest
/// |I| or |Q| equals `backoff` in full-scale units.
struct SoundingWaveform {
  std::size_t fft_size{0};
  std::vector<bool> occupied_mask;
  std::vector<std::complex<double>> freq_bins;
  std::vector<std::complex<double>> time_signal;
  double backoff{1.0};
  double amplitude_scale{1.0};

  std::size_t occupied_count() const noexcept {
    return static_cast<std::size_t>(std::count(occupied_mask.begin(), occupied_mask.end(), true));
  }

  double occupied_fraction() const noexcept {
    return fft_size == 0 ? 0.0 : static_cast<double>(occupied_count()) / fft_size;
  }

  double occupied_bandwidth_hz(double sample_rate_hz) const noexcept {
    return occupied_fraction() * sample_rate_hz;
  }

  /// The DFT-domain values actually transmitted, amplitude_scale * freq_bins.
  std::complex<double> tx_bin(std::size_t k) const noexcept {
    return amplitude_scale * freq_bins[k];
  }

  std::vector<ComplexSample> quantized() const {
    std::vector<ComplexSample> out;
    out.reserve(time_signal.size());
    for (const auto& v : time_signal) out.push_back(quantize(v));
    return out;
  }
};

/// Lowest centered bin index of an N-bin block around DC: -floor(N/2).
constexpr std::ptrdiff_t first_occupied_bin(std::size_t n_occupied) noexcept {
  return -static_cast<std::ptrdiff_t>(n_occupied / 2);
}

/// Natural-order DFT index of centered bin k for an L-point transform.
constexpr std::size_t natural_index(std::ptrdiff_t k, std::size_t fft_size) noexcept {
  const auto l = static_cast<std::ptrdiff_t>(fft_size);
  return static_cast<std::size_t>(((k % l) + l) % l);
}

/// Zadoff-Chu sequence of length N with root u.
///   odd N:  x[n] = exp(-j pi u n (n+1) / N)
///   even N: x[n] = exp(-j pi u n^2 / N)
/// The phase numerator is reduced modulo 2N in integers before conversion so
/// long sequences keep full precision.
inline std::vector<std::complex<double>> generate_zc(const ZcParams& params) {
  params.validate();
  const std::uint64_t n_len = params.length;
  const std::uint64_t u = params.root;
  const std::uint64_t modulus = 2 * n_len;
  std::vector<std::complex<double>> x(params.length);
  for (std::uint64_t n = 0; n < n_len; ++n) {
    const std::uint64_t quad = (n_len % 2 == 1) ? (n % modulus) * ((n + 1) % modulus) % modulus
                                                : (n % modulus) * (n % modulus) % modulus;
    const std::uint64_t r = (u % modulus) * quad % modulus;
    const double phase = -std::numbers::pi * static_cast<double>(r) / static_cast<double>(n_len);
    x[n] = std::polar(1.0, phase);
  }
  return x;
}

/// Map `zc` onto the bins -floor(N/2) .. -floor(N/2)+N-1 (DC included) of an
/// fft_size-point symbol and scale the time-domain image to `backoff` peak.
inline SoundingWaveform build_sounding_symbol(std::span<const std::complex<double>> zc,
                                              std::size_t fft_size, double backoff) {
  if (zc.empty()) throw ConfigError("sounding sequence is empty");
  if (zc.size() > fft_size)
    throw ConfigError("sequence length " + std::to_string(zc.size()) + " exceeds fft size " +
                      std::to_string(fft_size));
  if (!(backoff > 0.0 && backoff <= 1.0)) throw ConfigError("backoff must lie in (0, 1]");

  SoundingWaveform wf;
  wf.fft_size = fft_size;
  wf.backoff = backoff;
  wf.occupied_mask.assign(fft_size, false);
  wf.freq_bins.assign(fft_size, {0.0, 0.0});

  const std::ptrdiff_t first = first_occupied_bin(zc.size());
  for (std::size_t n = 0; n < zc.size(); ++n) {
    const std::size_t idx = natural_index(first + static_cast<std::ptrdiff_t>(n), fft_size);
    wf.occupied_mask[idx] = true;
    wf.freq_bins[idx] = zc[n];
  }

  auto time = dft::inverse(wf.freq_bins);
  double peak = 0.0;
  for (const auto& v : time) peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
  if (!(peak > 0.0)) throw DegenerateWaveformError("sounding symbol has zero amplitude");
  wf.amplitude_scale = backoff / peak;
  for (auto& v : time) v *= wf.amplitude_scale;
  wf.time_signal = std::move(time);
  return wf;
}

inline SoundingWaveform build_sounding_symbol(const SounderConfig& cfg) {
  const auto zc = generate_zc(cfg.zc);
  return build_sounding_symbol(zc, cfg.sound_length, cfg.backoff);
}

/// One repetition period of transmit samples: ceil((M*L + P)/L) back-to-back
/// quantized copies of the sounding symbol, then zeros up to T_rep/T_s.
inline std::vector<ComplexSample> build_tx_frame(const SoundingWaveform& wf,
                                                 const SounderConfig& cfg) {
  cfg.validate();
  if (wf.fft_size != cfg.sound_length)
    throw ConfigError("waveform length " + std::to_string(wf.fft_size) +
                      " does not match sound length " + std::to_string(cfg.sound_length));
  const std::size_t frame = cfg.frame_length();
  const std::size_t reps = cfg.tx_repetitions();
  if (reps * cfg.sound_length > frame)
    throw ConfigError("transmit frame longer than the repetition period");

  const auto symbol = wf.quantized();
  std::vector<ComplexSample> out(frame);
  for (std::size_t r = 0; r < reps; ++r)
    std::copy(symbol.begin(), symbol.end(),
              out.begin() + static_cast<std::ptrdiff_t>(r * cfg.sound_length));
  return out;
}

}  // namespace uwbs
