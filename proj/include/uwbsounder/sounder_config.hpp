#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>

#include "uwbsounder/errors.hpp"

namespace uwbs {

/// Zadoff-Chu sequence parameters: `length` occupied sub-carriers, root `root`.
struct ZcParams {
  std::size_t length{813};
  std::size_t root{7};

  void validate() const {
    if (length == 0) throw ConfigError("zc length must be positive");
    if (root < 1 || root >= length)
      throw ConfigError("zc root " + std::to_string(root) + " outside [1, " +
                        std::to_string(length) + ")");
    if (std::gcd(root, length) != 1)
      throw ConfigError("zc root " + std::to_string(root) + " is not coprime with length " +
                        std::to_string(length));
  }

  friend bool operator==(const ZcParams&, const ZcParams&) = default;
};

/// Parameters of the select-and-average block (L, P, M, K).
struct AveragerConfig {
  std::size_t length{1024};   // L
  std::size_t discard{2048};  // P
  std::size_t count{64};      // M
  unsigned shift{6};          // K

  /// Samples consumed by one snapshot before the skip region (P + M*L).
  std::size_t window() const noexcept { return discard + count * length; }

  void validate() const {
    if (length == 0 || length % 2 != 0)
      throw ConfigError("sound length L must be positive and even, got " +
                        std::to_string(length));
    if (discard % 2 != 0)
      throw ConfigError("discard count P must be even, got " + std::to_string(discard));
    if (count == 0) throw ConfigError("average count M must be at least 1");
    if (shift > 15) throw ConfigError("shift K must lie in [0, 15], got " + std::to_string(shift));
    if (count > (std::size_t{1} << shift))
      throw ConfigError("average count M=" + std::to_string(count) + " exceeds 2^K=" +
                        std::to_string(std::size_t{1} << shift) +
                        "; the 16-bit accumulator could overflow");
  }

  friend bool operator==(const AveragerConfig&, const AveragerConfig&) = default;
};

/// Integer n with |x - n| small relative to x, or -1 if x is not integral.
inline std::int64_t integral_ratio(double numerator, double denominator,
                                   double rel_tol = 1e-9) noexcept {
  if (!(numerator > 0.0) || !(denominator > 0.0)) return -1;
  const double x = numerator / denominator;
  const double n = std::round(x);
  if (n < 1.0 || std::abs(x - n) > rel_tol * n) return -1;
  return static_cast<std::int64_t>(n);
}

/// Full sounder parameter set. Defaults reproduce the reference campaign:
/// L=1024, P=2048, M=64, K=6, T_rep=5 ms, T_s=2 ns, f=5.725 GHz, 14 dBm.
///
/// The skip length R is always derived from the others so that
/// P + M*L + R equals the number of samples in one repetition period.
struct SounderConfig {
  std::size_t sound_length{1024};
  std::size_t discard{2048};
  std::size_t average_count{64};
  unsigned shift_bits{6};
  double repetition_period_s{5e-3};
  double sample_period_s{2e-9};
  double center_frequency_hz{5.725e9};
  double tx_power_dbm{14.0};
  ZcParams zc{};
  double backoff{0.5};
  std::size_t n_snapshots{10};

  AveragerConfig averager() const noexcept {
    return {sound_length, discard, average_count, shift_bits};
  }

  double sample_rate_hz() const noexcept { return 1.0 / sample_period_s; }

  /// T_rep / T_s. Throws when it is not a positive integer.
  std::size_t frame_length() const {
    const auto n = integral_ratio(repetition_period_s, sample_period_s);
    if (n < 0)
      throw ConfigError("repetition period is not an integer number of sample periods");
    return static_cast<std::size_t>(n);
  }

  /// Number of sounding-signal copies in the transmit frame, ceil((M*L + P) / L).
  std::size_t tx_repetitions() const noexcept {
    return (averager().window() + sound_length - 1) / sound_length;
  }

  /// R, the samples skipped after averaging until the next snapshot.
  std::size_t skip_length() const {
    const std::size_t frame = frame_length();
    const std::size_t used = averager().window();
    if (used > frame)
      throw ConfigError("P + M*L = " + std::to_string(used) + " exceeds the " +
                        std::to_string(frame) + "-sample repetition period");
    return frame - used;
  }

  void validate() const {
    averager().validate();
    zc.validate();
    if (zc.length > sound_length)
      throw ConfigError("zc length " + std::to_string(zc.length) + " exceeds sound length " +
                        std::to_string(sound_length));
    if (!(backoff > 0.0 && backoff <= 1.0))
      throw ConfigError("backoff must lie in (0, 1]");
    if (!(sample_period_s > 0.0)) throw ConfigError("sample period must be positive");
    if (!(repetition_period_s > 0.0)) throw ConfigError("repetition period must be positive");
    const std::size_t frame = frame_length();
    (void)skip_length();
    if (tx_repetitions() * sound_length > frame)
      throw ConfigError("transmit frame of " + std::to_string(tx_repetitions()) +
                        " sounding signals does not fit in " + std::to_string(frame) +
                        " samples");
  }

  friend bool operator==(const SounderConfig&, const SounderConfig&) = default;
};

}  // namespace uwbs
