#pragma once

// "Complex short" sample domain and the integer arithmetic of the averager
// data path.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace uwbs {

inline constexpr double kFullScale = 32768.0;
inline constexpr std::int32_t kSampleMin = std::numeric_limits<std::int16_t>::min();
inline constexpr std::int32_t kSampleMax = std::numeric_limits<std::int16_t>::max();
inline constexpr unsigned kMaxShift = 15;

/// One I/Q sample as delivered by the radio: 16-bit signed I and Q.
struct ComplexSample {
  std::int16_t i{0};
  std::int16_t q{0};

  friend constexpr bool operator==(const ComplexSample&, const ComplexSample&) = default;
};

/// Accumulated sum of shifted samples as held in the averager BRAM.
/// Kept distinct from ComplexSample so raw sums never get mistaken for
/// radio samples; the bit width is the same.
struct AccumSample {
  std::int16_t i{0};
  std::int16_t q{0};

  friend constexpr bool operator==(const AccumSample&, const AccumSample&) = default;
};

/// Arithmetic right shift (floor division by 2^k).
constexpr std::int16_t shift_right(std::int16_t v, unsigned k) noexcept {
  return static_cast<std::int16_t>(static_cast<std::int32_t>(v) >> k);
}

constexpr ComplexSample shift_right(ComplexSample s, unsigned k) noexcept {
  return {shift_right(s.i, k), shift_right(s.q, k)};
}

// 16-bit two's complement adder, as in hardware. Wraps on overflow; the
// averager configuration rules (M <= 2^K) keep it from ever wrapping.
constexpr std::int16_t add_wrapping(std::int16_t a, std::int16_t b) noexcept {
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(
      static_cast<std::uint16_t>(a) + static_cast<std::uint16_t>(b)));
}

constexpr AccumSample accumulate(AccumSample acc, ComplexSample shifted) noexcept {
  return {add_wrapping(acc.i, shifted.i), add_wrapping(acc.q, shifted.q)};
}

constexpr AccumSample to_accum(ComplexSample s) noexcept { return {s.i, s.q}; }

namespace detail {

inline std::int16_t quantize_component(double v, bool& saturated) noexcept {
  const double scaled = std::round(v * kFullScale);
  if (!(scaled >= static_cast<double>(kSampleMin))) {
    // NaN lands here too and is pinned to the negative rail.
    saturated = true;
    return static_cast<std::int16_t>(kSampleMin);
  }
  if (scaled > static_cast<double>(kSampleMax)) {
    saturated = true;
    return static_cast<std::int16_t>(kSampleMax);
  }
  return static_cast<std::int16_t>(scaled);
}

}  // namespace detail

/// Round-to-nearest, saturating mapping from full-scale units to 16 bits.
/// `saturated` is set (never cleared) when either component hit a rail.
inline ComplexSample quantize(std::complex<double> v, bool& saturated) noexcept {
  return {detail::quantize_component(v.real(), saturated),
          detail::quantize_component(v.imag(), saturated)};
}

inline ComplexSample quantize(std::complex<double> v) noexcept {
  bool ignored = false;
  return quantize(v, ignored);
}

constexpr std::complex<double> to_float(ComplexSample s) noexcept {
  return {s.i / kFullScale, s.q / kFullScale};
}

constexpr std::complex<double> to_float(AccumSample s) noexcept {
  return {s.i / kFullScale, s.q / kFullScale};
}

// Little-endian wire layout: I (int16 LE) then Q (int16 LE), 4 bytes total.
inline constexpr std::size_t kSampleBytes = 4;

constexpr void encode_le(std::int16_t v, std::byte* out) noexcept {
  const auto u = static_cast<std::uint16_t>(v);
  out[0] = static_cast<std::byte>(u & 0xFFu);
  out[1] = static_cast<std::byte>(u >> 8);
}

constexpr std::int16_t decode_le_i16(const std::byte* in) noexcept {
  const auto u = static_cast<std::uint16_t>(static_cast<std::uint16_t>(in[0]) |
                                            (static_cast<std::uint16_t>(in[1]) << 8));
  return static_cast<std::int16_t>(u);
}

template <typename Sample>
constexpr void encode_sample(Sample s, std::byte* out) noexcept {
  encode_le(s.i, out);
  encode_le(s.q, out + 2);
}

template <typename Sample>
constexpr Sample decode_sample(const std::byte* in) noexcept {
  return Sample{decode_le_i16(in), decode_le_i16(in + 2)};
}

inline std::vector<std::complex<double>> to_float(std::span<const ComplexSample> samples) {
  std::vector<std::complex<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(to_float(s));
  return out;
}

}  // namespace uwbs
