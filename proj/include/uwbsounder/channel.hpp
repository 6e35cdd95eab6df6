#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsounder/errors.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"

namespace uwbs {

struct Tap {
  std::size_t delay{0};  // samples
  std::complex<double> gain{1.0, 0.0};

  friend bool operator==(const Tap&, const Tap&) = default;
};

/// Complex tone e^{j(2 pi nu n + phase)} scaled by `amplitude` (full-scale units).
struct Interferer {
  double normalized_freq{0.0};  // cycles per sample, (-0.5, 0.5]
  double amplitude{0.0};
  double phase{0.0};  // radians

  friend bool operator==(const Interferer&, const Interferer&) = default;
};

/// Tapped delay line with AWGN and tone interference.
struct ChannelModel {
  std::vector<Tap> taps{Tap{}};
  double noise_std{0.0};  // per component, full-scale units
  std::vector<Interferer> interferers;
  std::uint64_t seed{0};

  /// tau_0 in samples.
  std::size_t first_delay() const { return require_taps().front().delay; }
  std::size_t max_delay() const { return require_taps().back().delay; }
  /// Delta tau_max in samples.
  std::size_t delay_spread() const { return max_delay() - first_delay(); }

  /// Sorts taps by delay, then checks the model invariants.
  void normalize() {
    std::sort(taps.begin(), taps.end(),
              [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
    validate();
  }

  void validate() const {
    if (taps.empty()) throw ConfigError("channel model needs at least one tap");
    for (std::size_t i = 1; i < taps.size(); ++i) {
      if (taps[i].delay == taps[i - 1].delay)
        throw ConfigError("duplicate tap delay " + std::to_string(taps[i].delay));
      if (taps[i].delay < taps[i - 1].delay) throw ConfigError("taps must be sorted by delay");
    }
    if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
    for (const auto& it : interferers) {
      if (!(it.amplitude >= 0.0)) throw ConfigError("interferer amplitude must be non-negative");
      if (!(it.normalized_freq > -0.5 && it.normalized_freq <= 0.5))
        throw ConfigError("interferer frequency must lie in (-0.5, 0.5] cycles/sample");
    }
  }

  friend bool operator==(const ChannelModel&, const ChannelModel&) = default;

 private:
  const std::vector<Tap>& require_taps() const {
    if (taps.empty()) throw ConfigError("channel model needs at least one tap");
    return taps;
  }
};

/// Identifier recorded in capture metadata for the noise generator below.
inline constexpr const char* kNoiseAlgorithm = "mt19937_64+box-muller";

/// Deterministic complex Gaussian source: mt19937_64 words turned into
/// 53-bit uniforms, then Box-Muller. One complex value per draw, I from the
/// cosine branch and Q from the sine branch of the same pair.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  std::complex<double> next(double std_dev) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {std_dev * radius * std::cos(angle), std_dev * radius * std::sin(angle)};
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent per-snapshot seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Float-domain receive signal before quantization. Output length is
/// tx.size() + max_delay. `time_origin` is the absolute sample index of
/// output sample 0 and sets the interferer phase, so consecutive segments
/// keep the tones phase-continuous.
inline std::vector<std::complex<double>> propagate(std::span<const ComplexSample> tx,
                                                   const ChannelModel& model,
                                                   std::int64_t time_origin = 0) {
  model.validate();
  const std::size_t out_len = tx.size() + model.max_delay();
  std::vector<std::complex<double>> out(out_len);
  for (const auto& tap : model.taps) {
    for (std::size_t n = 0; n < tx.size(); ++n) out[n + tap.delay] += tap.gain * to_float(tx[n]);
  }
  for (const auto& it : model.interferers) {
    if (it.amplitude == 0.0) continue;
    // Phase is reduced modulo one cycle in long double to stay accurate for
    // large absolute sample indices.
    for (std::size_t n = 0; n < out_len; ++n) {
      const long double cycles =
          static_cast<long double>(it.normalized_freq) *
          static_cast<long double>(time_origin + static_cast<std::int64_t>(n));
      const double frac = static_cast<double>(cycles - std::floor(cycles));
      out[n] += std::polar(it.amplitude, 2.0 * std::numbers::pi * frac + it.phase);
    }
  }
  if (model.noise_std > 0.0) {
    GaussianNoise noise(model.seed);
    for (auto& v : out) v += noise.next(model.noise_std);
  }
  return out;
}

struct ChannelOutput {
  std::vector<ComplexSample> samples;
  std::size_t saturated{0};  // samples with at least one clipped component
};

/// rx[n] = quantize(sum_taps g * tx[n - d] + tones[n] + noise[n]).
inline ChannelOutput apply_channel(std::span<const ComplexSample> tx, const ChannelModel& model,
                                   std::int64_t time_origin = 0) {
  const auto analog = propagate(tx, model, time_origin);
  ChannelOutput out;
  out.samples.reserve(analog.size());
  for (const auto& v : analog) {
    bool clipped = false;
    out.samples.push_back(quantize(v, clipped));
    if (clipped) ++out.saturated;
  }
  return out;
}

struct ConstraintCheck {
  std::string name;
  std::string requirement;
  bool passed{false};
  double margin{0.0};  // samples; negative when violated
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;

  bool passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& c : checks)
      os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.requirement
         << " (margin " << c.margin << " samples)\n";
    return os.str();
  }
};

/// Delay bounds of a channel expressed in seconds.
struct DelayBounds {
  double first_delay_s{0.0};  // tau_0,max
  double delay_spread_s{0.0};  // Delta tau_max
};

/// Anti-aliasing and circular-convolution checks on (L, P):
///   L > Delta tau_max / T_s
///   P >= tau_0 / T_s + L
inline ValidationReport validate_config(const SounderConfig& cfg, const DelayBounds& bounds) {
  const double ts = cfg.sample_period_s;
  const double spread = bounds.delay_spread_s / ts;
  const double first = bounds.first_delay_s / ts;
  // Delays given in seconds are snapped to the sample grid when they sit on it
  // to within floating-point noise.
  auto snap = [](double v) {
    const double r = std::round(v);
    return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(r)) ? r : v;
  };
  const double spread_samples = snap(spread);
  const double first_samples = snap(first);
  const double l = static_cast<double>(cfg.sound_length);
  const double p = static_cast<double>(cfg.discard);
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };

  ValidationReport report;
  {
    ConstraintCheck c;
    c.name = "aliasing";
    c.requirement = "L > delay_spread/T_s (" + std::to_string(cfg.sound_length) + " > " +
                    num(spread_samples) + ")";
    c.margin = l - spread_samples;
    c.passed = c.margin > 0.0;
    report.checks.push_back(std::move(c));
  }
  {
    ConstraintCheck c;
    c.name = "discard";
    c.requirement = "P >= first_delay/T_s + L (" + std::to_string(cfg.discard) +
                    " >= " + num(first_samples + l) + ")";
    c.margin = p - (first_samples + l);
    c.passed = c.margin >= 0.0;
    report.checks.push_back(std::move(c));
  }
  return report;
}

inline ValidationReport validate_config(const SounderConfig& cfg, const ChannelModel& model) {
  const double ts = cfg.sample_period_s;
  return validate_config(cfg, DelayBounds{static_cast<double>(model.first_delay()) * ts,
                                          static_cast<double>(model.delay_spread()) * ts});
}

}  // namespace uwbs
