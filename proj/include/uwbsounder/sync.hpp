#pragma once

// PPS start alignment. Both ends start on a positive PPS flank; if one second
// is a whole number of repetition periods, every flank coincides with the
// start of a transmit frame, so the two sides may start on different flanks.

#include <cmath>
#include <cstdint>
#include <string>

#include "uwbsounder/errors.hpp"
#include "uwbsounder/sounder_config.hpp"

namespace uwbs {

struct PpsSchedule {
  double t_rep{5e-3};
  double t_s{2e-9};
  std::int64_t tx_start_flank{0};
  std::int64_t rx_start_flank{0};
  std::int64_t timing_error{0};  // samples; positive means the receiver starts late

  friend bool operator==(const PpsSchedule&, const PpsSchedule&) = default;
};

struct FlankIndependence {
  bool independent{false};
  std::uint64_t snapshots_per_second{0};  // zero unless independent
};

/// True iff 1 s is an integer multiple of t_rep to within one sample period.
inline FlankIndependence check_flank_independence(double t_rep, double t_s = 2e-9) {
  if (!(t_rep > 0.0)) throw ConfigError("repetition period must be positive");
  const double per_second = 1.0 / t_rep;
  const double n = std::round(per_second);
  if (n < 1.0) return {};
  const double residual = std::abs(1.0 - n * t_rep);
  if (residual > t_s) return {};
  return {true, static_cast<std::uint64_t>(n)};
}

namespace detail {

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) noexcept {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) noexcept {
  return static_cast<std::int64_t>(static_cast<__int128>(floor_mod(a, m)) * floor_mod(b, m) % m);
}

}  // namespace detail

/// Position in the transmit frame, in samples, that the receiver's first
/// sample corresponds to:
///   ((rx_flank - tx_flank) * (1 s / t_s) + timing_error) mod (t_rep / t_s)
inline std::uint64_t receiver_offset(const PpsSchedule& schedule) {
  const auto frame = integral_ratio(schedule.t_rep, schedule.t_s);
  if (frame < 0) throw SchedulingError("t_rep is not an integer number of sample periods");
  const auto per_second = integral_ratio(1.0, schedule.t_s);
  if (per_second < 0) throw SchedulingError("one second is not an integer number of samples");
  const auto flank = check_flank_independence(schedule.t_rep, schedule.t_s);
  if (!flank.independent)
    throw SchedulingError("t_rep = " + std::to_string(schedule.t_rep) +
                          " s does not divide one second; start flanks would matter");
  const std::int64_t flank_diff = schedule.rx_start_flank - schedule.tx_start_flank;
  const std::int64_t offset = detail::mul_mod(flank_diff, per_second, frame) +
                              detail::floor_mod(schedule.timing_error, frame);
  return static_cast<std::uint64_t>(offset % frame);
}

}  // namespace uwbs
