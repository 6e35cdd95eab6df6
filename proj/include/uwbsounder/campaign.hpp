#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uwbsounder/averager.hpp"
#include "uwbsounder/capture.hpp"
#include "uwbsounder/channel.hpp"
#include "uwbsounder/config_io.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/sounder_config.hpp"
#include "uwbsounder/sync.hpp"
#include "uwbsounder/waveform.hpp"

namespace uwbs {

inline PpsSchedule make_schedule(const SounderConfig& cfg, std::int64_t tx_flank = 0,
                                 std::int64_t rx_flank = 0, std::int64_t timing_error = 0) {
  return {cfg.repetition_period_s, cfg.sample_period_s, tx_flank, rx_flank, timing_error};
}

/// Raw-to-averaged sample ratio per snapshot, (T_rep/T_s) / L.
inline double report_reduction(const SounderConfig& cfg) {
  cfg.validate();
  return static_cast<double>(cfg.frame_length()) / static_cast<double>(cfg.sound_length);
}

/// Bytes per second delivered to the host: one L-sample snapshot every T_rep.
inline double host_data_rate(const SounderConfig& cfg) {
  cfg.validate();
  return static_cast<double>(cfg.sound_length * kSampleBytes) / cfg.repetition_period_s;
}

/// Receiver samples [0, count) of snapshot k as produced by the channel,
/// where receiver sample n sees transmit-frame position (n + offset) mod F of
/// a transmitter that repeats `frame` continuously. Noise is drawn from a
/// seed derived from (model.seed, k); tones run phase-continuously from
/// absolute receiver sample k*F.
inline ChannelOutput receive_segment(std::span<const ComplexSample> frame, const ChannelModel& model,
                                     std::uint64_t offset, std::uint64_t snapshot,
                                     std::size_t count) {
  const std::size_t f = frame.size();
  const std::size_t max_delay = model.max_delay();
  std::vector<ComplexSample> tx(count + max_delay);
  const std::size_t start = (offset % f + f - max_delay % f) % f;
  for (std::size_t j = 0; j < tx.size(); ++j) tx[j] = frame[(start + j) % f];

  ChannelModel snap_model = model;
  snap_model.seed = derive_seed(model.seed, snapshot);
  const auto origin = static_cast<std::int64_t>(snapshot * f) - static_cast<std::int64_t>(max_delay);
  const auto analog = propagate(tx, snap_model, origin);

  ChannelOutput out;
  out.samples.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    bool clipped = false;
    out.samples.push_back(quantize(analog[n + max_delay], clipped));
    if (clipped) ++out.saturated;
  }
  return out;
}

/// Waveform -> channel -> averager for cfg.n_snapshots snapshots.
///
/// Only the first P + M*L receiver samples of each repetition period are
/// synthesized; the averager never reads the skipped remainder.
inline CaptureFile run_campaign(const SounderConfig& cfg, const ChannelModel& model,
                                const PpsSchedule& schedule) {
  cfg.validate();
  model.validate();
  if (schedule.t_rep != cfg.repetition_period_s || schedule.t_s != cfg.sample_period_s)
    throw ConfigError("schedule timing does not match the sounder configuration");
  const auto report = validate_config(cfg, model);
  if (!report.passed()) throw ValidationError("configuration rejected:\n" + report.to_string());
  if (!check_flank_independence(cfg.repetition_period_s, cfg.sample_period_s).independent)
    throw SchedulingError("repetition period must divide one second");
  const std::uint64_t offset = receiver_offset(schedule);

  const auto wf = build_sounding_symbol(cfg);
  const auto frame = build_tx_frame(wf, cfg);
  const auto acfg = cfg.averager();

  CaptureFile cap;
  cap.header.config = cfg;
  cap.header.channel_digest = channel_digest(model);
  cap.header.seed = model.seed;
  cap.header.timing_error_samples = schedule.timing_error;
  cap.header.receiver_offset_samples = offset;
  cap.snapshots.reserve(cfg.n_snapshots);
  for (std::size_t k = 0; k < cfg.n_snapshots; ++k) {
    auto rx = receive_segment(frame, model, offset, k, acfg.window());
    cap.header.saturated_samples += rx.saturated;
    cap.snapshots.push_back(select_and_average(rx.samples, acfg, k));
  }
  return cap;
}

}  // namespace uwbs
