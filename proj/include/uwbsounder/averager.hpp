#pragma once

// Functional model of the select-and-average block.
//
// Per snapshot the block discards P samples, then accumulates M consecutive
// L-sample sounding signals after shifting every incoming sample right by K
// bits, and emits the L raw sums. Everything after that, up to the next
// snapshot boundary, is skipped.
//
// Two equivalent routes are provided: `select_and_average` works on the whole
// snapshot at once, and `step_state_machine` replays the hardware data path
// one 64-bit word (two samples) at a time through IN / ADD_IN / ADD_OUT.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uwbsounder/errors.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"

namespace uwbs {

struct Snapshot {
  std::vector<AccumSample> data;  // raw sums, not divided by M
  std::uint64_t snapshot_index{0};
  AveragerConfig config{};

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

using SampleWord = std::array<ComplexSample, 2>;
using AccumWord = std::array<AccumSample, 2>;

enum class AveragerPhase { discard, in, add_in, add_out, skip };

/// Word-level state of the averager. Memory word w holds samples 2w and 2w+1.
struct AveragerState {
  AveragerConfig config{};
  AveragerPhase phase{AveragerPhase::discard};
  std::size_t discard_remaining{0};  // samples still to drop while in `discard`
  std::size_t signal_index{0};       // 0..M-1
  std::size_t word_index{0};         // 0..L/2-1
  std::vector<AccumWord> memory;

  std::size_t sample_index() const noexcept { return 2 * word_index; }
};

namespace detail {

inline AveragerPhase first_signal_phase(const AveragerConfig& cfg) noexcept {
  return cfg.count == 1 ? AveragerPhase::add_out : AveragerPhase::in;
}

inline AveragerPhase phase_for_signal(const AveragerConfig& cfg, std::size_t signal) noexcept {
  if (signal + 1 == cfg.count) return AveragerPhase::add_out;
  return signal == 0 ? AveragerPhase::in : AveragerPhase::add_in;
}

}  // namespace detail

inline AveragerState make_averager_state(const AveragerConfig& cfg) {
  cfg.validate();
  AveragerState s;
  s.config = cfg;
  s.memory.assign(cfg.length / 2, AccumWord{});
  s.discard_remaining = cfg.discard;
  s.phase = cfg.discard > 0 ? AveragerPhase::discard : detail::first_signal_phase(cfg);
  return s;
}

/// Advance the averager by one input word. Returns the output word in ADD_OUT,
/// nothing otherwise. SKIP is absorbing for the rest of the snapshot.
inline std::optional<AccumWord> step_state_machine(AveragerState& state, const SampleWord& word) {
  const auto& cfg = state.config;
  const std::size_t words_per_signal = cfg.length / 2;
  const SampleWord shifted{shift_right(word[0], cfg.shift), shift_right(word[1], cfg.shift)};
  std::optional<AccumWord> out;

  switch (state.phase) {
    case AveragerPhase::discard:
      state.discard_remaining -= 2;
      if (state.discard_remaining == 0) state.phase = detail::first_signal_phase(cfg);
      return out;
    case AveragerPhase::skip:
      return out;
    case AveragerPhase::in:
      state.memory[state.word_index] = {to_accum(shifted[0]), to_accum(shifted[1])};
      break;
    case AveragerPhase::add_in: {
      auto& mem = state.memory[state.word_index];
      mem = {accumulate(mem[0], shifted[0]), accumulate(mem[1], shifted[1])};
      break;
    }
    case AveragerPhase::add_out:
      if (cfg.count == 1) {
        // Memory bypass: nothing was stored, the shifted input is the sum.
        out = AccumWord{to_accum(shifted[0]), to_accum(shifted[1])};
      } else {
        const auto& mem = state.memory[state.word_index];
        out = AccumWord{accumulate(mem[0], shifted[0]), accumulate(mem[1], shifted[1])};
      }
      break;
  }

  if (++state.word_index == words_per_signal) {
    state.word_index = 0;
    if (state.phase == AveragerPhase::add_out) {
      state.phase = AveragerPhase::skip;
    } else {
      ++state.signal_index;
      state.phase = detail::phase_for_signal(cfg, state.signal_index);
    }
  }
  return out;
}

/// Streaming route: feed one snapshot's samples word by word through the
/// state machine and collect the ADD_OUT words.
inline Snapshot stream_snapshot(std::span<const ComplexSample> stream, const AveragerConfig& cfg,
                                std::uint64_t snapshot_index = 0) {
  cfg.validate();
  if (stream.size() < cfg.window())
    throw TruncatedStreamError(stream.size(), cfg.window(), snapshot_index);
  auto state = make_averager_state(cfg);
  Snapshot snap{{}, snapshot_index, cfg};
  snap.data.reserve(cfg.length);
  for (std::size_t n = 0; n < cfg.window(); n += 2) {
    if (auto w = step_state_machine(state, {stream[n], stream[n + 1]})) {
      snap.data.push_back((*w)[0]);
      snap.data.push_back((*w)[1]);
    }
  }
  return snap;
}

/// Batch route: data[i] = sum_m shift_right(stream[P + m*L + i], K), with
/// 16-bit accumulation. Samples past P + M*L are never read.
inline Snapshot select_and_average(std::span<const ComplexSample> stream,
                                   const AveragerConfig& cfg, std::uint64_t snapshot_index = 0) {
  cfg.validate();
  if (stream.size() < cfg.window())
    throw TruncatedStreamError(stream.size(), cfg.window(), snapshot_index);
  Snapshot snap{std::vector<AccumSample>(cfg.length), snapshot_index, cfg};
  for (std::size_t m = 0; m < cfg.count; ++m) {
    const auto signal = stream.subspan(cfg.discard + m * cfg.length, cfg.length);
    for (std::size_t i = 0; i < cfg.length; ++i)
      snap.data[i] = accumulate(snap.data[i], shift_right(signal[i], cfg.shift));
  }
  return snap;
}

/// Apply the averager at every repetition boundary k * T_rep/T_s.
inline std::vector<Snapshot> run_receiver(std::span<const ComplexSample> stream,
                                          const SounderConfig& cfg, std::size_t n_snapshots) {
  cfg.validate();
  const std::size_t frame = cfg.frame_length();
  const auto acfg = cfg.averager();
  std::vector<Snapshot> out;
  out.reserve(n_snapshots);
  for (std::size_t k = 0; k < n_snapshots; ++k) {
    const std::size_t start = k * frame;
    const std::size_t available = stream.size() > start ? stream.size() - start : 0;
    if (available < acfg.window()) throw TruncatedStreamError(available, acfg.window(), k);
    out.push_back(select_and_average(stream.subspan(start), acfg, k));
  }
  return out;
}

}  // namespace uwbs
