#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "uwbsounder/campaign.hpp"
#include "uwbsounder/capture.hpp"
#include "uwbsounder/config_io.hpp"

using namespace uwbs;

namespace {

SounderConfig small_config() {
  SounderConfig cfg;
  cfg.sound_length = 64;
  cfg.discard = 128;
  cfg.average_count = 4;
  cfg.shift_bits = 2;
  cfg.zc = {51, 7};
  cfg.repetition_period_s = 2e-6;
  cfg.n_snapshots = 3;
  return cfg;
}

CaptureFile random_capture(std::mt19937_64& rng) {
  CaptureFile cap;
  auto& cfg = cap.header.config;
  cfg.sound_length = 2 * (1 + rng() % 64);
  cfg.zc = {2 + rng() % (cfg.sound_length - 1), 1};
  cfg.discard = 2 * (rng() % 100);
  cfg.shift_bits = static_cast<unsigned>(rng() % 16);
  cfg.average_count = 1 + rng() % std::min<std::size_t>(std::size_t{1} << cfg.shift_bits, 8);
  cfg.repetition_period_s = 1e-3;
  cfg.sample_period_s = 1e-8;  // 100000 samples
  cfg.center_frequency_hz = 1e9 + static_cast<double>(rng() % 1000) * 0.1;
  cfg.tx_power_dbm = -3.3;
  cfg.backoff = 0.1 + 0.8 * static_cast<double>(rng() % 1000) / 1000.0;
  cfg.n_snapshots = rng() % 5;
  cap.header.channel_digest = "fnv1a64:0123456789abcdef";
  cap.header.seed = rng();
  cap.header.created_unix_s = 1'700'000'000;
  cap.header.timing_error_samples = -static_cast<std::int64_t>(rng() % 50);
  cap.header.receiver_offset_samples = rng() % 100000;
  cap.header.saturated_samples = rng() % 7;
  for (std::size_t k = 0; k < cfg.n_snapshots; ++k) {
    Snapshot s{{}, k, cfg.averager()};
    for (const auto& v : oracle::random_samples(cfg.sound_length, rng()))
      s.data.push_back({v.i, v.q});
    cap.snapshots.push_back(std::move(s));
  }
  return cap;
}

}  // namespace

TEST(ConfigIo, DefaultsAreReferenceValues) {
  const auto cfg = config_from_json(json::object());
  EXPECT_EQ(cfg, SounderConfig{});
  EXPECT_EQ(cfg.sound_length, 1024u);
  EXPECT_EQ(cfg.discard, 2048u);
  EXPECT_EQ(cfg.average_count, 64u);
  EXPECT_EQ(cfg.shift_bits, 6u);
  EXPECT_DOUBLE_EQ(cfg.repetition_period_s, 5e-3);
  EXPECT_DOUBLE_EQ(cfg.sample_period_s, 2e-9);
  EXPECT_DOUBLE_EQ(cfg.center_frequency_hz, 5.725e9);
  EXPECT_DOUBLE_EQ(cfg.tx_power_dbm, 14.0);
}

TEST(ConfigIo, RoundTripAndUnknownKeys) {
  auto cfg = small_config();
  cfg.center_frequency_hz = 3.5e9 + 0.125;
  EXPECT_EQ(config_from_json(json::parse(config_to_json(cfg).dump())), cfg);
  EXPECT_THROW(config_from_json(json{{"sound_lenght_samples", 10}}), FormatError);
  EXPECT_THROW(config_from_json(json{{"shift_bits", "six"}}), FormatError);
}

TEST(ConfigIo, Schedule) {
  const json j{{"schedule", {{"rx_start_flank", 3}, {"timing_error_samples", -4}}}};
  const auto cfg = config_from_json(j);
  const auto s = schedule_from_json(j, cfg);
  EXPECT_EQ(s.rx_start_flank, 3);
  EXPECT_EQ(s.tx_start_flank, 0);
  EXPECT_EQ(s.timing_error, -4);
  EXPECT_DOUBLE_EQ(s.t_rep, 5e-3);
}

TEST(ChannelIo, RoundTripAndDigest) {
  const ChannelModel m{{{0, 1.0}, {50, {0.0, 0.5}}, {120, -0.25}},
                       0.01,
                       {{0.1, 0.2, 0.3}},
                       99};
  const auto back = channel_from_json(json::parse(channel_to_json(m).dump()));
  EXPECT_EQ(back, m);
  EXPECT_EQ(channel_digest(back), channel_digest(m));
  ChannelModel other = m;
  other.noise_std = 0.02;
  EXPECT_NE(channel_digest(other), channel_digest(m));
  EXPECT_EQ(channel_digest(m).rfind("fnv1a64:", 0), 0u);
}

TEST(ChannelIo, SortsTapsAndRejectsBadInput) {
  const json j{{"taps", json::array({{{"delay_samples", 9}, {"gain", {0.5, 0.0}}},
                                     {{"delay_samples", 2}, {"gain", {1.0, 0.0}}}})}};
  const auto m = channel_from_json(j);
  EXPECT_EQ(m.taps.front().delay, 2u);
  EXPECT_THROW(channel_from_json(json{{"taps", json::array()}}), ConfigError);
  EXPECT_THROW(channel_from_json(json{{"tap", json::array()}}), FormatError);
  EXPECT_THROW(
      channel_from_json(json{{"taps", json::array({{{"delay_samples", 0}, {"gain", 1.0}}})}}),
      FormatError);
}

TEST(CalibrationIo, RoundTrip) {
  CalibrationProfile cal;
  cal.min_magnitude_threshold = 2e-3;
  cal.reference.bins = {{1.0, 0.1}, {0.0, 0.0}, {-0.3, 1.0 / 3.0}};
  cal.reference.occupied_mask = {true, false, true};
  const auto back = calibration_from_json(json::parse(calibration_to_json(cal).dump()));
  EXPECT_EQ(back.reference.bins, cal.reference.bins);
  EXPECT_EQ(back.reference.occupied_mask, cal.reference.occupied_mask);
  EXPECT_EQ(back.min_magnitude_threshold, cal.min_magnitude_threshold);
  EXPECT_THROW(calibration_from_json(json{{"format", "other"}}), FormatError);
}

TEST(Capture, RoundTripProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cap = random_capture(rng);
    const std::string bytes = capture_to_bytes(cap);
    std::istringstream in(bytes);
    const auto back = read_capture(in);
    ASSERT_EQ(back, cap) << "trial " << trial;
    ASSERT_EQ(capture_to_bytes(back), bytes);
  }
}

TEST(Capture, PrefixLayout) {
  CaptureFile cap;
  cap.header.config.n_snapshots = 0;
  const auto bytes = capture_to_bytes(cap);
  ASSERT_GE(bytes.size(), 10u);
  EXPECT_EQ(bytes.substr(0, 4), "CSND");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0u);
  const std::uint32_t len = static_cast<unsigned char>(bytes[6]) |
                            (static_cast<unsigned char>(bytes[7]) << 8) |
                            (static_cast<unsigned char>(bytes[8]) << 16) |
                            (static_cast<unsigned char>(bytes[9]) << 24);
  EXPECT_EQ(bytes.size(), 10u + len);
  const auto header = json::parse(bytes.substr(10));
  EXPECT_EQ(header.at("occupied_band").at("first_bin"), -406);
  EXPECT_EQ(header.at("occupied_band").at("includes_dc"), true);
  EXPECT_EQ(header.at("prng").at("algorithm"), kNoiseAlgorithm);
}

TEST(Capture, RejectsCorruptFiles) {
  std::mt19937_64 rng(1);
  auto cap = random_capture(rng);
  while (cap.snapshots.empty()) cap = random_capture(rng);
  const auto bytes = capture_to_bytes(cap);

  auto read = [](const std::string& b) {
    std::istringstream in(b);
    return read_capture(in);
  };
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(read(bad), FormatError);
  bad = bytes;
  bad[4] = 2;
  EXPECT_THROW(read(bad), FormatError);
  EXPECT_THROW(read(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(read(bytes + "xxxx"), FormatError);
  EXPECT_THROW(read(bytes.substr(0, 7)), FormatError);
  bad = bytes;
  bad[12] = '#';
  EXPECT_THROW(read(bad), FormatError);
  EXPECT_THROW(load_capture("/nonexistent/capture.csnd"), IoError);
}

TEST(Reduction, ReferenceConfig) {
  const SounderConfig cfg;
  EXPECT_NEAR(report_reduction(cfg), 2'500'000.0 / 1024.0, 1e-9);
  EXPECT_NEAR(report_reduction(cfg), 2441.4, 0.05);
  EXPECT_DOUBLE_EQ(host_data_rate(cfg), 819'200.0);
}

TEST(Reduction, NoReductionBoundary) {
  SounderConfig cfg;
  cfg.average_count = 1;
  cfg.shift_bits = 0;
  cfg.discard = 0;
  cfg.repetition_period_s = 1024 * 2e-9;
  cfg.zc = {813, 7};
  EXPECT_DOUBLE_EQ(report_reduction(cfg), 1.0);
}

TEST(Reduction, ProportionalToRepetitionPeriod) {
  SounderConfig cfg;
  const double base = report_reduction(cfg);
  cfg.repetition_period_s *= 2.0;
  EXPECT_NEAR(report_reduction(cfg), 2.0 * base, 1e-9);
}

TEST(RunCampaign, PayloadSize) {
  SounderConfig cfg;
  cfg.n_snapshots = 10;
  const auto cap = run_campaign(cfg, ChannelModel{}, make_schedule(cfg));
  ASSERT_EQ(cap.snapshots.size(), 10u);
  const auto bytes = capture_to_bytes(cap);
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[6 + b])) << (8 * b);
  EXPECT_EQ(bytes.size() - 10 - len, 40'960u);
}

TEST(RunCampaign, ZeroSnapshots) {
  auto cfg = small_config();
  cfg.n_snapshots = 0;
  const auto cap = run_campaign(cfg, ChannelModel{}, make_schedule(cfg));
  EXPECT_TRUE(cap.snapshots.empty());
  std::istringstream in(capture_to_bytes(cap));
  EXPECT_EQ(read_capture(in), cap);
}

TEST(RunCampaign, DeterministicAndSeedSensitive) {
  const auto cfg = small_config();
  ChannelModel m{{{0, 0.7}, {5, {0.0, 0.2}}}, 0.02, {{0.013, 0.05, 0.0}}, 5};
  const auto a = capture_to_bytes(run_campaign(cfg, m, make_schedule(cfg)));
  const auto b = capture_to_bytes(run_campaign(cfg, m, make_schedule(cfg)));
  EXPECT_EQ(a, b);
  m.seed = 6;
  EXPECT_NE(capture_to_bytes(run_campaign(cfg, m, make_schedule(cfg))), a);
}

TEST(RunCampaign, NoiselessSnapshotsRepeat) {
  const auto cfg = small_config();
  const ChannelModel m{{{0, 0.7}, {5, {0.0, 0.2}}}, 0.0, {}, 5};
  const auto cap = run_campaign(cfg, m, make_schedule(cfg));
  for (const auto& s : cap.snapshots) EXPECT_EQ(s.data, cap.snapshots.front().data);
}

TEST(RunCampaign, MatchesFullStreamReceiver) {
  // The campaign synthesizes only the averaged window of each period; the
  // full-stream route through run_receiver must agree.
  const auto cfg = small_config();
  const ChannelModel m{{{0, 0.7}, {5, {0.0, 0.2}}, {11, -0.1}}, 0.0, {{0.0371, 0.05, 0.5}}, 5};
  const auto cap = run_campaign(cfg, m, make_schedule(cfg, 0, 0, -9));

  const auto wf = build_sounding_symbol(cfg);
  const auto frame = build_tx_frame(wf, cfg);
  const std::size_t f = frame.size();
  const std::size_t total = cfg.n_snapshots * f;
  const std::size_t offset = f - 9;
  // Periodic transmitter with one frame of history, continuous tones.
  std::vector<ComplexSample> tx(total + f);
  for (std::size_t j = 0; j < tx.size(); ++j) tx[j] = frame[(j + offset) % f];
  const auto rx = apply_channel(tx, m, -static_cast<std::int64_t>(f));
  const std::vector<ComplexSample> stream(rx.samples.begin() + static_cast<std::ptrdiff_t>(f),
                                          rx.samples.begin() + static_cast<std::ptrdiff_t>(f + total));
  EXPECT_EQ(run_receiver(stream, cfg, cfg.n_snapshots), cap.snapshots);
}

TEST(RunCampaign, ValidationFailureAborts) {
  const auto cfg = small_config();
  const ChannelModel too_long{{{0, 1.0}, {64, 0.1}}, 0.0, {}, 0};
  EXPECT_THROW(run_campaign(cfg, too_long, make_schedule(cfg)), ValidationError);
  const ChannelModel too_late{{{65, 1.0}}, 0.0, {}, 0};
  EXPECT_THROW(run_campaign(cfg, too_late, make_schedule(cfg)), ValidationError);
}

TEST(RunCampaign, FlankDependentPeriodRejected) {
  auto cfg = small_config();
  cfg.repetition_period_s = 7e-3;
  EXPECT_THROW(run_campaign(cfg, ChannelModel{}, make_schedule(cfg)), SchedulingError);
}

TEST(RunCampaign, ScheduleMustMatchConfig) {
  const auto cfg = small_config();
  EXPECT_THROW(run_campaign(cfg, ChannelModel{}, PpsSchedule{}), ConfigError);
}
