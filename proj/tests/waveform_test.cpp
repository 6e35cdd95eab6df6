#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "oracles.hpp"
#include "uwbsounder/waveform.hpp"

using namespace uwbs;

TEST(GenerateZc, StartsAtUnity) {
  const auto x = generate_zc({813, 7});
  ASSERT_EQ(x.size(), 813u);
  EXPECT_NEAR(x[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(x[0].imag(), 0.0, 1e-15);
}

TEST(GenerateZc, ConstantModulus) {
  for (const auto& v : generate_zc({813, 7})) ASSERT_NEAR(std::abs(v), 1.0, 1e-12);
}

TEST(GenerateZc, MatchesClosedFormOddAndEven) {
  const auto odd = generate_zc({813, 7});
  for (std::size_t n = 0; n < 813; n += 37) {
    const double phase = -std::numbers::pi * 7.0 * n * (n + 1.0) / 813.0;
    EXPECT_NEAR(std::abs(odd[n] - std::polar(1.0, phase)), 0.0, 1e-9);
  }
  const auto even = generate_zc({64, 5});
  for (std::size_t n = 0; n < 64; ++n) {
    const double phase = -std::numbers::pi * 5.0 * n * n / 64.0;
    EXPECT_NEAR(std::abs(even[n] - std::polar(1.0, phase)), 0.0, 1e-12);
  }
}

TEST(GenerateZc, IdealCircularAutocorrelation) {
  const auto x = generate_zc({813, 7});
  const auto r = oracle::circular_autocorrelation(x);
  EXPECT_NEAR(std::abs(r[0]), 813.0, 1e-9);
  for (std::size_t lag = 1; lag < r.size(); ++lag)
    ASSERT_LT(std::abs(r[lag]), 1e-9 * 813.0) << "lag " << lag;
}

TEST(GenerateZc, RejectsBadRoots) {
  EXPECT_THROW(generate_zc({813, 3}), ConfigError);    // 813 = 3 * 271
  EXPECT_THROW(generate_zc({813, 271}), ConfigError);
  EXPECT_THROW(generate_zc({813, 0}), ConfigError);
  EXPECT_THROW(generate_zc({813, 813}), ConfigError);
  EXPECT_NO_THROW(generate_zc({813, 812}));
}

TEST(BuildSoundingSymbol, BandwidthOfReferenceConfig) {
  const auto wf = build_sounding_symbol(SounderConfig{});
  EXPECT_EQ(wf.occupied_count(), 813u);
  EXPECT_NEAR(wf.occupied_bandwidth_hz(500e6), 396.97e6, 0.01e6);
  EXPECT_DOUBLE_EQ(wf.occupied_fraction(), 813.0 / 1024.0);
}

TEST(BuildSoundingSymbol, CenteredPlacementIncludesDc) {
  const auto zc = generate_zc({813, 7});
  const auto wf = build_sounding_symbol(zc, 1024, 0.5);
  EXPECT_TRUE(wf.occupied_mask[0]);
  EXPECT_TRUE(wf.occupied_mask[406]);
  EXPECT_FALSE(wf.occupied_mask[407]);
  EXPECT_TRUE(wf.occupied_mask[1024 - 406]);
  EXPECT_FALSE(wf.occupied_mask[1024 - 407]);
  // zc[0] sits on the lowest frequency bin, zc[406] on DC.
  EXPECT_EQ(wf.freq_bins[1024 - 406], zc[0]);
  EXPECT_EQ(wf.freq_bins[0], zc[406]);
  EXPECT_EQ(wf.freq_bins[406], zc[812]);
  for (std::size_t k = 0; k < 1024; ++k) {
    if (wf.occupied_mask[k]) continue;
    ASSERT_EQ(wf.freq_bins[k], std::complex<double>{});
  }
}

TEST(BuildSoundingSymbol, ConstantModulusBins) {
  const auto wf = build_sounding_symbol(SounderConfig{});
  for (std::size_t k = 0; k < wf.fft_size; ++k) {
    if (!wf.occupied_mask[k]) continue;
    ASSERT_NEAR(std::abs(wf.freq_bins[k]), 1.0, 1e-12);
  }
}

TEST(BuildSoundingSymbol, PeakEqualsBackoff) {
  for (double backoff : {0.5, 0.25, 1.0 - 1.0 / 32768.0}) {
    SounderConfig cfg;
    cfg.backoff = backoff;
    const auto wf = build_sounding_symbol(cfg);
    double peak = 0.0;
    for (const auto& v : wf.time_signal)
      peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    EXPECT_NEAR(peak, backoff, 1e-12);
  }
}

TEST(BuildSoundingSymbol, TimeSignalIsScaledInverseDft) {
  const auto wf = build_sounding_symbol(SounderConfig{});
  auto expected = oracle::naive_dft(wf.freq_bins, +1);
  for (std::size_t n = 0; n < wf.fft_size; ++n) {
    expected[n] *= wf.amplitude_scale / static_cast<double>(wf.fft_size);
    ASSERT_NEAR(std::abs(expected[n] - wf.time_signal[n]), 0.0, 1e-12);
  }
}

TEST(BuildSoundingSymbol, Parseval) {
  const auto wf = build_sounding_symbol(SounderConfig{});
  double time_energy = 0.0;
  double freq_energy = 0.0;
  for (const auto& v : wf.time_signal) time_energy += std::norm(v / wf.amplitude_scale);
  for (const auto& v : wf.freq_bins) freq_energy += std::norm(v);
  EXPECT_NEAR(time_energy * wf.fft_size, freq_energy, 1e-9 * freq_energy);
}

TEST(BuildSoundingSymbol, SingleDcBinGivesConstantSignal) {
  const std::vector<std::complex<double>> one{{1.0, 0.0}};
  const auto wf = build_sounding_symbol(one, 8, 1.0);
  for (const auto& v : wf.time_signal) {
    EXPECT_NEAR(v.real(), 1.0, 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  }
}

TEST(BuildSoundingSymbol, RejectsOversizedSequence) {
  const auto zc = generate_zc({813, 7});
  EXPECT_THROW(build_sounding_symbol(zc, 512, 0.5), ConfigError);
  EXPECT_THROW(build_sounding_symbol(zc, 1024, 0.0), ConfigError);
}

TEST(BuildTxFrame, ReferenceConfigLayout) {
  const SounderConfig cfg;
  const auto wf = build_sounding_symbol(cfg);
  const auto frame = build_tx_frame(wf, cfg);
  ASSERT_EQ(frame.size(), 2'500'000u);
  EXPECT_EQ(cfg.tx_repetitions(), 66u);
  const auto symbol = wf.quantized();
  for (std::size_t n = 0; n < 66 * 1024; ++n) ASSERT_EQ(frame[n], symbol[n % 1024]);
  const auto zeros = static_cast<std::size_t>(
      std::count(frame.begin() + 66 * 1024, frame.end(), ComplexSample{}));
  EXPECT_EQ(zeros, 2'432'416u);
  EXPECT_EQ(zeros, cfg.skip_length());
  EXPECT_DOUBLE_EQ(frame.size() * cfg.sample_period_s, cfg.repetition_period_s);
}

TEST(BuildTxFrame, SingleRepetition) {
  SounderConfig cfg;
  cfg.average_count = 1;
  cfg.shift_bits = 0;
  cfg.discard = 0;
  const auto wf = build_sounding_symbol(cfg);
  const auto frame = build_tx_frame(wf, cfg);
  EXPECT_EQ(cfg.tx_repetitions(), 1u);
  EXPECT_EQ(std::count(frame.begin() + 1024, frame.end(), ComplexSample{}),
            static_cast<std::ptrdiff_t>(frame.size() - 1024));
}

TEST(BuildTxFrame, FrameIdentityOverConfigs) {
  // nonzero + zero = T_rep / T_s for a spread of valid configurations.
  for (std::size_t l : {64u, 128u, 1024u}) {
    for (std::size_t m : {1u, 3u, 8u}) {
      for (std::size_t p : {0u, 2u, 96u, 1024u}) {
        SounderConfig cfg;
        cfg.sound_length = l;
        cfg.average_count = m;
        cfg.shift_bits = 3;
        cfg.discard = p;
        cfg.zc = {l - 13, 7};
        cfg.repetition_period_s = 40e-6;  // 20000 samples
        const auto wf = build_sounding_symbol(cfg);
        const auto frame = build_tx_frame(wf, cfg);
        const std::size_t reps = (m * l + p + l - 1) / l;
        ASSERT_EQ(cfg.tx_repetitions(), reps);
        ASSERT_EQ(frame.size(), 20000u);
        for (std::size_t n = reps * l; n < frame.size(); ++n) ASSERT_EQ(frame[n], ComplexSample{});
      }
    }
  }
}

TEST(BuildTxFrame, RejectsFrameLongerThanPeriod) {
  SounderConfig cfg;
  cfg.repetition_period_s = 100e-6;  // 50000 samples < 66 * 1024
  const auto wf = build_sounding_symbol(SounderConfig{});
  EXPECT_THROW(build_tx_frame(wf, cfg), ConfigError);
}

TEST(BuildTxFrame, QuantizationNeverSaturatesBelowFullScale) {
  for (std::size_t root : {1u, 7u, 100u, 500u}) {
    SounderConfig cfg;
    cfg.zc.root = root;
    cfg.backoff = 1.0 - 1.0 / 32768.0;
    const auto wf = build_sounding_symbol(cfg);
    for (const auto& v : wf.time_signal) {
      bool clipped = false;
      (void)quantize(v, clipped);
      ASSERT_FALSE(clipped) << "root " << root;
    }
  }
}
