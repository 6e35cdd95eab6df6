#pragma once

// Capture file layout (all integers little-endian):
//
//   offset 0   4 bytes   magic "CSND"
//   offset 4   uint16    format version (1)
//   offset 6   uint32    header length H in bytes
//   offset 10  H bytes   header, UTF-8 JSON text
//   then       N records, each L samples of {int16 I, int16 Q}
//
// N and L are taken from the header; the payload must be exactly N*L*4 bytes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uwbsounder/averager.hpp"
#include "uwbsounder/channel.hpp"
#include "uwbsounder/config_io.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"
#include "uwbsounder/waveform.hpp"

namespace uwbs {

inline constexpr std::array<char, 4> kCaptureMagic{'C', 'S', 'N', 'D'};
inline constexpr std::uint16_t kCaptureVersion = 1;

struct CaptureHeader {
  SounderConfig config{};
  std::string channel_digest;
  std::string prng_algorithm{kNoiseAlgorithm};
  std::uint64_t seed{0};
  std::int64_t created_unix_s{0};  // 0 when unset
  std::int64_t timing_error_samples{0};
  std::uint64_t receiver_offset_samples{0};
  std::uint64_t saturated_samples{0};

  friend bool operator==(const CaptureHeader&, const CaptureHeader&) = default;
};

struct CaptureFile {
  CaptureHeader header;
  std::vector<Snapshot> snapshots;

  friend bool operator==(const CaptureFile&, const CaptureFile&) = default;
};

inline json header_to_json(const CaptureHeader& h, std::size_t snapshot_count) {
  const auto n = h.config.zc.length;
  return json{
      {"config", config_to_json(h.config)},
      {"snapshot_count", snapshot_count},
      {"channel_digest", h.channel_digest},
      {"prng", {{"algorithm", h.prng_algorithm}, {"seed", h.seed}}},
      {"created_unix_s", h.created_unix_s},
      {"receiver", {{"timing_error_samples", h.timing_error_samples},
                    {"offset_samples", h.receiver_offset_samples}}},
      {"saturated_samples", h.saturated_samples},
      {"occupied_band",
       {{"layout", "centered"},
        {"first_bin", first_occupied_bin(n)},
        {"count", n},
        {"includes_dc", true}}},
      {"sample_layout", "int16le I, int16le Q"},
  };
}

inline CaptureHeader header_from_json(const json& j, std::size_t& snapshot_count) {
  try {
    CaptureHeader h;
    h.config = config_from_json(j.at("config"));
    snapshot_count = j.at("snapshot_count").get<std::size_t>();
    h.channel_digest = j.at("channel_digest").get<std::string>();
    h.prng_algorithm = j.at("prng").at("algorithm").get<std::string>();
    h.seed = j.at("prng").at("seed").get<std::uint64_t>();
    h.created_unix_s = j.at("created_unix_s").get<std::int64_t>();
    h.timing_error_samples = j.at("receiver").at("timing_error_samples").get<std::int64_t>();
    h.receiver_offset_samples = j.at("receiver").at("offset_samples").get<std::uint64_t>();
    h.saturated_samples = j.at("saturated_samples").get<std::uint64_t>();
    return h;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed capture header: ") + e.what());
  }
}

inline void write_capture(std::ostream& out, const CaptureFile& cap) {
  const auto& cfg = cap.header.config;
  const std::string text = header_to_json(cap.header, cap.snapshots.size()).dump();
  if (text.size() > UINT32_MAX) throw FormatError("capture header too large");

  std::array<std::byte, 10> prefix{};
  std::memcpy(prefix.data(), kCaptureMagic.data(), 4);
  prefix[4] = static_cast<std::byte>(kCaptureVersion & 0xFFu);
  prefix[5] = static_cast<std::byte>(kCaptureVersion >> 8);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b) prefix[6 + b] = static_cast<std::byte>((len >> (8 * b)) & 0xFFu);
  out.write(reinterpret_cast<const char*>(prefix.data()), prefix.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  std::vector<std::byte> record(cfg.sound_length * kSampleBytes);
  for (const auto& snap : cap.snapshots) {
    if (snap.data.size() != cfg.sound_length)
      throw FormatError("snapshot " + std::to_string(snap.snapshot_index) + " has " +
                        std::to_string(snap.data.size()) + " samples, expected " +
                        std::to_string(cfg.sound_length));
    for (std::size_t i = 0; i < snap.data.size(); ++i)
      encode_sample(snap.data[i], record.data() + i * kSampleBytes);
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(record.size()));
  }
  if (!out) throw IoError("failed writing capture stream");
}

inline std::string capture_to_bytes(const CaptureFile& cap) {
  std::ostringstream os(std::ios::binary);
  write_capture(os, cap);
  return std::move(os).str();
}

inline CaptureFile read_capture(std::istream& in) {
  std::array<std::byte, 10> prefix{};
  in.read(reinterpret_cast<char*>(prefix.data()), prefix.size());
  if (in.gcount() != static_cast<std::streamsize>(prefix.size()))
    throw FormatError("capture shorter than its fixed prefix");
  if (std::memcmp(prefix.data(), kCaptureMagic.data(), 4) != 0)
    throw FormatError("bad capture magic (expected CSND)");
  const auto version = static_cast<std::uint16_t>(static_cast<unsigned>(prefix[4]) |
                                                  (static_cast<unsigned>(prefix[5]) << 8));
  if (version != kCaptureVersion)
    throw FormatError("unsupported capture version " + std::to_string(version));
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(prefix[6 + b]) << (8 * b);

  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (in.gcount() != static_cast<std::streamsize>(len))
    throw FormatError("capture header truncated");
  json hj;
  try {
    hj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("capture header is not valid JSON: ") + e.what());
  }
  std::size_t count = 0;
  CaptureFile cap;
  cap.header = header_from_json(hj, count);
  try {
    cap.header.config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("capture header carries an invalid config: ") + e.what());
  }

  const auto& cfg = cap.header.config;
  const std::vector<char> payload{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  const std::size_t record_bytes = cfg.sound_length * kSampleBytes;
  if (payload.size() != count * record_bytes)
    throw FormatError("capture payload is " + std::to_string(payload.size()) +
                      " bytes, header promises " + std::to_string(count) + " records of " +
                      std::to_string(record_bytes));
  const auto* bytes = reinterpret_cast<const std::byte*>(payload.data());
  cap.snapshots.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Snapshot snap{std::vector<AccumSample>(cfg.sound_length), k, cfg.averager()};
    for (std::size_t i = 0; i < cfg.sound_length; ++i)
      snap.data[i] = decode_sample<AccumSample>(bytes + k * record_bytes + i * kSampleBytes);
    cap.snapshots.push_back(std::move(snap));
  }
  return cap;
}

inline void save_capture(const std::filesystem::path& path, const CaptureFile& cap) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_capture(out, cap);
}

inline CaptureFile load_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_capture(in);
}

}  // namespace uwbs
