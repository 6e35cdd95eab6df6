// Command-line front end: waveform generation, campaign simulation, channel
// estimation, calibration, parameter validation and capture inspection.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "uwbsounder/uwbsounder.hpp"

namespace fs = std::filesystem;
using namespace uwbs;

namespace {

struct LoadedConfig {
  SounderConfig config;
  PpsSchedule schedule;
};

LoadedConfig load_config(const std::optional<std::string>& path) {
  LoadedConfig out;
  if (path) {
    const auto j = load_json(*path);
    out.config = config_from_json(j);
    out.schedule = schedule_from_json(j, out.config);
  } else {
    out.schedule = make_schedule(out.config);
  }
  return out;
}

// Writes to `path` when given, else to stdout.
class OutputSink {
 public:
  explicit OutputSink(const std::optional<std::string>& path) {
    if (path) {
      file_.open(*path, std::ios::trunc);
      if (!file_) throw IoError("cannot write " + *path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
};

int cmd_generate(const std::optional<std::string>& config_path,
                 const std::optional<std::string>& out_path,
                 const std::optional<std::string>& frame_path, const std::string& format) {
  const auto cfg = load_config(config_path).config;
  cfg.validate();
  const auto fmt = parse_export_format(format);
  const auto wf = build_sounding_symbol(cfg);

  OutputSink sink(out_path);
  auto& out = sink.stream();
  out.precision(17);
  if (fmt == ExportFormat::csv) out << "index,occupied,bin_re,bin_im,time_re,time_im\n";
  for (std::size_t i = 0; i < wf.fft_size; ++i) {
    const auto b = wf.freq_bins[i];
    const auto t = wf.time_signal[i];
    if (fmt == ExportFormat::csv) {
      out << i << ',' << (wf.occupied_mask[i] ? 1 : 0) << ',' << b.real() << ',' << b.imag() << ','
          << t.real() << ',' << t.imag() << '\n';
    } else {
      out << json{{"index", i},          {"occupied", wf.occupied_mask[i]},
                  {"bin_re", b.real()},  {"bin_im", b.imag()},
                  {"time_re", t.real()}, {"time_im", t.imag()}}
                 .dump()
          << '\n';
    }
  }
  sink.finish();

  if (frame_path) {
    const auto frame = build_tx_frame(wf, cfg);
    std::ofstream bin(*frame_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot write " + *frame_path);
    std::vector<std::byte> bytes(frame.size() * kSampleBytes);
    for (std::size_t i = 0; i < frame.size(); ++i)
      encode_sample(frame[i], bytes.data() + i * kSampleBytes);
    bin.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!bin) throw IoError("write failed for " + *frame_path);
    std::cerr << "frame: " << cfg.tx_repetitions() << " sounding signals, "
              << frame.size() - cfg.tx_repetitions() * cfg.sound_length << " zero samples, "
              << frame.size() << " total\n";
  }
  return 0;
}

int cmd_simulate(const std::optional<std::string>& config_path, const std::string& channel_path,
                 std::optional<std::uint64_t> seed, std::optional<std::size_t> snapshots,
                 const std::string& out_path, std::int64_t timestamp) {
  auto loaded = load_config(config_path);
  if (snapshots) loaded.config.n_snapshots = *snapshots;
  auto model = channel_from_json(load_json(channel_path));
  if (seed) model.seed = *seed;
  auto cap = run_campaign(loaded.config, model, loaded.schedule);
  cap.header.created_unix_s = timestamp;
  save_capture(out_path, cap);
  std::cerr << "wrote " << cap.snapshots.size() << " snapshots to " << out_path << " ("
            << cap.header.saturated_samples << " saturated samples)\n";
  return 0;
}

std::vector<FrequencyResponse> estimate_all(const CaptureFile& cap, const SoundingWaveform& wf) {
  std::vector<FrequencyResponse> out;
  out.reserve(cap.snapshots.size());
  for (const auto& snap : cap.snapshots)
    out.push_back(estimate_response(snap, wf, cap.header.config));
  return out;
}

int cmd_estimate(const std::string& capture_path, const std::optional<std::string>& cal_path,
                 const std::optional<std::string>& out_path, const std::string& format,
                 const std::string& kind) {
  const auto fmt = parse_export_format(format);
  if (kind != "pdp" && kind != "cir" && kind != "response")
    throw ConfigError("unknown output kind '" + kind + "' (pdp, cir or response)");
  const auto cap = load_capture(capture_path);
  const auto& cfg = cap.header.config;
  const auto wf = build_sounding_symbol(cfg);
  std::optional<CalibrationProfile> cal;
  if (cal_path) cal = calibration_from_json(load_json(*cal_path));

  OutputSink sink(out_path);
  auto& out = sink.stream();
  if (kind == "pdp") write_pdp_header(out, fmt);
  if (kind == "cir") write_cir_header(out, fmt);
  if (kind == "response") write_response_header(out, fmt);

  std::size_t zeroed = 0;
  for (const auto& snap : cap.snapshots) {
    auto resp = estimate_response(snap, wf, cfg);
    if (cal) {
      auto res = apply_calibration(resp, *cal);
      zeroed += res.zeroed_bins.size();
      resp = std::move(res.response);
    }
    const auto idx = static_cast<std::size_t>(snap.snapshot_index);
    if (kind == "response") {
      write_response(out, fmt, idx, resp, cfg.sample_rate_hz());
      continue;
    }
    const auto cir = to_cir(resp);
    if (kind == "cir") {
      write_cir(out, fmt, idx, cir, cfg.sample_period_s);
    } else {
      write_pdp(out, fmt, idx, peak_relative(power_delay_profile(cir, cfg.sample_period_s)));
    }
  }
  sink.finish();
  if (zeroed > 0) std::cerr << zeroed << " bins zeroed by calibration threshold\n";
  return 0;
}

int cmd_calibrate(const std::string& capture_path, const std::string& out_path, double threshold) {
  const auto cap = load_capture(capture_path);
  if (cap.snapshots.empty()) throw ConfigError("calibration capture has no snapshots");
  const auto wf = build_sounding_symbol(cap.header.config);
  const auto responses = estimate_all(cap, wf);
  const auto cal = make_calibration(responses, threshold);
  save_json(out_path, calibration_to_json(cal));
  std::size_t weak = 0;
  for (std::size_t k = 0; k < cal.reference.bins.size(); ++k)
    if (cal.reference.occupied_mask[k] && std::abs(cal.reference.bins[k]) < threshold) ++weak;
  std::cerr << "calibration from " << responses.size() << " snapshots, " << weak
            << " occupied bins below threshold\n";
  return 0;
}

int cmd_validate(const std::optional<std::string>& config_path, const std::string& channel_path) {
  const auto cfg = load_config(config_path).config;
  cfg.validate();
  const auto model = channel_from_json(load_json(channel_path));
  const auto report = validate_config(cfg, model);
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"requirement", c.requirement},
                      {"passed", c.passed},
                      {"margin_samples", c.margin}});
  std::cout << json{{"passed", report.passed()}, {"checks", checks}}.dump(2) << '\n';
  return report.passed() ? 0 : exit_code(ErrorCategory::validation);
}

int cmd_report(const std::string& capture_path) {
  const auto cap = load_capture(capture_path);
  const auto& cfg = cap.header.config;
  json j = header_to_json(cap.header, cap.snapshots.size());
  j["reduction_factor"] = report_reduction(cfg);
  j["host_data_rate_bytes_per_s"] = host_data_rate(cfg);
  j["frame_length_samples"] = cfg.frame_length();
  j["skip_samples"] = cfg.skip_length();
  j["payload_bytes"] = cap.snapshots.size() * cfg.sound_length * kSampleBytes;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrawideband channel sounder model"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  std::string format = "csv";

  auto* gen = app.add_subcommand("generate", "Emit the sounding waveform and transmit frame");
  std::optional<std::string> frame_path;
  gen->add_option("--config", config_path, "Sounder config (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--out", out_path, "Waveform export (default stdout)");
  gen->add_option("--frame", frame_path, "Write one transmit frame as int16le I/Q");
  gen->add_option("--format", format, "csv or json-lines");

  auto* sim = app.add_subcommand("simulate", "Run a campaign and write a capture file");
  std::string channel_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> snapshots;
  std::string capture_out;
  std::int64_t timestamp = 0;
  sim->add_option("--config", config_path, "Sounder config (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--channel", channel_path, "Channel model (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override the channel noise seed");
  sim->add_option("--snapshots", snapshots, "Override the snapshot count");
  sim->add_option("--out", capture_out, "Capture file to write")->required();
  sim->add_option("--timestamp", timestamp, "Creation time recorded in the header (unix s)");

  auto* est = app.add_subcommand("estimate", "Capture -> responses, CIRs or PDPs");
  std::string capture_in;
  std::optional<std::string> cal_path;
  std::string kind = "pdp";
  est->add_option("capture", capture_in, "Capture file")->required()->check(CLI::ExistingFile);
  est->add_option("--calibration", cal_path, "Calibration profile (JSON)")
      ->check(CLI::ExistingFile);
  est->add_option("--out", out_path, "Export file (default stdout)");
  est->add_option("--format", format, "csv or json-lines");
  est->add_option("--kind", kind, "pdp, cir or response");

  auto* cal = app.add_subcommand("calibrate", "Back-to-back capture -> calibration profile");
  std::string cal_out;
  double threshold = 1e-3;
  cal->add_option("capture", capture_in, "Back-to-back capture")
      ->required()
      ->check(CLI::ExistingFile);
  cal->add_option("--out", cal_out, "Calibration profile to write")->required();
  cal->add_option("--threshold", threshold, "Minimum usable reference magnitude");

  auto* val = app.add_subcommand("validate", "Check L and P against a channel's delays");
  val->add_option("--config", config_path, "Sounder config (JSON)")->check(CLI::ExistingFile);
  val->add_option("--channel", channel_path, "Channel model (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("report", "Summarize a capture file");
  rep->add_option("capture", capture_in, "Capture file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(config_path, out_path, frame_path, format);
    if (*sim)
      return cmd_simulate(config_path, channel_path, seed, snapshots, capture_out, timestamp);
    if (*est) return cmd_estimate(capture_in, cal_path, out_path, format, kind);
    if (*cal) return cmd_calibrate(capture_in, cal_out, threshold);
    if (*val) return cmd_validate(config_path, channel_path);
    if (*rep) return cmd_report(capture_in);
  } catch (const SounderError& e) {
    std::cerr << json{{"error", category_name(e.category())}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 1;
}
