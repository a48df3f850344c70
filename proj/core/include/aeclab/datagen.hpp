#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "aeclab/rir.hpp"
#include "aeclab/signal.hpp"

namespace aeclab {

enum class Scenario { DoubleTalk, NearOnly, FarOnly };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Aligned mixture channels. The invariant y = s + d + v holds sample-exact:
/// channels are finalized on the float32 grid and y is their double sum, so
/// both the in-memory example and a reload from float32 WAVs preserve it.
struct MixtureExample {
  TimeSignal near_end;  // s
  TimeSignal far_end;   // x (model reference input)
  TimeSignal echo;      // d
  TimeSignal noise;     // v
  TimeSignal mic;       // y = s + d + v

  Scenario scenario = Scenario::DoubleTalk;
  double ser_db = 0.0;
  double snr_db = 0.0;
  double delay_ms = 0.0;
  double ir_gain_db = 0.0;
  double tilt_slope = 0.0;
};

/// Everything sampled for one example; a manifest row serializes this plus
/// file paths, and regeneration from it is byte-identical.
struct ExampleParams {
  std::uint64_t index = 0;
  std::string split;  // train | val | test
  Scenario scenario = Scenario::DoubleTalk;
  double ser_db = 0.0;
  double snr_db = 0.0;
  double delay_ms = 0.0;
  double ir_gain_db = 0.0;
  double tilt_slope = 0.0;
  double near_level_dbfs = -12.0;
  double far_level_dbfs = -12.0;
  double far_noise_snr_db = 0.0;
  bool add_far_noise = true;
  RoomSpec room;
};

struct GenConfig {
  std::uint64_t seed = 1;
  int count = 32;
  double train_frac = 0.70;
  double val_frac = 0.15;
  double segment_seconds = 4.0;
  double near_only_prob = 0.2;
  double far_only_prob = 0.2;
  double ser_mean_db = -10.0;
  double ser_std_db = 10.0;
  double snr_mean_db = 0.0;
  double snr_std_db = 10.0;
  std::vector<double> test_ser_choices{0.0, 5.0, 10.0, 15.0};
  std::vector<double> test_snr_choices{10.0, 15.0, 20.0, 25.0, 30.0};
  double ir_gain_mean_db = -10.0;
  double ir_gain_std_db = 3.0;
  double delay_max_ms = 100.0;
  double tilt_bound = 8.0 / 3.0;
  double highpass_hz = 80.0;
  double bandpass_low_hz = 100.0;
  double bandpass_high_hz = 7500.0;
  int rir_max_order = 6;
  double absorption_min = 0.6;
  double absorption_max = 0.95;
  // Optional user-supplied audio; built-in synthetic sources when empty.
  std::string near_wav_dir;
  std::string far_wav_dir;

  std::size_t segment_samples() const {
    return static_cast<std::size_t>(segment_seconds * kSampleRate);
  }
};

/// Deterministic parameter draw for example `index` under `seed`; the
/// engine is derived from (seed, index), so parallel and serial corpus
/// generation are byte-identical.
ExampleParams sample_params(const GenConfig& cfg, std::uint64_t index);

/// Echo path: gain -> RIR convolution -> highpass -> bandpass -> spectral
/// tilt -> transmission delay.
TimeSignal synth_echo_path(const TimeSignal& far_end, const TimeSignal& ir, double gain_db,
                           double delay_ms, double tilt_slope, const GenConfig& cfg);

/// Scales echo to the target SER and noise to the target SNR (active-region
/// power against the near end), applies scenario zeroing, finalizes all
/// channels on the float32 grid, and forms y = s + d + v.
MixtureExample mix_example(const TimeSignal& near, const TimeSignal& echo,
                           const TimeSignal& noise, const TimeSignal& far_ref, double ser_db,
                           double snr_db, Scenario scenario);

/// Renders one example end to end from its sampled parameters.
MixtureExample render_example(const GenConfig& cfg, const ExampleParams& params);

struct ManifestRow {
  ExampleParams params;
  std::string id;
  std::string near_path, far_path, echo_path, noise_path, mic_path;

  nlohmann::json to_json() const;
  static ManifestRow from_json(const nlohmann::json& j);
};

struct Manifest {
  std::vector<ManifestRow> rows;
  std::string base_dir;

  void save(const std::string& path) const;  // line-delimited JSON records
  static Manifest load(const std::string& path);
  std::vector<const ManifestRow*> split(const std::string& name) const;
};

/// Generates `cfg.count` 4-second examples, writes the five channel WAVs per
/// example (float32) plus manifest.jsonl, and returns the manifest.
Manifest make_corpus(const GenConfig& cfg, const std::string& out_dir, int threads = 1);

/// Loads the channels of one manifest row; y is always reconstructed as
/// s + d + v from the stored channels.
MixtureExample load_example(const ManifestRow& row, const std::string& base_dir);

}  // namespace aeclab
