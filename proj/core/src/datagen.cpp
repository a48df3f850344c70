#include "aeclab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "aeclab/common.hpp"
#include "aeclab/filters.hpp"
#include "aeclab/sources.hpp"
#include "aeclab/wav.hpp"

namespace fs = std::filesystem;

namespace aeclab {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::DoubleTalk: return "double_talk";
    case Scenario::NearOnly: return "near_only";
    case Scenario::FarOnly: return "far_only";
  }
  return "double_talk";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "double_talk") return Scenario::DoubleTalk;
  if (s == "near_only") return Scenario::NearOnly;
  if (s == "far_only") return Scenario::FarOnly;
  throw ConfigError("unknown scenario: " + s);
}

namespace {

constexpr double kActiveFrameSec = 0.010;
constexpr double kActiveThresholdDbfs = -60.0;

/// Mean square over frames whose RMS exceeds -60 dBFS.
double active_power(const TimeSignal& x) {
  const auto frame = static_cast<std::size_t>(kActiveFrameSec * x.sample_rate);
  const double thresh2 = std::pow(10.0, kActiveThresholdDbfs / 10.0);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + frame <= x.size(); i += frame) {
    double e = 0.0;
    for (std::size_t j = i; j < i + frame; ++j) e += x.samples[j] * x.samples[j];
    if (e / frame > thresh2) {
      acc += e;
      count += frame;
    }
  }
  if (count == 0) throw NumericError("active_power: signal has no active frames");
  return acc / static_cast<double>(count);
}

TimeSignal scaled(const TimeSignal& x, double c) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x.samples[i] * c;
  return TimeSignal(std::move(out), x.sample_rate);
}

/// Scale so that 10*log10(ref_power / active_power(c * x)) lands on
/// target_db. The -60 dBFS activity threshold is absolute, so scaling can
/// move frames in or out of the active set; iterate to the fixed point.
double solve_ratio_scale(const TimeSignal& x, double ref_power, double target_db) {
  double c = std::sqrt(ref_power / (active_power(x) * std::pow(10.0, target_db / 10.0)));
  for (int it = 0; it < 12; ++it) {
    const double realized =
        10.0 * std::log10(ref_power / active_power(scaled(x, c)));
    const double err = realized - target_db;
    if (std::abs(err) < 5e-4) break;
    c *= std::pow(10.0, err / 20.0);
  }
  return c;
}

/// Snap every sample onto the float32 grid (the WAV storage grid).
void quantize_f32(TimeSignal& x) {
  for (auto& v : x.samples) v = static_cast<double>(static_cast<float>(v));
}

std::mt19937_64 engine_for(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

TimeSignal load_random_segment(const std::string& dir, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".wav") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .wav files in " + dir);
  std::uniform_int_distribution<std::size_t> pick(0, files.size() - 1);
  const std::string& chosen = files[pick(rng)];
  const auto sig = read_wav(chosen);
  if (sig.size() < n) {
    throw IoError("source shorter than one segment: " + chosen);
  }
  std::uniform_int_distribution<std::size_t> off(0, sig.size() - n);
  const std::size_t o = off(rng);
  return TimeSignal(std::vector<double>(sig.samples.begin() + o, sig.samples.begin() + o + n),
                    sig.sample_rate);
}

}  // namespace

ExampleParams sample_params(const GenConfig& cfg, std::uint64_t index) {
  auto rng = engine_for(cfg.seed, index, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ExampleParams p;
  p.index = index;
  const auto train_end = static_cast<std::uint64_t>(cfg.train_frac * cfg.count);
  const auto val_end =
      static_cast<std::uint64_t>((cfg.train_frac + cfg.val_frac) * cfg.count);
  p.split = index < train_end ? "train" : (index < val_end ? "val" : "test");

  const double u = unit(rng);
  p.scenario = u < cfg.near_only_prob
                   ? Scenario::NearOnly
                   : (u < cfg.near_only_prob + cfg.far_only_prob ? Scenario::FarOnly
                                                                 : Scenario::DoubleTalk);

  if (p.split == "test") {
    std::uniform_int_distribution<std::size_t> ser_pick(0, cfg.test_ser_choices.size() - 1);
    std::uniform_int_distribution<std::size_t> snr_pick(0, cfg.test_snr_choices.size() - 1);
    p.ser_db = cfg.test_ser_choices[ser_pick(rng)];
    p.snr_db = cfg.test_snr_choices[snr_pick(rng)];
  } else {
    p.ser_db = cfg.ser_mean_db + cfg.ser_std_db * gauss(rng);
    p.snr_db = cfg.snr_mean_db + cfg.snr_std_db * gauss(rng);
  }

  p.delay_ms = cfg.delay_max_ms * unit(rng);
  p.ir_gain_db = cfg.ir_gain_mean_db + cfg.ir_gain_std_db * gauss(rng);
  p.tilt_slope = -cfg.tilt_bound + 2.0 * cfg.tilt_bound * unit(rng);
  p.near_level_dbfs = -25.0 + 25.0 * unit(rng);
  p.far_level_dbfs = -25.0 + 25.0 * unit(rng);
  p.far_noise_snr_db = cfg.snr_mean_db + cfg.snr_std_db * gauss(rng);
  p.add_far_noise = true;

  p.room.room = {2.5 + 4.0 * unit(rng), 2.5 + 4.0 * unit(rng), 2.2 + 1.5 * unit(rng)};
  auto place = [&](double dim) { return 0.3 + (dim - 0.6) * unit(rng); };
  p.room.source = {place(p.room.room[0]), place(p.room.room[1]), place(p.room.room[2])};
  p.room.mic = {place(p.room.room[0]), place(p.room.room[1]), place(p.room.room[2])};
  p.room.absorption = cfg.absorption_min + (cfg.absorption_max - cfg.absorption_min) * unit(rng);
  p.room.max_order = cfg.rir_max_order;
  return p;
}

TimeSignal synth_echo_path(const TimeSignal& far_end, const TimeSignal& ir, double gain_db,
                           double delay_ms, double tilt_slope, const GenConfig& cfg) {
  const double gain = std::pow(10.0, gain_db / 20.0);
  TimeSignal echo = convolve(far_end, scaled(ir, gain));
  echo = biquad_filter(echo, BiquadKind::Highpass, cfg.highpass_hz);
  echo = biquad_filter(echo, BiquadKind::Bandpass, cfg.bandpass_low_hz, cfg.bandpass_high_hz);
  echo = spectral_tilt(echo, tilt_slope);
  return delay(echo, delay_ms);
}

MixtureExample mix_example(const TimeSignal& near, const TimeSignal& echo,
                           const TimeSignal& noise, const TimeSignal& far_ref, double ser_db,
                           double snr_db, Scenario scenario) {
  require(near.size() == echo.size() && near.size() == noise.size() &&
              near.size() == far_ref.size(),
          "mix_example: channel length mismatch");

  // Scale echo and noise against the (pre-zeroing) near end.
  const double p_near = active_power(near);
  const double echo_scale = solve_ratio_scale(echo, p_near, ser_db);
  const double noise_scale = solve_ratio_scale(noise, p_near, snr_db);

  MixtureExample ex;
  ex.near_end = near;
  ex.far_end = far_ref;
  ex.echo = scaled(echo, echo_scale);
  ex.noise = scaled(noise, noise_scale);
  ex.scenario = scenario;
  ex.ser_db = ser_db;
  ex.snr_db = snr_db;

  if (scenario == Scenario::NearOnly) {
    // The paper discards far-end and echo together for this scenario.
    std::fill(ex.echo.samples.begin(), ex.echo.samples.end(), 0.0);
    std::fill(ex.far_end.samples.begin(), ex.far_end.samples.end(), 0.0);
  } else if (scenario == Scenario::FarOnly) {
    std::fill(ex.near_end.samples.begin(), ex.near_end.samples.end(), 0.0);
  }

  quantize_f32(ex.near_end);
  quantize_f32(ex.far_end);
  quantize_f32(ex.echo);
  quantize_f32(ex.noise);

  ex.mic.sample_rate = near.sample_rate;
  ex.mic.samples.resize(near.size());
  for (std::size_t i = 0; i < near.size(); ++i) {
    ex.mic.samples[i] = ex.near_end.samples[i] + ex.echo.samples[i] + ex.noise.samples[i];
  }
  return ex;
}

MixtureExample render_example(const GenConfig& cfg, const ExampleParams& p) {
  const std::size_t n = cfg.segment_samples();

  auto near_rng = engine_for(cfg.seed, p.index, 1);
  auto far_rng = engine_for(cfg.seed, p.index, 2);
  auto noise_rng = engine_for(cfg.seed, p.index, 3);
  auto music_rng = engine_for(cfg.seed, p.index, 4);

  TimeSignal near = cfg.near_wav_dir.empty() ? speech_like(n, near_rng)
                                             : load_random_segment(cfg.near_wav_dir, n, near_rng);
  TimeSignal far = cfg.far_wav_dir.empty() ? speech_like(n, far_rng)
                                           : load_random_segment(cfg.far_wav_dir, n, far_rng);
  near = normalize_level(near, p.near_level_dbfs);
  far = normalize_level(far, p.far_level_dbfs);

  // Instrumental-music noise enters the far end before the echo path.
  if (p.add_far_noise) {
    const TimeSignal music = music_like(n, music_rng);
    const double p_far = active_power(far);
    const double p_music = active_power(music);
    const double c = std::sqrt(p_far / (p_music * std::pow(10.0, p.far_noise_snr_db / 10.0)));
    for (std::size_t i = 0; i < n; ++i) far.samples[i] += c * music.samples[i];
  }

  const TimeSignal ir = generate_rir(p.room, near.sample_rate);
  const TimeSignal echo = synth_echo_path(far, ir, p.ir_gain_db, p.delay_ms, p.tilt_slope, cfg);
  const TimeSignal noise = noise_like(n, noise_rng);

  MixtureExample ex = mix_example(near, echo, noise, far, p.ser_db, p.snr_db, p.scenario);
  ex.delay_ms = p.delay_ms;
  ex.ir_gain_db = p.ir_gain_db;
  ex.tilt_slope = p.tilt_slope;
  return ex;
}

nlohmann::json ManifestRow::to_json() const {
  return {
      {"id", id},
      {"index", params.index},
      {"split", params.split},
      {"scenario", to_string(params.scenario)},
      {"ser_db", params.ser_db},
      {"snr_db", params.snr_db},
      {"delay_ms", params.delay_ms},
      {"ir_gain_db", params.ir_gain_db},
      {"tilt_slope", params.tilt_slope},
      {"near_level_dbfs", params.near_level_dbfs},
      {"far_level_dbfs", params.far_level_dbfs},
      {"far_noise_snr_db", params.far_noise_snr_db},
      {"add_far_noise", params.add_far_noise},
      {"room", params.room.room},
      {"source", params.room.source},
      {"mic_pos", params.room.mic},
      {"absorption", params.room.absorption},
      {"max_order", params.room.max_order},
      {"near", near_path},
      {"far", far_path},
      {"echo", echo_path},
      {"noise", noise_path},
      {"mic", mic_path},
  };
}

ManifestRow ManifestRow::from_json(const nlohmann::json& j) {
  ManifestRow r;
  r.id = j.at("id").get<std::string>();
  r.params.index = j.at("index").get<std::uint64_t>();
  r.params.split = j.at("split").get<std::string>();
  r.params.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  r.params.ser_db = j.at("ser_db").get<double>();
  r.params.snr_db = j.at("snr_db").get<double>();
  r.params.delay_ms = j.at("delay_ms").get<double>();
  r.params.ir_gain_db = j.at("ir_gain_db").get<double>();
  r.params.tilt_slope = j.at("tilt_slope").get<double>();
  r.params.near_level_dbfs = j.at("near_level_dbfs").get<double>();
  r.params.far_level_dbfs = j.at("far_level_dbfs").get<double>();
  r.params.far_noise_snr_db = j.at("far_noise_snr_db").get<double>();
  r.params.add_far_noise = j.at("add_far_noise").get<bool>();
  r.params.room.room = j.at("room").get<std::array<double, 3>>();
  r.params.room.source = j.at("source").get<std::array<double, 3>>();
  r.params.room.mic = j.at("mic_pos").get<std::array<double, 3>>();
  r.params.room.absorption = j.at("absorption").get<double>();
  r.params.room.max_order = j.at("max_order").get<int>();
  r.near_path = j.at("near").get<std::string>();
  r.far_path = j.at("far").get<std::string>();
  r.echo_path = j.at("echo").get<std::string>();
  r.noise_path = j.at("noise").get<std::string>();
  r.mic_path = j.at("mic").get<std::string>();
  return r;
}

void Manifest::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("Manifest: cannot write " + path);
  for (const auto& r : rows) os << r.to_json().dump() << "\n";
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("Manifest: cannot open " + path);
  Manifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      m.rows.push_back(ManifestRow::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("Manifest: bad row: " + std::string(e.what()));
    }
  }
  return m;
}

std::vector<const ManifestRow*> Manifest::split(const std::string& name) const {
  std::vector<const ManifestRow*> out;
  for (const auto& r : rows) {
    if (r.params.split == name) out.push_back(&r);
  }
  return out;
}

Manifest make_corpus(const GenConfig& cfg, const std::string& out_dir, int threads) {
  require(cfg.count > 0, "make_corpus: count must be > 0");
  if (!cfg.near_wav_dir.empty() && !fs::is_directory(cfg.near_wav_dir)) {
    throw IoError("make_corpus: missing near-end source dir: " + cfg.near_wav_dir);
  }
  if (!cfg.far_wav_dir.empty() && !fs::is_directory(cfg.far_wav_dir)) {
    throw IoError("make_corpus: missing far-end source dir: " + cfg.far_wav_dir);
  }
  fs::create_directories(fs::path(out_dir) / "audio");

  Manifest manifest;
  manifest.base_dir = out_dir;
  manifest.rows.resize(cfg.count);

  parallel_for(cfg.count, threads, [&](std::size_t i) {
    const ExampleParams params = sample_params(cfg, i);
    const MixtureExample ex = render_example(cfg, params);

    ManifestRow row;
    row.params = params;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "ex%06zu", i);
    row.id = idbuf;
    auto rel = [&](const char* ch) { return "audio/" + row.id + "_" + ch + ".wav"; };
    row.near_path = rel("s");
    row.far_path = rel("x");
    row.echo_path = rel("d");
    row.noise_path = rel("v");
    row.mic_path = rel("y");
    write_wav((fs::path(out_dir) / row.near_path).string(), ex.near_end);
    write_wav((fs::path(out_dir) / row.far_path).string(), ex.far_end);
    write_wav((fs::path(out_dir) / row.echo_path).string(), ex.echo);
    write_wav((fs::path(out_dir) / row.noise_path).string(), ex.noise);
    write_wav((fs::path(out_dir) / row.mic_path).string(), ex.mic);
    manifest.rows[i] = std::move(row);
  });

  manifest.save((fs::path(out_dir) / "manifest.jsonl").string());
  return manifest;
}

MixtureExample load_example(const ManifestRow& row, const std::string& base_dir) {
  MixtureExample ex;
  ex.near_end = read_wav((fs::path(base_dir) / row.near_path).string());
  ex.far_end = read_wav((fs::path(base_dir) / row.far_path).string());
  ex.echo = read_wav((fs::path(base_dir) / row.echo_path).string());
  ex.noise = read_wav((fs::path(base_dir) / row.noise_path).string());
  ex.scenario = row.params.scenario;
  ex.ser_db = row.params.ser_db;
  ex.snr_db = row.params.snr_db;
  ex.delay_ms = row.params.delay_ms;
  ex.ir_gain_db = row.params.ir_gain_db;
  ex.tilt_slope = row.params.tilt_slope;
  ex.mic.sample_rate = ex.near_end.sample_rate;
  ex.mic.samples.resize(ex.near_end.size());
  for (std::size_t i = 0; i < ex.mic.samples.size(); ++i) {
    ex.mic.samples[i] = ex.near_end.samples[i] + ex.echo.samples[i] + ex.noise.samples[i];
  }
  return ex;
}

}  // namespace aeclab
