#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "aeclab/datagen.hpp"
#include "aeclab/filters.hpp"
#include "aeclab/sources.hpp"
#include "aeclab/wav.hpp"
#include "test_util.hpp"

using namespace aeclab;
namespace fs = std::filesystem;

namespace {

double power_db_ratio(const TimeSignal& a, const TimeSignal& b) {
  double pa = 0.0, pb = 0.0;
  for (double v : a.samples) pa += v * v;
  for (double v : b.samples) pb += v * v;
  return 10.0 * std::log10(pa / pb);
}

GenConfig tiny_config() {
  GenConfig cfg;
  cfg.count = 6;
  cfg.seed = 11;
  cfg.rir_max_order = 3;  // keep the test corpus cheap
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("synthetic sources are deterministic and nontrivial") {
  std::mt19937_64 a(5), b(5);
  const auto s1 = speech_like(16000, a);
  const auto s2 = speech_like(16000, b);
  CHECK(s1.samples == s2.samples);
  double peak = 0.0;
  for (double v : s1.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak > 0.01);
  s1.validate();

  std::mt19937_64 c(6);
  music_like(16000, c).validate();
  std::mt19937_64 d(7);
  noise_like(16000, d).validate();
}

TEST_CASE("synth_echo_path: clean pass-through pieces") {
  GenConfig cfg;
  const auto far = testutil::white_noise(16000, 3);
  TimeSignal unit_ir(std::vector<double>{1.0}, kSampleRate);

  // gain -20 dB scales the echo by 10x down relative to 0 dB.
  const auto e0 = synth_echo_path(far, unit_ir, 0.0, 0.0, 0.0, cfg);
  const auto e20 = synth_echo_path(far, unit_ir, -20.0, 0.0, 0.0, cfg);
  CHECK(power_db_ratio(e0, e20) == doctest::Approx(20.0).epsilon(1e-9));

  // Tone through the full chain: level predictable from the filter responses.
  const double f = 1000.0;
  const auto tone = testutil::sine(f, 16000, 0.5);
  const auto through = synth_echo_path(tone, unit_ir, -6.0, 0.0, 0.0, cfg);
  const double hp = design_highpass(cfg.highpass_hz, kSampleRate).magnitude_at(f, kSampleRate);
  const double bp_hp = design_highpass(cfg.bandpass_low_hz, kSampleRate).magnitude_at(f, kSampleRate);
  const double bp_lp = design_lowpass(cfg.bandpass_high_hz, kSampleRate).magnitude_at(f, kSampleRate);
  const double predicted_db = -6.0 + 20.0 * std::log10(hp * bp_hp * bp_lp);
  const double measured_db =
      20.0 * std::log10(testutil::rms(through.samples, 4000, 12000) /
                        testutil::rms(tone.samples, 4000, 12000));
  CHECK(std::abs(measured_db - predicted_db) <= 1.0);
}

TEST_CASE("mix_example hits SER and SNR targets exactly") {
  std::mt19937_64 rng(21);
  const std::size_t n = 32000;
  const auto near = speech_like(n, rng);
  const auto echo = speech_like(n, rng);
  const auto noise = noise_like(n, rng);
  const auto far = speech_like(n, rng);

  for (double ser : {0.0, 10.0}) {
    const auto ex = mix_example(near, echo, noise, far, ser, 20.0, Scenario::DoubleTalk);
    // Re-measure with an independent power estimate on active frames.
    const auto active_pow = [](const TimeSignal& x) {
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = 0; i + 160 <= x.size(); i += 160) {
        double e = 0.0;
        for (std::size_t j = i; j < i + 160; ++j) e += x.samples[j] * x.samples[j];
        if (e / 160 > 1e-6) {
          acc += e;
          cnt += 160;
        }
      }
      return acc / cnt;
    };
    const double realized_ser =
        10.0 * std::log10(active_pow(ex.near_end) / active_pow(ex.echo));
    CHECK(std::abs(realized_ser - ser) <= 0.01);
    const double realized_snr =
        10.0 * std::log10(active_pow(ex.near_end) / active_pow(ex.noise));
    CHECK(std::abs(realized_snr - 20.0) <= 0.01);

    // Eq 1 sample-exact.
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ex.mic.samples[i] ==
            ex.near_end.samples[i] + ex.echo.samples[i] + ex.noise.samples[i]);
    }
  }
}

TEST_CASE("scenario zeroing") {
  std::mt19937_64 rng(22);
  const std::size_t n = 16000;
  const auto near = speech_like(n, rng);
  const auto echo = speech_like(n, rng);
  const auto noise = noise_like(n, rng);
  const auto far = speech_like(n, rng);

  const auto far_only = mix_example(near, echo, noise, far, 5.0, 15.0, Scenario::FarOnly);
  for (double v : far_only.near_end.samples) CHECK(v == 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(far_only.mic.samples[i] == far_only.echo.samples[i] + far_only.noise.samples[i]);
  }

  const auto near_only = mix_example(near, echo, noise, far, 5.0, 15.0, Scenario::NearOnly);
  for (double v : near_only.echo.samples) CHECK(v == 0.0);
  for (double v : near_only.far_end.samples) CHECK(v == 0.0);

  TimeSignal silence(std::vector<double>(n, 0.0), kSampleRate);
  CHECK_THROWS(mix_example(silence, echo, noise, far, 5.0, 15.0, Scenario::DoubleTalk));
}

TEST_CASE("corpus: segment size, determinism, manifest round-trip") {
  const GenConfig cfg = tiny_config();
  TempDir dir_a("aeclab_corpus_a");
  TempDir dir_b("aeclab_corpus_b");

  const auto m1 = make_corpus(cfg, dir_a.path.string(), 1);
  const auto m2 = make_corpus(cfg, dir_b.path.string(), 2);  // different thread count
  REQUIRE(m1.rows.size() == 6);

  for (std::size_t i = 0; i < m1.rows.size(); ++i) {
    // Byte-identical audio regardless of generation parallelism.
    for (auto sel : {&ManifestRow::near_path, &ManifestRow::far_path, &ManifestRow::echo_path,
                     &ManifestRow::noise_path, &ManifestRow::mic_path}) {
      std::ifstream fa(dir_a.path / (m1.rows[i].*sel), std::ios::binary);
      std::ifstream fb(dir_b.path / (m2.rows[i].*sel), std::ios::binary);
      const std::string ba((std::istreambuf_iterator<char>(fa)), {});
      const std::string bb((std::istreambuf_iterator<char>(fb)), {});
      CHECK(ba == bb);
      CHECK(!ba.empty());
    }
  }

  const auto loaded = Manifest::load((dir_a.path / "manifest.jsonl").string());
  REQUIRE(loaded.rows.size() == m1.rows.size());

  for (const auto& row : loaded.rows) {
    const auto ex = load_example(row, dir_a.path.string());
    CHECK(ex.mic.size() == cfg.segment_samples());
    CHECK(ex.mic.size() == 64000);
    // Eq 1 on reloaded audio.
    for (std::size_t i = 0; i < ex.mic.size(); ++i) {
      CHECK(ex.mic.samples[i] ==
            ex.near_end.samples[i] + ex.echo.samples[i] + ex.noise.samples[i]);
    }
    // Regeneration from the manifest row alone reproduces the channels.
    const auto regen = render_example(cfg, row.params);
    CHECK(regen.near_end.samples == ex.near_end.samples);
    CHECK(regen.echo.samples == ex.echo.samples);
    CHECK(regen.noise.samples == ex.noise.samples);
  }
}

TEST_CASE("scenario frequencies follow the configured probabilities") {
  GenConfig cfg;
  cfg.count = 1000;
  cfg.seed = 42;
  int near_only = 0, far_only = 0;
  for (int i = 0; i < cfg.count; ++i) {
    const auto p = sample_params(cfg, i);
    near_only += p.scenario == Scenario::NearOnly;
    far_only += p.scenario == Scenario::FarOnly;
  }
  CHECK(std::abs(near_only / 1000.0 - 0.20) <= 0.03);
  CHECK(std::abs(far_only / 1000.0 - 0.20) <= 0.03);
}

TEST_CASE("test split draws SER from {0,5,10,15}") {
  GenConfig cfg;
  cfg.count = 40;
  cfg.seed = 9;
  bool saw_test = false;
  for (int i = 0; i < cfg.count; ++i) {
    const auto p = sample_params(cfg, i);
    if (p.split != "test") continue;
    saw_test = true;
    const bool ok = p.ser_db == 0.0 || p.ser_db == 5.0 || p.ser_db == 10.0 || p.ser_db == 15.0;
    CHECK(ok);
    const bool snr_ok = p.snr_db == 10.0 || p.snr_db == 15.0 || p.snr_db == 20.0 ||
                        p.snr_db == 25.0 || p.snr_db == 30.0;
    CHECK(snr_ok);
  }
  CHECK(saw_test);
}

TEST_CASE("wav round-trip preserves float32 samples") {
  TempDir dir("aeclab_wav");
  const auto x = testutil::white_noise(1000, 3);
  TimeSignal q = x;
  for (auto& v : q.samples) v = static_cast<double>(static_cast<float>(v));

  const auto fpath = (dir.path / "f32.wav").string();
  write_wav(fpath, q, WavFormat::Float32);
  const auto back = read_wav(fpath);
  CHECK(back.samples == q.samples);

  const auto ppath = (dir.path / "p16.wav").string();
  write_wav(ppath, q, WavFormat::Pcm16);
  const auto pcm = read_wav(ppath);
  REQUIRE(pcm.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(std::abs(pcm.samples[i] - q.samples[i]) <= 1.0 / 32768.0);
  }
}
