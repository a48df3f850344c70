#include "aeclab/sources.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace aeclab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TimeSignal speech_like(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f0_dist(90.0, 220.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double f0_base = f0_dist(rng);
  const double vibrato_hz = 3.0 + 3.0 * unit(rng);
  const double vibrato_depth = 0.02 + 0.03 * unit(rng);
  const double formant1 = 400.0 + 500.0 * unit(rng);
  const double formant2 = 1200.0 + 1200.0 * unit(rng);

  // Syllable-rate segments: voiced / unvoiced burst / silence.
  std::vector<double> env(n, 0.0);
  std::vector<int> kind_at(n, 0);  // 0 silence, 1 voiced, 2 burst
  std::size_t pos = 0;
  while (pos < n) {
    const double r = unit(rng);
    const int kind = r < 0.55 ? 1 : (r < 0.75 ? 2 : 0);
    const auto seg = static_cast<std::size_t>((0.08 + 0.22 * unit(rng)) * kSampleRate);
    const std::size_t end = std::min(n, pos + seg);
    const std::size_t ramp = std::min<std::size_t>(320, (end - pos) / 4);
    for (std::size_t i = pos; i < end; ++i) {
      double e = 1.0;
      if (i - pos < ramp) e = static_cast<double>(i - pos) / ramp;
      if (end - i < ramp) e = static_cast<double>(end - i) / ramp;
      env[i] = kind == 0 ? 0.0 : e;
      kind_at[i] = kind;
    }
    pos = end;
  }

  constexpr int kHarmonics = 24;
  std::array<double, kHarmonics> harm_amp{};
  for (int k = 0; k < kHarmonics; ++k) {
    const double f = (k + 1) * f0_base;
    const double res1 = 1.0 / (1.0 + std::pow((f - formant1) / 250.0, 2.0));
    const double res2 = 0.7 / (1.0 + std::pow((f - formant2) / 350.0, 2.0));
    harm_amp[k] = (res1 + res2 + 0.05) / (k + 1);
  }

  std::vector<double> out(n, 0.0);
  double phase = 0.0;
  double burst_state = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double f0 = f0_base * (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_hz * t));
    phase += kTwoPi * f0 / kSampleRate;
    if (kind_at[i] == 1) {
      double v = 0.0;
      for (int k = 0; k < kHarmonics; ++k) {
        if ((k + 1) * f0 > kSampleRate / 2.0 - 200.0) break;
        v += harm_amp[k] * std::sin((k + 1) * phase);
      }
      out[i] = 0.35 * env[i] * v;
    } else if (kind_at[i] == 2) {
      // High-passed noise burst (fricative stand-in).
      const double w = gauss(rng);
      const double hp = w - burst_state;
      burst_state = 0.7 * burst_state + 0.3 * w;
      out[i] = 0.12 * env[i] * hp;
    }
  }
  return TimeSignal(std::move(out), kSampleRate);
}

TimeSignal music_like(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> semitone(0, 24);

  std::vector<double> out(n, 0.0);
  const int voices = 3 + static_cast<int>(unit(rng) * 2.0);
  for (int v = 0; v < voices; ++v) {
    const double base = 110.0 * std::pow(2.0, semitone(rng) / 12.0);
    const double start = unit(rng) * 0.4;
    const double dur = 0.8 + 2.5 * unit(rng);
    const auto i0 = static_cast<std::size_t>(start * kSampleRate);
    const auto i1 = std::min(n, i0 + static_cast<std::size_t>(dur * kSampleRate));
    const double attack = 0.05 * kSampleRate;
    for (std::size_t i = i0; i < i1; ++i) {
      const double t = static_cast<double>(i - i0);
      double e = std::min(1.0, t / attack) * std::exp(-t / (0.8 * kSampleRate));
      double s = 0.0;
      for (int p = 1; p <= 5; ++p) {
        if (p * base > kSampleRate / 2.0 - 200.0) break;
        s += std::sin(kTwoPi * p * base * t / kSampleRate) / (p * p);
      }
      out[i] += 0.2 * e * s;
    }
  }
  return TimeSignal(std::move(out), kSampleRate);
}

TimeSignal noise_like(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp = 0.92 * lp + 0.08 * gauss(rng);  // one-pole lowpass, room-rumble tilt
    out[i] = 2.0 * lp;
  }
  return TimeSignal(std::move(out), kSampleRate);
}

}  // namespace aeclab
