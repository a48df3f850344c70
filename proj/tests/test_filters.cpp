#include <doctest.h>

#include <cmath>

#include "aeclab/filters.hpp"
#include "test_util.hpp"

using namespace aeclab;
using namespace aeclab::testutil;

namespace {

// Brute-force full convolution truncated to signal length.
std::vector<double> conv_oracle(const std::vector<double>& x, const std::vector<double>& h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (std::size_t k = 0; k < h.size() && k <= n; ++k) y[n] += h[k] * x[n - k];
  }
  return y;
}

double tone_gain_db(const TimeSignal& in, const TimeSignal& out) {
  const std::size_t lo = 2048, hi = in.size() - 2048;
  return 20.0 * std::log10(rms(out.samples, lo, hi) / rms(in.samples, lo, hi));
}

}  // namespace

TEST_CASE("highpass kills DC") {
  TimeSignal dc(std::vector<double>(16000, 1.0), kSampleRate);
  const auto y = biquad_filter(dc, BiquadKind::Highpass, 80.0);
  // After the transient the output must be essentially gone.
  CHECK(rms(y.samples, 4000, 16000) <= 1e-3 * rms(dc.samples, 4000, 16000));
}

TEST_CASE("biquad magnitude prediction matches measurement") {
  // Oracle: evaluate H(z) from the designed coefficients at the tone frequency.
  const auto hp = design_highpass(100.0, kSampleRate);
  const auto lp = design_lowpass(7500.0, kSampleRate);
  for (double f : {500.0, 1000.0, 3000.0}) {
    const double predicted = hp.magnitude_at(f, kSampleRate) * lp.magnitude_at(f, kSampleRate);
    const auto in = sine(f, 16000);
    const auto out = biquad_filter(in, BiquadKind::Bandpass, 100.0, 7500.0);
    const double measured = std::pow(10.0, tone_gain_db(in, out) / 20.0);
    CHECK(measured == doctest::Approx(predicted).epsilon(1e-3));
    // In-band response stays within +/- 1 dB of unity.
    CHECK(std::abs(20.0 * std::log10(measured)) <= 1.0);
  }
}

TEST_CASE("bandpass rejects inverted cutoffs; highpass validates range") {
  const auto x = sine(440.0, 4096);
  CHECK_THROWS(biquad_filter(x, BiquadKind::Bandpass, 7500.0, 100.0));
  CHECK_THROWS(biquad_filter(x, BiquadKind::Highpass, 0.0));
  CHECK_THROWS(biquad_filter(x, BiquadKind::Highpass, 8000.0));
}

TEST_CASE("filtering zero input yields zero output") {
  TimeSignal zero(std::vector<double>(4096, 0.0), kSampleRate);
  const auto y = biquad_filter(zero, BiquadKind::Bandpass, 100.0, 7500.0);
  for (double v : y.samples) CHECK(v == 0.0);
}

TEST_CASE("convolve: identity, shift, brute-force match") {
  const auto x = white_noise(256, 42);

  TimeSignal unit(std::vector<double>{1.0}, kSampleRate);
  const auto same = convolve(x, unit);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.samples[i] == x.samples[i]);

  TimeSignal shift(std::vector<double>{0.0, 1.0}, kSampleRate);
  const auto delayed = convolve(x, shift);
  CHECK(delayed.samples[0] == 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(delayed.samples[i] == x.samples[i - 1]);

  const auto ir = white_noise(32, 43);
  const auto got = convolve(x, ir);
  const auto want = conv_oracle(x.samples, ir.samples);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(got.samples[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("convolve FFT path matches brute force for long kernels") {
  const auto x = white_noise(4096, 44);
  const auto ir = white_noise(512, 45);
  const auto got = convolve(x, ir);
  const auto want = conv_oracle(x.samples, ir.samples);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(got.samples[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("convolve rejects empty ir") {
  const auto x = white_noise(64, 1);
  TimeSignal empty;
  CHECK_THROWS(convolve(x, empty));
}

TEST_CASE("delay semantics") {
  const auto x = white_noise(1024, 9);

  const auto same = delay(x, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.samples[i] == x.samples[i]);

  const auto d = delay(x, 8.0);  // 0.008 * 16000 = 128 samples
  CHECK(d.size() == x.size());
  for (int i = 0; i < 128; ++i) CHECK(d.samples[i] == 0.0);
  for (std::size_t i = 128; i < x.size(); ++i) CHECK(d.samples[i] == x.samples[i - 128]);

  // Energy accounting: output energy = input energy minus the truncated tail.
  double e_in = 0.0, e_out = 0.0, e_tail = 0.0;
  for (double v : x.samples) e_in += v * v;
  for (double v : d.samples) e_out += v * v;
  for (std::size_t i = x.size() - 128; i < x.size(); ++i) e_tail += x.samples[i] * x.samples[i];
  CHECK(e_out == doctest::Approx(e_in - e_tail).epsilon(1e-12));

  CHECK_THROWS(delay(x, -1.0));
}

TEST_CASE("spectral tilt: zero slope is identity") {
  const auto x = white_noise(8000, 17);
  const auto y = spectral_tilt(x, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(y.samples[i] - x.samples[i]) < 1e-9);
  }
}

TEST_CASE("spectral tilt: slope gain measured on tones") {
  const double slope = kTiltSlopeBound;  // +8/3 dB per octave
  const auto tone1k = sine(1000.0, 16000, 0.5);
  const auto tone4k = sine(4000.0, 16000, 0.5);
  const double g1 = tone_gain_db(tone1k, spectral_tilt(tone1k, slope));
  const double g4 = tone_gain_db(tone4k, spectral_tilt(tone4k, slope));
  CHECK(std::abs(g1) < 0.1);               // 0 dB at the pivot
  CHECK(g4 - g1 == doctest::Approx(2.0 * slope).epsilon(0.05));  // two octaves up
}

TEST_CASE("spectral tilt: opposite slopes cancel within 0.5 dB") {
  for (double f : {250.0, 1000.0, 4000.0}) {
    const auto in = sine(f, 16000, 0.5);
    const auto through = spectral_tilt(spectral_tilt(in, -kTiltSlopeBound), kTiltSlopeBound);
    CHECK(std::abs(tone_gain_db(in, through)) <= 0.5);
  }
}

TEST_CASE("spectral tilt rejects out-of-bounds slope") {
  const auto x = white_noise(2048, 2);
  CHECK_THROWS(spectral_tilt(x, 3.0));
  CHECK_THROWS(spectral_tilt(x, -2.7));
}

TEST_CASE("normalize_level") {
  const auto x = white_noise(4096, 23);

  const auto full = normalize_level(x, 0.0);
  double peak = 0.0;
  for (double v : full.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));

  const auto quiet = normalize_level(x, -20.0);
  peak = 0.0;
  for (double v : quiet.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(0.1).epsilon(1e-12));

  // Pure rescale: output / input is one constant.
  const double c = quiet.samples[0] / x.samples[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(quiet.samples[i] == doctest::Approx(c * x.samples[i]).epsilon(1e-12));
  }

  TimeSignal zero(std::vector<double>(128, 0.0), kSampleRate);
  CHECK_THROWS(normalize_level(zero, -10.0));
}
