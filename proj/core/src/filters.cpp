#include "aeclab/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aeclab/common.hpp"
#include "aeclab/fft.hpp"

namespace aeclab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> run_biquad(const std::vector<double>& x, const Biquad& q) {
  // Direct form II transposed, zero initial state.
  std::vector<double> y(x.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double out = q.b[0] * x[n] + s1;
    s1 = q.b[1] * x[n] - q.a[0] * out + s2;
    s2 = q.b[2] * x[n] - q.a[1] * out;
    y[n] = out;
  }
  return y;
}

void check_cutoff(double f, int fs) {
  require(f > 0.0 && f < fs / 2.0, "biquad: cutoff must lie in (0, fs/2)");
}

}  // namespace

double Biquad::magnitude_at(double freq_hz, int sample_rate) const {
  const double w = 2.0 * kPi * freq_hz / sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  const std::complex<double> num = b[0] + b[1] * z1 + b[2] * z2;
  const std::complex<double> den = 1.0 + a[0] * z1 + a[1] * z2;
  return std::abs(num / den);
}

Biquad design_highpass(double cutoff_hz, int sample_rate) {
  check_cutoff(cutoff_hz, sample_rate);
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
  const double q = 1.0 / std::sqrt(2.0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b = {(1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0};
  f.a = {(-2.0 * c) / a0, (1.0 - alpha) / a0};
  return f;
}

Biquad design_lowpass(double cutoff_hz, int sample_rate) {
  check_cutoff(cutoff_hz, sample_rate);
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
  const double q = 1.0 / std::sqrt(2.0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b = {(1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0};
  f.a = {(-2.0 * c) / a0, (1.0 - alpha) / a0};
  return f;
}

TimeSignal biquad_filter(const TimeSignal& signal, BiquadKind kind, double f_low,
                         std::optional<double> f_high) {
  if (kind == BiquadKind::Highpass) {
    const Biquad hp = design_highpass(f_low, signal.sample_rate);
    return TimeSignal(run_biquad(signal.samples, hp), signal.sample_rate);
  }
  require(f_high.has_value(), "bandpass: f_high required");
  require(f_low < *f_high, "bandpass: f_low must be < f_high");
  const Biquad hp = design_highpass(f_low, signal.sample_rate);
  const Biquad lp = design_lowpass(*f_high, signal.sample_rate);
  return TimeSignal(run_biquad(run_biquad(signal.samples, hp), lp), signal.sample_rate);
}

TimeSignal convolve(const TimeSignal& signal, const TimeSignal& ir) {
  require(!ir.samples.empty(), "convolve: empty impulse response");
  require(signal.sample_rate == ir.sample_rate, "convolve: sample-rate mismatch");
  const std::size_t n = signal.size();
  const std::size_t k = ir.size();
  std::vector<double> out(n, 0.0);

  if (k <= 256 || n < 1024) {
    for (std::size_t i = 0; i < k; ++i) {
      const double h = ir.samples[i];
      if (h == 0.0) continue;
      for (std::size_t j = i; j < n; ++j) out[j] += h * signal.samples[j - i];
    }
    return TimeSignal(std::move(out), signal.sample_rate);
  }

  // Long kernels: one big FFT product, then truncate to n.
  std::size_t m = 1;
  while (m < n + k - 1) m <<= 1;
  Fft fft(static_cast<int>(m));
  std::vector<double> a(m, 0.0), b(m, 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(), a.begin());
  std::copy(ir.samples.begin(), ir.samples.end(), b.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(a.data(), fa.data());
  fft.forward(b.data(), fb.data());
  for (int i = 0; i < fft.bins(); ++i) fa[i] *= fb[i];
  std::vector<double> full(m);
  fft.inverse(fa.data(), full.data());
  std::copy(full.begin(), full.begin() + n, out.begin());
  return TimeSignal(std::move(out), signal.sample_rate);
}

TimeSignal delay(const TimeSignal& signal, double delay_ms) {
  require(delay_ms >= 0.0, "delay: delay_ms must be >= 0");
  const auto shift = static_cast<std::size_t>(std::llround(delay_ms * signal.sample_rate / 1000.0));
  std::vector<double> out(signal.size(), 0.0);
  if (shift < signal.size()) {
    std::copy(signal.samples.begin(), signal.samples.end() - shift, out.begin() + shift);
  }
  return TimeSignal(std::move(out), signal.sample_rate);
}

namespace {

constexpr int kTiltTaps = 1025;
constexpr int kTiltDesignSize = 2048;
constexpr double kTiltPivotHz = 1000.0;
constexpr double kTiltClampHz = 31.25;

std::vector<double> design_tilt_kernel(double slope, int fs) {
  const int n = kTiltDesignSize;
  Fft fft(n);
  std::vector<std::complex<double>> target(fft.bins());
  for (int kbin = 0; kbin < fft.bins(); ++kbin) {
    const double f = std::max(static_cast<double>(kbin) * fs / n, kTiltClampHz);
    const double gain_db = slope * std::log2(f / kTiltPivotHz);
    target[kbin] = std::pow(10.0, gain_db / 20.0);
  }
  std::vector<double> impulse(n);
  fft.inverse(target.data(), impulse.data());

  // Rotate the circular zero-phase impulse to a centered, windowed kernel.
  const int half = (kTiltTaps - 1) / 2;
  std::vector<double> kernel(kTiltTaps);
  for (int i = 0; i < kTiltTaps; ++i) {
    const int src = ((i - half) % n + n) % n;
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (kTiltTaps - 1));
    kernel[i] = impulse[src] * w;
  }

  // Pin the pivot to exactly 0 dB (kernel is symmetric, so H is real).
  double h_pivot = 0.0;
  for (int i = 0; i < kTiltTaps; ++i) {
    h_pivot += kernel[i] * std::cos(2.0 * kPi * kTiltPivotHz * (i - half) / fs);
  }
  for (double& v : kernel) v /= h_pivot;
  return kernel;
}

}  // namespace

TimeSignal spectral_tilt(const TimeSignal& signal, double slope) {
  require(slope >= -kTiltSlopeBound && slope <= kTiltSlopeBound,
          "spectral_tilt: slope out of [-8/3, 8/3] dB/octave");
  const auto kernel = design_tilt_kernel(slope, signal.sample_rate);
  const int half = (kTiltTaps - 1) / 2;
  const std::size_t n = signal.size();

  // Zero-phase application: full convolution, shifted back by the kernel center.
  std::size_t m = 1;
  while (m < n + kTiltTaps) m <<= 1;
  Fft fft(static_cast<int>(m));
  std::vector<double> a(m, 0.0), b(m, 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(), a.begin());
  std::copy(kernel.begin(), kernel.end(), b.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(a.data(), fa.data());
  fft.forward(b.data(), fb.data());
  for (int i = 0; i < fft.bins(); ++i) fa[i] *= fb[i];
  std::vector<double> full(m);
  fft.inverse(fa.data(), full.data());

  std::vector<double> out(signal.samples.size());
  for (std::size_t t = 0; t < n; ++t) out[t] = full[t + half];
  return TimeSignal(std::move(out), signal.sample_rate);
}

TimeSignal normalize_level(const TimeSignal& signal, double target_dbfs) {
  require(target_dbfs <= 0.0, "normalize_level: target_dbfs must be <= 0");
  double peak = 0.0;
  for (double v : signal.samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw NumericError("normalize_level: all-zero signal");
  const double scale = std::pow(10.0, target_dbfs / 20.0) / peak;
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal.samples[i] * scale;
  return TimeSignal(std::move(out), signal.sample_rate);
}

}  // namespace aeclab
