#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "aeclab/signal.hpp"

namespace aeclab {

enum class BiquadKind { Highpass, Bandpass };

/// One second-order section, normalized so a0 = 1.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 2> a{};  // a1, a2

  /// |H(e^{j 2 pi f / fs})|; used by tests to predict tone gains.
  double magnitude_at(double freq_hz, int sample_rate) const;
};

Biquad design_highpass(double cutoff_hz, int sample_rate);
Biquad design_lowpass(double cutoff_hz, int sample_rate);

/// Highpass at f_low, or bandpass as a highpass(f_low) + lowpass(f_high)
/// cascade (Butterworth Q). Cutoffs must lie in (0, fs/2), f_low < f_high.
TimeSignal biquad_filter(const TimeSignal& signal, BiquadKind kind, double f_low,
                         std::optional<double> f_high = std::nullopt);

/// Full linear convolution truncated to the input length, so mixture
/// components stay aligned. Throws on empty ir or sample-rate mismatch.
TimeSignal convolve(const TimeSignal& signal, const TimeSignal& ir);

/// Prepends round(delay_ms * fs / 1000) zeros, truncates the tail to
/// preserve length. delay_ms must be >= 0.
TimeSignal delay(const TimeSignal& signal, double delay_ms);

constexpr double kTiltSlopeBound = 8.0 / 3.0;  // dB per octave

/// Spectral tilt: zero-phase FIR whose magnitude follows
/// 10^(slope * log2(f / 1kHz) / 20) (0 dB at the 1 kHz pivot, clamped below
/// ~31 Hz). slope in [-8/3, +8/3] dB/octave.
TimeSignal spectral_tilt(const TimeSignal& signal, double slope_db_per_octave);

/// Scales so the peak absolute sample equals 10^(target_dbfs / 20).
/// target_dbfs <= 0; throws on an all-zero signal.
TimeSignal normalize_level(const TimeSignal& signal, double target_dbfs);

}  // namespace aeclab
