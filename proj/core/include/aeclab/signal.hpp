#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace aeclab {

constexpr int kSampleRate = 16000;

/// Mono sample sequence. Samples are kept in double precision throughout the
/// offline pipeline; 32-bit float is only a storage format (see wav.hpp).
struct TimeSignal {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  TimeSignal() = default;
  TimeSignal(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }

  /// Throws NumericError if any sample is not finite or sample_rate <= 0.
  void validate() const;
};

enum class WindowKind { Hann, Rect };

WindowKind window_from_string(const std::string& name);
std::string to_string(WindowKind w);

/// Analysis/synthesis framing. Defaults follow the 16 kHz geometry used
/// everywhere in this project: 512-sample (32 ms) frames, 128-sample (8 ms)
/// hop, zero-padded to a 1024-point transform -> 513 bins.
struct FrameConfig {
  int frame_len = 512;
  int hop = 128;
  int fft_size = 1024;
  WindowKind window = WindowKind::Hann;

  int bins() const { return fft_size / 2 + 1; }

  void validate() const;  // hop <= frame_len, fft_size >= frame_len, COLA at hop

  bool operator==(const FrameConfig&) const = default;
};

/// Periodic window of length n (periodic Hann satisfies COLA at hop n/4).
std::vector<double> make_window(WindowKind kind, int n);

/// Max deviation of sum_m w(i - m*hop) from its mean over one hop period.
/// Zero (to rounding) for COLA-compliant window/hop pairs.
double cola_error(const std::vector<double>& window, int hop);

}  // namespace aeclab
