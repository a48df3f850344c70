#include "aeclab/signal.hpp"

#include <cmath>
#include <numbers>

#include "aeclab/common.hpp"

namespace aeclab {

void TimeSignal::validate() const {
  if (sample_rate <= 0) throw NumericError("TimeSignal: sample_rate must be > 0");
  for (double v : samples) {
    if (!std::isfinite(v)) throw NumericError("TimeSignal: non-finite sample");
  }
}

WindowKind window_from_string(const std::string& name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "rect") return WindowKind::Rect;
  throw ConfigError("unknown window: " + name);
}

std::string to_string(WindowKind w) {
  return w == WindowKind::Hann ? "hann" : "rect";
}

void FrameConfig::validate() const {
  require(frame_len > 0 && hop > 0, "FrameConfig: frame_len and hop must be > 0");
  require(hop <= frame_len, "FrameConfig: hop must be <= frame_len");
  require(fft_size >= frame_len, "FrameConfig: fft_size must be >= frame_len");
  const auto w = make_window(window, frame_len);
  if (cola_error(w, hop) > 1e-9) {
    throw ConfigError("FrameConfig: window does not satisfy COLA at hop " + std::to_string(hop));
  }
}

std::vector<double> make_window(WindowKind kind, int n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::Hann) {
    for (int i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    }
  }
  return w;
}

double cola_error(const std::vector<double>& window, int hop) {
  const int n = static_cast<int>(window.size());
  // Sum of shifted windows is hop-periodic; evaluate one period.
  std::vector<double> acc(hop, 0.0);
  for (int i = 0; i < hop; ++i) {
    for (int m = -(n / hop + 2); m <= n / hop + 2; ++m) {
      const int idx = i - m * hop;
      if (idx >= 0 && idx < n) acc[i] += window[idx];
    }
  }
  double mean = 0.0;
  for (double v : acc) mean += v;
  mean /= hop;
  double err = 0.0;
  for (double v : acc) err = std::max(err, std::abs(v - mean));
  return mean > 0 ? err / mean : 1.0;
}

}  // namespace aeclab
