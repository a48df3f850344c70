#include "aeclab/stft.hpp"

#include <vector>

#include "aeclab/common.hpp"
#include "aeclab/fft.hpp"

namespace aeclab {

ComplexSpectrogram stft(const TimeSignal& signal, const FrameConfig& cfg) {
  if (signal.size() < static_cast<std::size_t>(cfg.frame_len)) {
    throw NumericError("stft: signal shorter than one frame");
  }
  const Eigen::Index T = stft_frames(signal.size(), cfg);
  const int F = cfg.bins();
  const auto window = make_window(cfg.window, cfg.frame_len);

  ComplexSpectrogram out;
  out.cfg = cfg;
  out.grid.resize(T, F);

  Fft fft(cfg.fft_size);
  std::vector<double> buf(cfg.fft_size, 0.0);
  std::vector<std::complex<double>> spec(F);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double* frame = signal.samples.data() + t * cfg.hop;
    for (int i = 0; i < cfg.frame_len; ++i) buf[i] = frame[i] * window[i];
    std::fill(buf.begin() + cfg.frame_len, buf.end(), 0.0);
    fft.forward(buf.data(), spec.data());
    for (int k = 0; k < F; ++k) out.grid(t, k) = spec[k];
  }
  return out;
}

std::vector<double> ola_norm_profile(Eigen::Index frames, const FrameConfig& cfg) {
  const auto window = make_window(cfg.window, cfg.frame_len);
  std::vector<double> norm((frames - 1) * cfg.hop + cfg.frame_len, 0.0);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int i = 0; i < cfg.frame_len; ++i) {
      norm[t * cfg.hop + i] += window[i] * window[i];
    }
  }
  return norm;
}

TimeSignal istft(const ComplexSpectrogram& spec, const FrameConfig& cfg) {
  if (!(spec.cfg == cfg)) throw NumericError("istft: FrameConfig mismatch");
  require(spec.bins() == cfg.bins(), "istft: bin count mismatch");
  const Eigen::Index T = spec.frames();
  const auto window = make_window(cfg.window, cfg.frame_len);
  const std::size_t out_len = (T - 1) * cfg.hop + cfg.frame_len;

  std::vector<double> acc(out_len, 0.0);
  Fft fft(cfg.fft_size);
  std::vector<std::complex<double>> bins(cfg.bins());
  std::vector<double> frame(cfg.fft_size);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int k = 0; k < cfg.bins(); ++k) bins[k] = spec.grid(t, k);
    fft.inverse(bins.data(), frame.data());
    double* dst = acc.data() + t * cfg.hop;
    for (int i = 0; i < cfg.frame_len; ++i) dst[i] += frame[i] * window[i];
  }

  const auto norm = ola_norm_profile(T, cfg);
  for (std::size_t i = 0; i < out_len; ++i) {
    if (norm[i] > 1e-12) acc[i] /= norm[i];
  }
  return TimeSignal(std::move(acc), kSampleRate);
}

}  // namespace aeclab
