#pragma once

#include <Eigen/Core>
#include <complex>

#include "aeclab/signal.hpp"

namespace aeclab {

using ComplexGrid = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Time-frequency grid: frames (rows) x bins (cols), plus the framing that
/// produced it. 513 bins under the default FrameConfig.
struct ComplexSpectrogram {
  ComplexGrid grid;  // T x F
  FrameConfig cfg;

  Eigen::Index frames() const { return grid.rows(); }
  Eigen::Index bins() const { return grid.cols(); }
};

/// Frame count for a signal of length n: 1 + floor((n - frame_len) / hop).
inline Eigen::Index stft_frames(std::size_t n, const FrameConfig& cfg) {
  if (n < static_cast<std::size_t>(cfg.frame_len)) return 0;
  return 1 + static_cast<Eigen::Index>((n - cfg.frame_len) / cfg.hop);
}

/// Windowed, zero-padded short-time transform. Throws if the signal is
/// shorter than one frame.
ComplexSpectrogram stft(const TimeSignal& signal, const FrameConfig& cfg);

/// Weighted overlap-add synthesis (analysis window applied again on the
/// synthesis side, normalized per sample by the window-square sum). Output
/// length is (T-1)*hop + frame_len, the analysis coverage. Throws if cfg
/// does not match the spectrogram's stored config.
TimeSignal istft(const ComplexSpectrogram& spec, const FrameConfig& cfg);

/// Per-sample sum of squared synthesis windows for T frames at the given
/// config; the normalization profile used by istft and streaming synthesis.
std::vector<double> ola_norm_profile(Eigen::Index frames, const FrameConfig& cfg);

}  // namespace aeclab
