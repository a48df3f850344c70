#pragma once

#include "aeclab/stft.hpp"

namespace aeclab {

constexpr double kCirmEps = 1e-8;
constexpr double kCirmClip = 20.0;

/// Complex T x F mask. True masks are magnitude-clipped at construction;
/// estimated masks carry whatever the network produced.
struct ComplexMask {
  ComplexGrid grid;
  bool is_true_mask = false;

  Eigen::Index frames() const { return grid.rows(); }
  Eigen::Index bins() const { return grid.cols(); }
};

/// Nonnegative per-bin loss weights (SDW / ESW); entries lie in [1, bound].
using WeightMap = RealGrid;

/// Complex ideal ratio mask of S against Y:
///   M_R = (S_R Y_R + S_I Y_I) / (|Y|^2 + eps)
///   M_I = (S_I Y_R - S_R Y_I) / (|Y|^2 + eps)
/// Entries with |M| > mask_clip are radially scaled down to mask_clip.
ComplexMask true_cirm(const ComplexSpectrogram& S, const ComplexSpectrogram& Y,
                      double eps = kCirmEps, double mask_clip = kCirmClip);

/// Elementwise complex product M .* Y.
ComplexSpectrogram apply_mask(const ComplexMask& M, const ComplexSpectrogram& Y);

/// E = Y - S elementwise.
ComplexSpectrogram error_spectrum(const ComplexSpectrogram& Y, const ComplexSpectrogram& S);

/// Elementwise |M| = sqrt(M_R^2 + M_I^2).
RealGrid mask_modulus(const ComplexMask& M);

/// W = min(max(1, |M|)^n, bound); active (>1) only where clean speech
/// dominates (|M| > 1). Requires n > 1, bound > 1.
WeightMap sdw_weights(const ComplexMask& M_true, double n, double bound);

/// W = min(min(1, |M|)^n, bound) with n < 0; active only where the mixture
/// dominates (|M| < 1). |M| = 0 maps to bound. Requires n < 0, bound > 1.
WeightMap esw_weights(const ComplexMask& M_true, double n, double bound);

}  // namespace aeclab
