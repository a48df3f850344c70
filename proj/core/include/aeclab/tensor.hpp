#pragma once

#include <Eigen/Core>

#include "aeclab/stft.hpp"

namespace aeclab {

// Sequences are time-major: rows = frames, cols = features. Row-major storage
// keeps each frame contiguous for the per-frame recurrent kernels.
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// T x F complex grid -> T x 2F reals, packed [real(F) | imag(F)].
template <class S>
MatX<S> pack_complex(const ComplexGrid& g) {
  const Eigen::Index T = g.rows(), F = g.cols();
  MatX<S> out(T, 2 * F);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      out(t, k) = static_cast<S>(g(t, k).real());
      out(t, F + k) = static_cast<S>(g(t, k).imag());
    }
  }
  return out;
}

/// Inverse of pack_complex.
template <class S>
ComplexGrid unpack_complex(const MatX<S>& m) {
  const Eigen::Index T = m.rows(), F = m.cols() / 2;
  ComplexGrid out(T, F);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      out(t, k) = {static_cast<double>(m(t, k)), static_cast<double>(m(t, F + k))};
    }
  }
  return out;
}

/// Model input packing: [mic_R | mic_I | far_R | far_I], T x 4F.
template <class S>
MatX<S> pack_model_input(const ComplexGrid& mic, const ComplexGrid& far) {
  const Eigen::Index T = mic.rows(), F = mic.cols();
  MatX<S> out(T, 4 * F);
  out.template block(0, 0, T, 2 * F) = pack_complex<S>(mic);
  out.template block(0, 2 * F, T, 2 * F) = pack_complex<S>(far);
  return out;
}

}  // namespace aeclab
