#include "aeclab/mask.hpp"

#include <cmath>

#include "aeclab/common.hpp"

namespace aeclab {

namespace {
void check_same_shape(const ComplexGrid& a, const ComplexGrid& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericError(std::string(who) + ": shape mismatch");
  }
}
}  // namespace

ComplexMask true_cirm(const ComplexSpectrogram& S, const ComplexSpectrogram& Y,
                      double eps, double mask_clip) {
  check_same_shape(S.grid, Y.grid, "true_cirm");
  ComplexMask out;
  out.is_true_mask = true;
  out.grid.resize(S.grid.rows(), S.grid.cols());
  for (Eigen::Index t = 0; t < S.grid.rows(); ++t) {
    for (Eigen::Index k = 0; k < S.grid.cols(); ++k) {
      const auto s = S.grid(t, k);
      const auto y = Y.grid(t, k);
      const double denom = y.real() * y.real() + y.imag() * y.imag() + eps;
      double mr = (s.real() * y.real() + s.imag() * y.imag()) / denom;
      double mi = (s.imag() * y.real() - s.real() * y.imag()) / denom;
      const double mag = std::hypot(mr, mi);
      if (mask_clip > 0.0 && mag > mask_clip) {
        const double scale = mask_clip / mag;
        mr *= scale;
        mi *= scale;
      }
      out.grid(t, k) = {mr, mi};
    }
  }
  return out;
}

ComplexSpectrogram apply_mask(const ComplexMask& M, const ComplexSpectrogram& Y) {
  check_same_shape(M.grid, Y.grid, "apply_mask");
  ComplexSpectrogram out;
  out.cfg = Y.cfg;
  out.grid = M.grid.cwiseProduct(Y.grid);
  return out;
}

ComplexSpectrogram error_spectrum(const ComplexSpectrogram& Y, const ComplexSpectrogram& S) {
  check_same_shape(Y.grid, S.grid, "error_spectrum");
  ComplexSpectrogram out;
  out.cfg = Y.cfg;
  out.grid = Y.grid - S.grid;
  return out;
}

RealGrid mask_modulus(const ComplexMask& M) {
  return M.grid.cwiseAbs();
}

WeightMap sdw_weights(const ComplexMask& M_true, double n, double bound) {
  require(n > 1.0, "sdw_weights: n must be > 1");
  require(bound > 1.0, "sdw_weights: bound must be > 1");
  const RealGrid mag = mask_modulus(M_true);
  WeightMap w(mag.rows(), mag.cols());
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double m = mag(i);
    w(i) = m <= 1.0 ? 1.0 : std::min(std::pow(m, n), bound);
  }
  return w;
}

WeightMap esw_weights(const ComplexMask& M_true, double n, double bound) {
  require(n < 0.0, "esw_weights: n must be < 0");
  require(bound > 1.0, "esw_weights: bound must be > 1");
  const RealGrid mag = mask_modulus(M_true);
  WeightMap w(mag.rows(), mag.cols());
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double m = mag(i);
    if (m >= 1.0) {
      w(i) = 1.0;
    } else if (m == 0.0) {
      w(i) = bound;  // limit of the clipped expression as |M| -> 0+
    } else {
      w(i) = std::min(std::pow(m, n), bound);
    }
  }
  return w;
}

}  // namespace aeclab
