#include "aeclab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "aeclab/common.hpp"

namespace aeclab {

namespace {
// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

Fft::Fft(int size) : size_(size), impl_(std::make_unique<Impl>()) {
  require(size > 0, "Fft: size must be > 0");
  impl_->real = fftw_alloc_real(size);
  impl_->cplx = fftw_alloc_complex(size / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c_1d(size, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(size, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->cplx);
}

void Fft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(impl_->real, in, sizeof(double) * size_);
  fftw_execute(impl_->fwd);
  std::memcpy(out, impl_->cplx, sizeof(fftw_complex) * bins());
}

void Fft::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(impl_->cplx, in, sizeof(fftw_complex) * bins());
  fftw_execute(impl_->inv);
  const double scale = 1.0 / size_;
  for (int i = 0; i < size_; ++i) out[i] = impl_->real[i] * scale;
}

std::vector<std::complex<double>> dft_reference(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) * i / n;
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace aeclab
