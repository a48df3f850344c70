#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace aeclab {

/// Real-to-complex FFT of a fixed size, backed by FFTW (double precision).
/// Each instance owns its plans and aligned buffers, so an instance may be
/// used by one thread at a time; create one per worker for parallel work.
/// Forward is unnormalized; inverse includes the 1/N factor.
class Fft {
 public:
  explicit Fft(int size);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return size_; }
  int bins() const { return size_ / 2 + 1; }

  /// in: size() reals -> out: bins() complex values.
  void forward(const double* in, std::complex<double>* out);
  /// in: bins() complex values -> out: size() reals (scaled by 1/size()).
  void inverse(const std::complex<double>* in, double* out);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

/// Brute-force DFT (O(N^2)); test oracle for Fft and spectral checks.
std::vector<std::complex<double>> dft_reference(const std::vector<double>& x);

}  // namespace aeclab
