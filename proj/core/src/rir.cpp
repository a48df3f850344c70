#include "aeclab/rir.hpp"

#include <cmath>
#include <numbers>

#include "aeclab/common.hpp"

namespace aeclab {

void RoomSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    require(room[a] > 0.0, "RoomSpec: nonpositive room dimension");
    require(source[a] > 0.0 && source[a] < room[a], "RoomSpec: source outside room");
    require(mic[a] > 0.0 && mic[a] < room[a], "RoomSpec: mic outside room");
  }
  require(absorption > 0.0 && absorption <= 1.0, "RoomSpec: absorption must be in (0, 1]");
  require(max_order >= 0, "RoomSpec: max_order must be >= 0");
  if (source == mic) throw NumericError("RoomSpec: source and mic coincide");
}

double rir_sinc_tap(double u) {
  const double w = static_cast<double>(kRirSincHalfWidth);
  if (std::abs(u) >= w) return 0.0;
  const double hann = 0.5 * (1.0 + std::cos(std::numbers::pi * u / w));
  if (u == 0.0) return hann;
  const double pu = std::numbers::pi * u;
  return hann * std::sin(pu) / pu;
}

TimeSignal generate_rir(const RoomSpec& spec, int sample_rate) {
  spec.validate();

  // Farthest image along each axis bounds the RIR length.
  double max_dist = 0.0;
  for (int a = 0; a < 3; ++a) {
    max_dist += std::pow((spec.max_order / 2 + 1) * 2.0 * spec.room[a] + spec.room[a], 2.0);
  }
  max_dist = std::sqrt(max_dist);
  const auto len = static_cast<std::size_t>(
      std::ceil(max_dist / kSpeedOfSound * sample_rate) + 2 * kRirSincHalfWidth + 2);
  std::vector<double> h(len, 0.0);

  const int nmax = spec.max_order / 2 + 1;
  for (int px = 0; px <= 1; ++px) {
    for (int py = 0; py <= 1; ++py) {
      for (int pz = 0; pz <= 1; ++pz) {
        for (int nx = -nmax; nx <= nmax; ++nx) {
          for (int ny = -nmax; ny <= nmax; ++ny) {
            for (int nz = -nmax; nz <= nmax; ++nz) {
              const int p[3] = {px, py, pz};
              const int n[3] = {nx, ny, nz};
              int reflections = 0;
              double d2 = 0.0;
              for (int a = 0; a < 3; ++a) {
                // Mirrored image: (1-2p)*src + 2nL; p=0 images carry 2|n|
                // reflections, p=1 images carry |2n-1|.
                const double img = (1 - 2 * p[a]) * spec.source[a] + 2.0 * n[a] * spec.room[a];
                reflections += p[a] == 0 ? 2 * std::abs(n[a]) : std::abs(2 * n[a] - 1);
                const double diff = img - spec.mic[a];
                d2 += diff * diff;
              }
              if (reflections > spec.max_order) continue;
              const double dist = std::sqrt(d2);
              const double amp = std::pow(spec.absorption, reflections) /
                                 (4.0 * std::numbers::pi * std::max(dist, 1e-2));
              const double tau = dist / kSpeedOfSound * sample_rate;
              const auto lo = static_cast<long>(std::ceil(tau)) - kRirSincHalfWidth;
              for (long i = std::max(lo, 0L);
                   i <= static_cast<long>(std::floor(tau)) + kRirSincHalfWidth; ++i) {
                if (i < static_cast<long>(h.size())) h[i] += amp * rir_sinc_tap(i - tau);
              }
            }
          }
        }
      }
    }
  }
  return TimeSignal(std::move(h), sample_rate);
}

}  // namespace aeclab
