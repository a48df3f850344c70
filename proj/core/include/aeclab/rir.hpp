#pragma once

#include <array>

#include "aeclab/signal.hpp"

namespace aeclab {

constexpr double kSpeedOfSound = 343.0;  // m/s

/// Shoebox room for the image-source method. `absorption` is the amplitude
/// multiplier applied per wall reflection (an image with k reflections is
/// attenuated by absorption^k); max_order bounds the total reflection count.
struct RoomSpec {
  std::array<double, 3> room{4.0, 5.0, 3.0};
  std::array<double, 3> source{1.0, 2.0, 1.5};
  std::array<double, 3> mic{2.5, 3.0, 1.2};
  double absorption = 0.8;
  int max_order = 6;

  void validate() const;
};

/// Image-method room impulse response: image sources mirrored across the
/// walls, each summed in with absorption^reflections / (4 pi d) amplitude at
/// delay d/c, placed with a windowed-sinc fractional-delay kernel.
TimeSignal generate_rir(const RoomSpec& spec, int sample_rate);

/// Width of the fractional-delay kernel (taps on each side of the center).
constexpr int kRirSincHalfWidth = 40;

/// The fractional-delay kernel value at integer tap i for center tau (both
/// in samples): sinc(i - tau) under a Hann window of half-width
/// kRirSincHalfWidth. Exposed so tests can build the oracle from the same
/// primitive while enumerating images independently.
double rir_sinc_tap(double i_minus_tau);

}  // namespace aeclab
