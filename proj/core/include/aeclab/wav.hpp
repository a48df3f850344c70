#pragma once

#include <string>

#include "aeclab/signal.hpp"

namespace aeclab {

enum class WavFormat { Pcm16, Float32 };

/// Reads a mono 16 kHz WAV (16-bit PCM or 32-bit float). Any other rate,
/// channel count, or sample format is rejected; no resampling in v1.
TimeSignal read_wav(const std::string& path);

/// Writes a mono WAV. Pcm16 clips to [-1, 1) and quantizes; Float32 stores
/// samples as-is (round-trips losslessly for float32-valued signals).
void write_wav(const std::string& path, const TimeSignal& signal,
               WavFormat format = WavFormat::Float32);

}  // namespace aeclab
