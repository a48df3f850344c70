#pragma once

#include <random>

#include "aeclab/signal.hpp"

namespace aeclab {

// Built-in synthetic sources for corpus generation without external audio.
// These are clearly synthetic: harmonic complexes with speech-rate amplitude
// modulation and noise bursts (speech-like), sustained partial stacks
// (music-like), and shaped noise. All draw exclusively from the passed
// engine, so a (seed, index)-derived engine reproduces them exactly.

/// Voiced harmonic complex with a wandering f0, formant-style spectral
/// shaping, syllable-rate on/off envelope, and unvoiced noise bursts.
TimeSignal speech_like(std::size_t n, std::mt19937_64& rng);

/// Sustained chord of partial stacks with slow attack/decay envelopes.
TimeSignal music_like(std::size_t n, std::mt19937_64& rng);

/// Low-pass shaped broadband noise (room-noise stand-in).
TimeSignal noise_like(std::size_t n, std::mt19937_64& rng);

}  // namespace aeclab
