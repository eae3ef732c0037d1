#pragma once

#include <cstdint>

#include "hfsg/signalio.hpp"

namespace hfsg {

/// Self-contained stand-in for a submetered training corpus: harmonic-series
/// current signatures with exponentially decaying harmonic amplitudes and
/// per-harmonic phases in [-pi/2, pi/2]. Signatures are grouped into classes,
/// each class sharing a base harmonic profile with per-signature jitter.
struct PseudoRealConfig {
    std::size_t n_signatures = 200;
    std::size_t window_len = 30000;       // T
    double sample_rate_hz = 30000.0;
    double mains_frequency_hz = 60.0;
    std::size_t n_classes = 5;
    std::size_t max_harmonics = 15;       // counts are drawn in [3, max_harmonics]
    double amplitude_min = 0.5;           // fundamental amplitude range across classes
    double amplitude_max = 8.0;
    double decay_min = 0.4;               // harmonic amplitude decay rate range
    double decay_max = 1.2;
    double jitter = 0.05;                 // relative per-signature variation
    double noise_std = 0.0;               // additive white noise, amperes
    std::uint64_t seed = 1;

    void validate() const;
};

SignatureMatrix make_pseudo_real(const PseudoRealConfig& cfg);

}  // namespace hfsg
