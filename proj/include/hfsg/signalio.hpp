#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hfsg/mat.hpp"

namespace hfsg {

/// A single sampled signal (current in amperes or voltage in volts).
struct Waveform {
    std::vector<double> samples;
    double sample_rate_hz = 30000.0;

    void validate() const;
};

/// N x T matrix of 1-second current signatures, one row per signature.
struct SignatureMatrix {
    Mat data;                          // amperes
    double sample_rate_hz = 30000.0;
    std::size_t samples_per_cycle = 500;

    void validate() const;
};

/// Reference grid voltage: a pure sinusoid starting at phase 0.
struct VoltageReference {
    Waveform waveform;                 // volts
    double mains_frequency_hz = 60.0;
    double amplitude_v = 1.0;
};

/// Half-open sample index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// amplitude * sin(2*pi*f0*t/fs) for t = 0..n_samples-1. Rejects
/// configurations where fs/f0 is not an integer samples-per-cycle.
VoltageReference generate_voltage_reference(double mains_frequency_hz, double sample_rate_hz,
                                            std::size_t n_samples, double amplitude_v);

/// Locks the current waveform to the voltage cycle grid: detects rising zero
/// crossings of the voltage (linearly interpolated crossing instants) and
/// resamples the current of every detected cycle to exactly samples_per_cycle
/// points. Output length is n_cycles * samples_per_cycle and the first output
/// sample coincides with a rising voltage zero crossing.
Waveform align_cycles(const Waveform& current, const Waveform& voltage,
                      std::size_t samples_per_cycle);

/// Crops an aligned waveform into consecutive non-overlapping windows of
/// window_len samples; the trailing remainder is discarded.
SignatureMatrix window_signatures(const Waveform& aligned, std::size_t window_len,
                                  std::size_t samples_per_cycle);

/// Splits a waveform into maximal contiguous ranges of stable per-cycle RMS:
/// a new range starts whenever a block RMS leaves +-threshold_ratio of the
/// current range's running mean RMS. Blocks are rms_window_cycles cycles wide.
/// Ranges are ordered, disjoint, and cover the cycle-aligned prefix.
std::vector<IndexRange> segment_events(const Waveform& waveform, std::size_t samples_per_cycle,
                                       std::size_t rms_window_cycles, double threshold_ratio);

double rms(std::span<const double> x);

}  // namespace hfsg
