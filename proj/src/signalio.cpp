#include "hfsg/signalio.hpp"

#include <algorithm>
#include <cmath>

#include "hfsg/errors.hpp"

namespace hfsg {

void Waveform::validate() const {
    if (samples.empty()) throw validation_error("waveform: empty");
    if (!(sample_rate_hz > 0.0)) throw validation_error("waveform: sample rate must be positive");
    for (double v : samples)
        if (!std::isfinite(v)) throw validation_error("waveform: non-finite sample");
}

void SignatureMatrix::validate() const {
    if (data.rows < 1) throw validation_error("signature matrix: needs at least one row");
    if (!(sample_rate_hz > 0.0))
        throw validation_error("signature matrix: sample rate must be positive");
    if (samples_per_cycle == 0)
        throw validation_error("signature matrix: samples_per_cycle must be positive");
    if (data.cols % samples_per_cycle != 0)
        throw validation_error("signature matrix: T=" + std::to_string(data.cols) +
                               " is not a multiple of samples_per_cycle=" +
                               std::to_string(samples_per_cycle));
    if (!data.all_finite()) throw validation_error("signature matrix: non-finite entry");
}

double rms(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

VoltageReference generate_voltage_reference(double mains_frequency_hz, double sample_rate_hz,
                                            std::size_t n_samples, double amplitude_v) {
    if (!(mains_frequency_hz > 0.0) || !(sample_rate_hz > 0.0) || n_samples == 0 ||
        !(amplitude_v > 0.0))
        throw config_error("voltage reference: all arguments must be positive");
    double ratio = sample_rate_hz / mains_frequency_hz;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw config_error("voltage reference: sample_rate/mains_frequency = " +
                           std::to_string(ratio) + " is not an integer samples-per-cycle");
    VoltageReference ref;
    ref.mains_frequency_hz = mains_frequency_hz;
    ref.amplitude_v = amplitude_v;
    ref.waveform.sample_rate_hz = sample_rate_hz;
    ref.waveform.samples.resize(n_samples);
    const double w = 2.0 * M_PI * mains_frequency_hz / sample_rate_hz;
    for (std::size_t t = 0; t < n_samples; ++t)
        ref.waveform.samples[t] = amplitude_v * std::sin(w * static_cast<double>(t));
    return ref;
}

namespace {

// Rising zero crossings of v, as fractional sample positions, linearly
// interpolated between the bracketing samples.
std::vector<double> rising_zero_crossings(const std::vector<double>& v) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i] < 0.0 && v[i + 1] >= 0.0) {
            double t = static_cast<double>(i) - v[i] / (v[i + 1] - v[i]);
            crossings.push_back(t);
        }
    }
    return crossings;
}

double interp_at(const std::vector<double>& x, double pos) {
    if (pos <= 0.0) return x.front();
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= x.size()) return x.back();
    double frac = pos - static_cast<double>(i);
    return x[i] + frac * (x[i + 1] - x[i]);
}

}  // namespace

Waveform align_cycles(const Waveform& current, const Waveform& voltage,
                      std::size_t samples_per_cycle) {
    current.validate();
    voltage.validate();
    if (samples_per_cycle == 0) throw config_error("align_cycles: samples_per_cycle must be positive");
    if (current.samples.size() != voltage.samples.size())
        throw dimension_error("align_cycles: current and voltage lengths differ");
    if (current.sample_rate_hz != voltage.sample_rate_hz)
        throw validation_error("align_cycles: sample rates differ");

    std::vector<double> crossings = rising_zero_crossings(voltage.samples);
    if (crossings.size() < 2)
        throw alignment_error("align_cycles: fewer than one full voltage cycle (" +
                              std::to_string(crossings.size()) + " rising zero crossings)");

    Waveform out;
    out.sample_rate_hz = current.sample_rate_hz;
    out.samples.reserve((crossings.size() - 1) * samples_per_cycle);
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        double a = crossings[c];
        double b = crossings[c + 1];
        double step = (b - a) / static_cast<double>(samples_per_cycle);
        for (std::size_t i = 0; i < samples_per_cycle; ++i)
            out.samples.push_back(interp_at(current.samples, a + step * static_cast<double>(i)));
    }
    return out;
}

SignatureMatrix window_signatures(const Waveform& aligned, std::size_t window_len,
                                  std::size_t samples_per_cycle) {
    aligned.validate();
    if (window_len == 0 || samples_per_cycle == 0)
        throw config_error("window_signatures: window_len and samples_per_cycle must be positive");
    if (window_len % samples_per_cycle != 0)
        throw config_error("window_signatures: window_len must be a multiple of samples_per_cycle");
    std::size_t n = aligned.samples.size() / window_len;
    if (n == 0)
        throw validation_error("window_signatures: input shorter than one window (" +
                               std::to_string(aligned.samples.size()) + " < " +
                               std::to_string(window_len) + ")");
    SignatureMatrix m;
    m.sample_rate_hz = aligned.sample_rate_hz;
    m.samples_per_cycle = samples_per_cycle;
    m.data = Mat(n, window_len);
    std::copy_n(aligned.samples.begin(), n * window_len, m.data.data.begin());
    return m;
}

std::vector<IndexRange> segment_events(const Waveform& waveform, std::size_t samples_per_cycle,
                                       std::size_t rms_window_cycles, double threshold_ratio) {
    waveform.validate();
    if (samples_per_cycle == 0 || rms_window_cycles == 0)
        throw config_error("segment_events: cycle sizes must be positive");
    if (!(threshold_ratio > 0.0)) throw config_error("segment_events: threshold_ratio must be > 0");

    const std::size_t block = samples_per_cycle * rms_window_cycles;
    const std::size_t n_cycles = waveform.samples.size() / samples_per_cycle;
    const std::size_t prefix = n_cycles * samples_per_cycle;
    if (n_cycles == 0) return {IndexRange{0, 0}};

    // per-block RMS over the cycle-aligned prefix; last block may be short
    std::vector<double> block_rms;
    std::vector<std::size_t> block_start;
    for (std::size_t s = 0; s < prefix; s += block) {
        std::size_t e = std::min(s + block, prefix);
        block_rms.push_back(rms(std::span<const double>(waveform.samples.data() + s, e - s)));
        block_start.push_back(s);
    }

    std::vector<IndexRange> ranges;
    std::size_t range_begin = 0;
    double mean_rms = block_rms[0];
    std::size_t count = 1;
    for (std::size_t b = 1; b < block_rms.size(); ++b) {
        double dev = std::abs(block_rms[b] - mean_rms);
        bool stable = mean_rms > 0.0 ? dev <= threshold_ratio * mean_rms : dev == 0.0;
        if (stable) {
            mean_rms = (mean_rms * static_cast<double>(count) + block_rms[b]) /
                       static_cast<double>(count + 1);
            ++count;
        } else {
            ranges.push_back(IndexRange{range_begin, block_start[b]});
            range_begin = block_start[b];
            mean_rms = block_rms[b];
            count = 1;
        }
    }
    ranges.push_back(IndexRange{range_begin, prefix});
    return ranges;
}

}  // namespace hfsg
