#include "hfsg/pseudo_real.hpp"

#include <algorithm>
#include <cmath>

#include "hfsg/errors.hpp"
#include "hfsg/rng.hpp"

namespace hfsg {

void PseudoRealConfig::validate() const {
    if (n_signatures == 0) throw config_error("pseudo_real: n_signatures must be >= 1");
    if (window_len == 0) throw config_error("pseudo_real: window_len must be >= 1");
    if (n_classes == 0) throw config_error("pseudo_real: n_classes must be >= 1");
    if (max_harmonics < 3) throw config_error("pseudo_real: max_harmonics must be >= 3");
    if (!(sample_rate_hz > 0.0) || !(mains_frequency_hz > 0.0))
        throw config_error("pseudo_real: rates must be positive");
    double spc = sample_rate_hz / mains_frequency_hz;
    if (std::abs(spc - std::round(spc)) > 1e-9 * spc)
        throw config_error("pseudo_real: sample_rate/mains_frequency must be an integer");
    if (window_len % static_cast<std::size_t>(std::llround(spc)) != 0)
        throw config_error("pseudo_real: window_len must be a multiple of samples-per-cycle");
    if (!(amplitude_min > 0.0) || amplitude_min > amplitude_max)
        throw config_error("pseudo_real: bad amplitude range");
    if (!(decay_min > 0.0) || decay_min > decay_max)
        throw config_error("pseudo_real: bad decay range");
    if (jitter < 0.0 || noise_std < 0.0)
        throw config_error("pseudo_real: jitter/noise must be non-negative");
    // highest harmonic must stay below Nyquist
    if (mains_frequency_hz * static_cast<double>(max_harmonics) >= sample_rate_hz / 2.0)
        throw config_error("pseudo_real: max harmonic exceeds Nyquist");
}

namespace {

struct HarmonicProfile {
    std::size_t n_harmonics;
    std::vector<double> amplitude;  // per harmonic
    std::vector<double> phase;      // per harmonic, in [-pi/2, pi/2]
};

constexpr double kHalfPi = M_PI / 2.0;

}  // namespace

SignatureMatrix make_pseudo_real(const PseudoRealConfig& cfg) {
    cfg.validate();
    const std::size_t spc =
        static_cast<std::size_t>(std::llround(cfg.sample_rate_hz / cfg.mains_frequency_hz));
    const std::size_t t_len = cfg.window_len;

    // class base profiles
    Rng profile_rng(cfg.seed, make_stream(stream_id::corpus, 0));
    std::vector<HarmonicProfile> profiles(cfg.n_classes);
    for (auto& p : profiles) {
        p.n_harmonics = static_cast<std::size_t>(profile_rng.uniform_int(3, cfg.max_harmonics));
        double a1 = profile_rng.uniform(cfg.amplitude_min, cfg.amplitude_max);
        double decay = profile_rng.uniform(cfg.decay_min, cfg.decay_max);
        p.amplitude.resize(p.n_harmonics);
        p.phase.resize(p.n_harmonics);
        for (std::size_t h = 0; h < p.n_harmonics; ++h) {
            p.amplitude[h] = a1 * std::exp(-decay * static_cast<double>(h));
            p.phase[h] = profile_rng.uniform(-kHalfPi, kHalfPi);
        }
    }

    SignatureMatrix m;
    m.sample_rate_hz = cfg.sample_rate_hz;
    m.samples_per_cycle = spc;
    m.data = Mat(cfg.n_signatures, t_len);

    Rng sig_rng(cfg.seed, make_stream(stream_id::corpus, 1));
    const double w0 = 2.0 * M_PI * cfg.mains_frequency_hz / cfg.sample_rate_hz;
    std::vector<double> amp, ph;
    for (std::size_t i = 0; i < cfg.n_signatures; ++i) {
        const HarmonicProfile& p = profiles[i % cfg.n_classes];
        amp.resize(p.n_harmonics);
        ph.resize(p.n_harmonics);
        for (std::size_t h = 0; h < p.n_harmonics; ++h) {
            amp[h] = p.amplitude[h] * (1.0 + cfg.jitter * sig_rng.normal());
            ph[h] = std::clamp(p.phase[h] + cfg.jitter * kHalfPi * sig_rng.normal(), -kHalfPi,
                               kHalfPi);
        }
        double* row = m.data.row_ptr(i);
        for (std::size_t s = 0; s < t_len; ++s) {
            double acc = 0.0;
            double base = w0 * static_cast<double>(s);
            for (std::size_t h = 0; h < p.n_harmonics; ++h)
                acc += amp[h] * std::sin(static_cast<double>(h + 1) * base + ph[h]);
            row[s] = acc;
        }
        if (cfg.noise_std > 0.0)
            for (std::size_t s = 0; s < t_len; ++s) row[s] += cfg.noise_std * sig_rng.normal();
    }
    return m;
}

}  // namespace hfsg
