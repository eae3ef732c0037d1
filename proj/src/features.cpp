#include "hfsg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hfsg/errors.hpp"

namespace hfsg {

double form_factor(std::span<const double> x) {
    if (x.empty()) throw feature_error("form_factor: empty row");
    double sum_sq = 0.0, sum_abs = 0.0;
    for (double v : x) {
        sum_sq += v * v;
        sum_abs += std::abs(v);
    }
    const double n = static_cast<double>(x.size());
    if (sum_abs == 0.0) throw feature_error("form_factor: undefined for all-zero row");
    return std::sqrt(sum_sq / n) / (sum_abs / n);
}

namespace {

std::vector<double> period_energies(std::span<const double> x, std::size_t spc,
                                    PeriodEnergy mode) {
    if (spc == 0 || x.size() % spc != 0)
        throw dimension_error("period split: row length " + std::to_string(x.size()) +
                              " not divisible by samples_per_cycle " + std::to_string(spc));
    const std::size_t p = x.size() / spc;
    std::vector<double> energy(p);
    for (std::size_t i = 0; i < p; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < spc; ++j) {
            double v = x[i * spc + j];
            acc += v * v;
        }
        energy[i] = mode == PeriodEnergy::sum_squares
                        ? acc
                        : std::sqrt(acc / static_cast<double>(spc));
    }
    return energy;
}

}  // namespace

double temporal_centroid(std::span<const double> x, std::size_t samples_per_cycle,
                         PeriodEnergy mode) {
    std::vector<double> energy = period_energies(x, samples_per_cycle, mode);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < energy.size(); ++p) {
        num += energy[p] * static_cast<double>(p + 1);
        den += energy[p];
    }
    if (den == 0.0) throw feature_error("temporal_centroid: undefined for zero-energy row");
    return num / den;
}

std::vector<double> admittance_over_time(std::span<const double> x, const VoltageReference& v,
                                         std::size_t samples_per_cycle) {
    if (x.size() != v.waveform.samples.size())
        throw dimension_error("admittance: row/voltage length mismatch");
    if (samples_per_cycle == 0 || x.size() % samples_per_cycle != 0)
        throw dimension_error("admittance: length not divisible by samples_per_cycle");
    const std::size_t p = x.size() / samples_per_cycle;
    std::vector<double> out(p);
    for (std::size_t i = 0; i < p; ++i) {
        std::span<const double> xs = x.subspan(i * samples_per_cycle, samples_per_cycle);
        std::span<const double> vs(v.waveform.samples.data() + i * samples_per_cycle,
                                   samples_per_cycle);
        double v_rms = rms(vs);
        if (v_rms == 0.0)
            throw validation_error("admittance: zero-voltage period " + std::to_string(i));
        out[i] = rms(xs) / v_rms;
    }
    return out;
}

std::vector<double> wavelet_energy(std::span<const double> x, std::size_t levels) {
    if (x.empty()) throw feature_error("wavelet_energy: empty row");
    if (levels == 0) throw config_error("wavelet_energy: levels must be >= 1");
    // largest power-of-two prefix
    std::size_t n2 = 1;
    while (n2 * 2 <= x.size()) n2 *= 2;
    if ((std::size_t{1} << levels) > n2)
        throw config_error("wavelet_energy: " + std::to_string(levels) +
                           " levels too deep for a " + std::to_string(n2) + "-sample prefix");

    std::vector<double> approx(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n2));
    std::vector<double> bands(levels + 1, 0.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<double> next;
    for (std::size_t lvl = 0; lvl < levels; ++lvl) {
        const std::size_t half = approx.size() / 2;
        next.resize(half);
        double detail_energy = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            double a = (approx[2 * i] + approx[2 * i + 1]) * inv_sqrt2;
            double d = (approx[2 * i] - approx[2 * i + 1]) * inv_sqrt2;
            next[i] = a;
            detail_energy += d * d;
        }
        bands[lvl] = detail_energy;  // finest first
        approx.swap(next);
    }
    double approx_energy = 0.0;
    for (double v : approx) approx_energy += v * v;
    bands[levels] = approx_energy;
    return bands;
}

Mat vi_trajectory(std::span<const double> x, const VoltageReference& v,
                  std::size_t samples_per_cycle, std::size_t n_points) {
    if (x.size() != v.waveform.samples.size())
        throw dimension_error("vi_trajectory: row/voltage length mismatch");
    if (samples_per_cycle == 0 || x.size() < samples_per_cycle)
        throw dimension_error("vi_trajectory: row shorter than one cycle");
    if (n_points == 0) throw config_error("vi_trajectory: n_points must be >= 1");

    // final full cycle = steady-state portion
    const std::size_t start = (x.size() / samples_per_cycle - 1) * samples_per_cycle;
    double max_x = 0.0, max_v = 0.0;
    for (std::size_t j = 0; j < samples_per_cycle; ++j) {
        max_x = std::max(max_x, std::abs(x[start + j]));
        max_v = std::max(max_v, std::abs(v.waveform.samples[start + j]));
    }
    if (max_x == 0.0) throw feature_error("vi_trajectory: undefined for zero-current cycle");
    if (max_v == 0.0) throw validation_error("vi_trajectory: zero-voltage cycle");

    Mat path(2, n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        std::size_t idx = start + (i * samples_per_cycle) / n_points;
        path(0, i) = v.waveform.samples[idx] / max_v;
        path(1, i) = x[idx] / max_x;
    }
    return path;
}

PhaseShift phase_shift(std::span<const double> x, const VoltageReference& v) {
    if (x.size() != v.waveform.samples.size())
        throw dimension_error("phase_shift: row/voltage length mismatch");
    if (x.empty()) throw feature_error("phase_shift: empty row");
    double sum_xv = 0.0, sum_xx = 0.0, sum_vv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum_xv += x[i] * v.waveform.samples[i];
        sum_xx += x[i] * x[i];
        sum_vv += v.waveform.samples[i] * v.waveform.samples[i];
    }
    const double n = static_cast<double>(x.size());
    PhaseShift out;
    out.active_power_w = sum_xv / n;
    double norm_x = std::sqrt(sum_xx);
    double norm_v = std::sqrt(sum_vv);
    if (norm_x == 0.0) throw feature_error("phase_shift: undefined for zero-rms row");
    out.apparent_power_s = norm_x * norm_v / n;
    // arccos(clamp(W/S, 0, 1)) evaluated through the numerically stable
    // vector-angle form 2*atan2(|u - w|, |u + w|); identical signals give an
    // exact zero instead of acos(1 - ulp)
    double diff2 = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = x[i] / norm_x;
        double b = v.waveform.samples[i] / norm_v;
        diff2 += (a - b) * (a - b);
        sum2 += (a + b) * (a + b);
    }
    double angle = 2.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2));
    out.theta = std::min(angle, M_PI / 2.0);  // negative correlation clamps to pi/2
    return out;
}

FeatureVector feature_vector(std::span<const double> x, const VoltageReference& v,
                             const FeatureLayout& layout) {
    FeatureVector fv;
    fv.layout = layout;
    try {
        fv.form_factor = form_factor(x);
        fv.temporal_centroid =
            temporal_centroid(x, layout.samples_per_cycle, layout.period_energy);
        fv.admittance = admittance_over_time(x, v, layout.samples_per_cycle);
        fv.wavelet_energy = hfsg::wavelet_energy(x, layout.wavelet_levels);
        fv.vi_trajectory = hfsg::vi_trajectory(x, v, layout.samples_per_cycle, layout.vi_points);
        fv.phase = phase_shift(x, v);
    } catch (const feature_error& e) {
        throw feature_error(std::string("feature_vector: ") + e.what());
    }
    return fv;
}

std::vector<double> FeatureVector::flatten() const {
    std::vector<double> flat;
    flat.reserve(2 + admittance.size() + wavelet_energy.size() + vi_trajectory.data.size() + 1);
    flat.push_back(form_factor);
    flat.push_back(temporal_centroid);
    flat.insert(flat.end(), admittance.begin(), admittance.end());
    flat.insert(flat.end(), wavelet_energy.begin(), wavelet_energy.end());
    flat.insert(flat.end(), vi_trajectory.data.begin(), vi_trajectory.data.end());
    flat.push_back(phase.theta);
    return flat;
}

Mat extract_features(const SignatureMatrix& x, const VoltageReference& v,
                     const FeatureLayout& layout) {
    x.validate();
    const std::size_t f = layout.flat_length(x.data.cols);
    Mat out(x.data.rows, f);
    for (std::size_t i = 0; i < x.data.rows; ++i) {
        std::vector<double> flat;
        try {
            flat = feature_vector(x.data.row(i), v, layout).flatten();
        } catch (const feature_error& e) {
            throw feature_error("row " + std::to_string(i) + ": " + e.what());
        }
        if (flat.size() != f)
            throw dimension_error("extract_features: layout length mismatch on row " +
                                  std::to_string(i));
        std::copy(flat.begin(), flat.end(), out.row_ptr(i));
    }
    return out;
}

std::vector<std::string> feature_names(const FeatureLayout& layout, std::size_t t) {
    std::vector<std::string> names;
    names.reserve(layout.flat_length(t));
    names.emplace_back("form_factor");
    names.emplace_back("temporal_centroid");
    for (std::size_t p = 0; p < layout.periods(t); ++p)
        names.push_back("admittance_p" + std::to_string(p + 1));
    for (std::size_t j = 0; j < layout.wavelet_levels; ++j)
        names.push_back("wavelet_detail_l" + std::to_string(j + 1));
    names.emplace_back("wavelet_approx");
    for (std::size_t i = 0; i < layout.vi_points; ++i)
        names.push_back("vit_v" + std::to_string(i));
    for (std::size_t i = 0; i < layout.vi_points; ++i)
        names.push_back("vit_i" + std::to_string(i));
    names.emplace_back("phase_shift");
    return names;
}

void write_features_csv(const SignatureMatrix& x, const VoltageReference& v,
                        const FeatureLayout& layout, const std::string& path) {
    Mat features = extract_features(x, v, layout);
    std::vector<std::string> names = feature_names(layout, x.data.cols);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("features csv: cannot open " + path);
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    char cell[40];
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            std::snprintf(cell, sizeof(cell), "%.17g", features(i, j));
            if (j) out << ',';
            out << cell;
        }
        out << '\n';
    }
    if (!out) throw format_error("features csv: short write to " + path);
}

}  // namespace hfsg
