#pragma once

#include <span>
#include <string>
#include <vector>

#include "hfsg/mat.hpp"
#include "hfsg/signalio.hpp"

namespace hfsg {

/// How per-period energy is accumulated for the temporal centroid.
enum class PeriodEnergy { sum_squares, rms };

/// Fixed per-dataset feature geometry; every row of a dataset is flattened
/// with the same layout.
struct FeatureLayout {
    std::size_t samples_per_cycle = 500;
    std::size_t wavelet_levels = 8;
    std::size_t vi_points = 50;
    PeriodEnergy period_energy = PeriodEnergy::sum_squares;

    std::size_t periods(std::size_t t) const { return t / samples_per_cycle; }
    std::size_t wavelet_bands() const { return wavelet_levels + 1; }
    /// FF + TC + AOT(P) + WE(J) + VIT(2*n) + theta
    std::size_t flat_length(std::size_t t) const {
        return 2 + periods(t) + wavelet_bands() + 2 * vi_points + 1;
    }
};

struct PhaseShift {
    double theta = 0.0;             // radians, [0, pi/2]
    double active_power_w = 0.0;    // mean(x .* v)
    double apparent_power_s = 0.0;  // rms(x) * rms(v)
};

struct FeatureVector {
    double form_factor = 0.0;
    double temporal_centroid = 0.0;       // periods, [1, P]
    std::vector<double> admittance;       // P
    std::vector<double> wavelet_energy;   // J = levels + 1
    Mat vi_trajectory;                    // 2 x n_points: voltage row, current row
    PhaseShift phase;
    FeatureLayout layout;

    std::vector<double> flatten() const;
};

/// rms(x) / mean(|x|); >= 1 for any nonzero signal.
double form_factor(std::span<const double> x);

/// Energy-weighted mean period index, 1-based; in [1, P].
double temporal_centroid(std::span<const double> x, std::size_t samples_per_cycle,
                         PeriodEnergy mode = PeriodEnergy::sum_squares);

/// Per-period rms(current) / rms(voltage), length P.
std::vector<double> admittance_over_time(std::span<const double> x, const VoltageReference& v,
                                         std::size_t samples_per_cycle);

/// Haar DWT band energies on the largest power-of-two prefix: detail bands
/// finest-to-coarsest followed by the final approximation band. Parseval:
/// the bands sum to the squared norm of the analyzed prefix.
std::vector<double> wavelet_energy(std::span<const double> x, std::size_t levels);

/// 2 x n_points path of (v/max|v|, x/max|x|) sampled over the final full
/// cycle of the row.
Mat vi_trajectory(std::span<const double> x, const VoltageReference& v,
                  std::size_t samples_per_cycle, std::size_t n_points);

/// theta = arccos(clamp(W/S, 0, 1)) with W = mean(x.*v), S = rms(x)*rms(v).
PhaseShift phase_shift(std::span<const double> x, const VoltageReference& v);

/// All six features for one row; throws feature_error naming the offending
/// feature when any sub-feature is undefined.
FeatureVector feature_vector(std::span<const double> x, const VoltageReference& v,
                             const FeatureLayout& layout);

/// Row-wise extraction over a whole matrix into a flat A x F feature matrix.
Mat extract_features(const SignatureMatrix& x, const VoltageReference& v,
                     const FeatureLayout& layout);

/// Column names matching the flattened order.
std::vector<std::string> feature_names(const FeatureLayout& layout, std::size_t t);

/// extract_features + CSV with a header row.
void write_features_csv(const SignatureMatrix& x, const VoltageReference& v,
                        const FeatureLayout& layout, const std::string& path);

}  // namespace hfsg
