#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfsg/signalio.hpp"

namespace hfsg {

/// Label value used before a label vector has been assigned.
constexpr std::int64_t kLabelUnset = -1;

/// Fitted PCA artifact. Rows of w_r are orthonormal principal directions,
/// sorted by explained variance; sigma_r / z_min / z_max describe the
/// training data's latent distribution per component.
struct ReconstructionModel {
    std::vector<double> mean_row;                  // T
    Mat w_r;                                       // L x T
    std::vector<double> sigma_r;                   // L, sample std of training projections
    std::vector<double> z_min;                     // L
    std::vector<double> z_max;                     // L
    std::vector<double> explained_variance_ratio;  // L, non-increasing
    double sample_rate_hz = 30000.0;
    std::size_t samples_per_cycle = 500;

    std::size_t latent_dim() const { return w_r.rows; }
    std::size_t signal_dim() const { return w_r.cols; }
    void validate() const;
};

/// N x L latent signatures with optional cluster/class/brand labels
/// (kLabelUnset until assigned).
struct LatentMatrix {
    Mat z;
    std::vector<std::int64_t> y_g;
    std::vector<std::int64_t> y_class;
    std::vector<std::int64_t> y_brand;

    static LatentMatrix unlabeled(Mat z_in);
};

/// PCA via SVD of the mean-centered matrix. Works on the smaller of the two
/// Gram matrices, so N >> T and T >> N corpora are both cheap. Directions
/// beyond the numerical rank are padded with deterministic orthonormal
/// fillers carrying zero explained variance. Sign convention: the
/// largest-magnitude entry of every w_r row is positive.
ReconstructionModel fit_pca(const SignatureMatrix& x, std::size_t l);

/// Same fit, but l is the smallest component count whose cumulative
/// explained variance reaches `variance_threshold` (capped at min(N, T)).
ReconstructionModel fit_pca_by_variance(const SignatureMatrix& x, double variance_threshold);

/// z = (x - mean_row) * w_r^T; labels left unset.
LatentMatrix project(const ReconstructionModel& model, const SignatureMatrix& x);

/// x_hat = z * w_r + mean_row.
SignatureMatrix reconstruct(const ReconstructionModel& model, const Mat& z);

/// Mean over all N*T entries of |x - x_hat|.
double reconstruction_mae(const Mat& x, const Mat& x_hat);
double reconstruction_mae(const SignatureMatrix& x, const SignatureMatrix& x_hat);

// PCAMOD container: same 40-byte header conventions as SIGMAT
// (magic "PCAMOD", version, flags, L, T, sample_rate_hz, samples_per_cycle)
// followed by tagged binary64 sections MEANROW, WMATRIX, SIGMAR, ZMIN, ZMAX,
// EVRATIO.
void write_model(const ReconstructionModel& model, const std::string& path);
ReconstructionModel read_model(const std::string& path);

}  // namespace hfsg
