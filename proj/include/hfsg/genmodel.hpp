#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfsg/latent.hpp"
#include "hfsg/rng.hpp"

namespace hfsg {

/// Knobs of the latent-space generator. Latent bounds may be left empty to
/// inherit the companion model's training bounds, or set to length-L vectors
/// (a scalar fallback is expanded by the config layer).
struct GenerationConfig {
    std::size_t n_samples = 240;       // N, total requested rows
    std::size_t n_classes = 4;         // D
    std::size_t modes_per_class = 1;   // M
    std::size_t brands_per_class = 2;  // B
    double separability = 1.0;         // eps_sep
    double sigma_min = 0.5;
    double sigma_max = 1.5;
    std::vector<double> z_min;         // empty -> model bounds
    std::vector<double> z_max;
    std::uint64_t seed = 1;

    std::size_t n_clusters() const { return n_classes * modes_per_class; }
    /// Rows actually generated: n_clusters * floor(N / n_clusters).
    std::size_t effective_samples() const {
        std::size_t c = n_clusters();
        return c == 0 ? 0 : c * (n_samples / c);
    }
    void validate() const;
};

/// One Gaussian blob: centroid, random covariance, and the drawn spread.
/// trace(covariance) equals spread^2 / M by construction.
struct BlobSpec {
    std::vector<double> centroid;  // L
    Mat covariance;                // L x L symmetric PSD
    double spread = 1.0;           // sigma_k

    void validate(std::size_t modes_per_class) const;
};

/// Random covariance for one cluster: sigma_k^2 * (1/m) * S / trace(S) with
/// S = P P^T and P standard-normal l x l. Trace is sigma_k^2 / m by
/// construction.
Mat sample_covariance(std::size_t l, std::size_t m, double sigma_k, Rng& rng);

/// Gaussian blob modeling: C = D*M clusters, centroids uniform in the latent
/// bounds then mapped through eps_sep * (2u - 1), each cluster holding
/// floor(N/C) multivariate-normal samples. Returns z with cluster ids y_g;
/// class/brand labels unset. When `blobs` is given it receives the C
/// generated blob specifications.
LatentMatrix gbm(const GenerationConfig& cfg, std::size_t l,
                 std::vector<BlobSpec>* blobs = nullptr);

/// Aligns raw blob output with the real latent structure: an auxiliary PCA
/// fitted on the synthetic data rotates it onto decorrelated axes, then each
/// column is rescaled so its sample std matches sigma_r. Columns whose
/// synthetic variance is zero are left at zero (warning recorded).
void align_latent(LatentMatrix& z_g, const std::vector<double>& sigma_r,
                  std::vector<std::string>* warnings = nullptr);

/// Lloyd's k-means with k-means++ seeding. Empty clusters are reseeded to the
/// point farthest from its assigned centroid. Deterministic for a fixed rng.
std::vector<std::int64_t> kmeans(const Mat& points, std::size_t k, Rng& rng,
                                 std::size_t max_iter = 300, double tol = 1e-6);

/// Full submetered generation: gbm -> align_latent -> per-cluster k-means
/// brand labels -> y_class = y_g / M. Brand counts are clamped to the cluster
/// size when a cluster is smaller than B (warning recorded).
LatentMatrix make_submetered(const GenerationConfig& cfg, const ReconstructionModel& model,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace hfsg
