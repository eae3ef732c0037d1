#include "hfsg/genmodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hfsg/errors.hpp"

namespace hfsg {

namespace {

using EMat = Eigen::MatrixXd;
using RowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

double sq_dist(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace

void GenerationConfig::validate() const {
    if (n_classes < 1) throw config_error("n_classes: must be >= 1");
    if (modes_per_class < 1) throw config_error("modes_per_class: must be >= 1");
    if (brands_per_class < 1) throw config_error("brands_per_class: must be >= 1");
    if (n_samples < n_clusters())
        throw config_error("n_samples: must be >= n_classes * modes_per_class (" +
                           std::to_string(n_clusters()) + ")");
    if (separability < 0.0) throw config_error("separability: must be >= 0");
    if (!(sigma_min > 0.0)) throw config_error("sigma_min: must be > 0");
    if (sigma_min > sigma_max) throw config_error("sigma_max: must be >= sigma_min");
    if (z_min.size() != z_max.size())
        throw config_error("z_min/z_max: bound vectors must have equal length");
    for (std::size_t i = 0; i < z_min.size(); ++i)
        if (z_min[i] > z_max[i]) throw config_error("z_min: must be <= z_max componentwise");
}

void BlobSpec::validate(std::size_t modes_per_class) const {
    const std::size_t l = centroid.size();
    if (covariance.rows != l || covariance.cols != l)
        throw dimension_error("blob: covariance shape does not match centroid length");
    if (!(spread > 0.0)) throw validation_error("blob: spread must be positive");
    double trace = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        trace += covariance(i, i);
        for (std::size_t j = 0; j < l; ++j)
            if (std::abs(covariance(i, j) - covariance(j, i)) > 1e-10)
                throw validation_error("blob: covariance not symmetric");
    }
    double expected = spread * spread / static_cast<double>(modes_per_class);
    if (std::abs(trace - expected) > 1e-9 * expected)
        throw validation_error("blob: trace(covariance) != spread^2 / M");
}

Mat sample_covariance(std::size_t l, std::size_t m, double sigma_k, Rng& rng) {
    if (l < 1 || m < 1 || !(sigma_k > 0.0))
        throw config_error("sample_covariance: l, m must be >= 1 and sigma_k > 0");
    for (int attempt = 0; attempt < 2; ++attempt) {
        Mat p(l, l);
        rng.fill_normal(p.data.data(), p.data.size());
        ConstRowMajorMap pm(p.data.data(), static_cast<Eigen::Index>(l),
                            static_cast<Eigen::Index>(l));
        EMat s = pm * pm.transpose();
        double trace = s.trace();
        if (trace <= 0.0) continue;
        double scale = sigma_k * sigma_k / (static_cast<double>(m) * trace);
        Mat cov(l, l);
        RowMajorMap(cov.data.data(), static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) =
            s * scale;
        return cov;
    }
    throw validation_error("sample_covariance: trace(S) = 0 after resampling");
}

LatentMatrix gbm(const GenerationConfig& cfg, std::size_t l, std::vector<BlobSpec>* blobs) {
    cfg.validate();
    if (l < 1) throw config_error("gbm: latent dimension must be >= 1");
    if (cfg.z_min.size() != l)
        throw config_error("gbm: latent bounds must have length L=" + std::to_string(l));

    const std::size_t c = cfg.n_clusters();
    const std::size_t per_cluster = cfg.n_samples / c;
    if (per_cluster == 0)
        throw config_error("n_samples: floor(N / clusters) is zero (N=" +
                           std::to_string(cfg.n_samples) + ", clusters=" + std::to_string(c) + ")");
    const std::size_t n = c * per_cluster;

    // centroids: uniform in the latent bounds, then eps_sep * (2u - 1)
    Mat centroids(c, l);
    {
        Rng rng(cfg.seed, make_stream(stream_id::centroids));
        for (std::size_t k = 0; k < c; ++k)
            for (std::size_t j = 0; j < l; ++j) {
                double u = rng.uniform(cfg.z_min[j], cfg.z_max[j]);
                centroids(k, j) = cfg.separability * (2.0 * u - 1.0);
            }
    }

    if (blobs) blobs->clear();
    LatentMatrix out = LatentMatrix::unlabeled(Mat(n, l));
    for (std::size_t k = 0; k < c; ++k) {
        Rng rng(cfg.seed, make_stream(stream_id::cluster, k));
        double sigma_k = rng.uniform(cfg.sigma_min, cfg.sigma_max);
        Mat cov = sample_covariance(l, cfg.modes_per_class, sigma_k, rng);
        if (blobs) {
            BlobSpec spec;
            spec.centroid.assign(centroids.row_ptr(k), centroids.row_ptr(k) + l);
            spec.covariance = cov;
            spec.spread = sigma_k;
            blobs->push_back(std::move(spec));
        }

        ConstRowMajorMap cm(cov.data.data(), static_cast<Eigen::Index>(l),
                            static_cast<Eigen::Index>(l));
        Eigen::LLT<EMat> llt(cm);
        if (llt.info() != Eigen::Success) {
            EMat jittered = cm + 1e-12 * EMat::Identity(static_cast<Eigen::Index>(l),
                                                        static_cast<Eigen::Index>(l));
            llt.compute(jittered);
            if (llt.info() != Eigen::Success)
                throw validation_error("gbm: covariance factorization failed for cluster " +
                                       std::to_string(k));
        }
        EMat chol = llt.matrixL();

        Eigen::VectorXd noise(static_cast<Eigen::Index>(l));
        for (std::size_t i = 0; i < per_cluster; ++i) {
            std::size_t row = k * per_cluster + i;
            rng.fill_normal(noise.data(), l);
            Eigen::VectorXd sample = chol * noise;
            double* dst = out.z.row_ptr(row);
            for (std::size_t j = 0; j < l; ++j)
                dst[j] = centroids(k, j) + sample(static_cast<Eigen::Index>(j));
            out.y_g[row] = static_cast<std::int64_t>(k);
        }
    }
    return out;
}

void align_latent(LatentMatrix& z_g, const std::vector<double>& sigma_r,
                  std::vector<std::string>* warnings) {
    const std::size_t n = z_g.z.rows;
    const std::size_t l = z_g.z.cols;
    if (n == 0) throw validation_error("align_latent: empty latent matrix");
    if (sigma_r.size() != l)
        throw dimension_error("align_latent: sigma_r length " + std::to_string(sigma_r.size()) +
                              " != L " + std::to_string(l));

    RowMajorMap zm(z_g.z.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));

    // auxiliary PCA fitted on the synthetic data itself
    Eigen::RowVectorXd mean = zm.colwise().mean();
    EMat centered = zm.rowwise() - mean;
    double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    EMat cov = centered.transpose() * centered / denom;
    Eigen::SelfAdjointEigenSolver<EMat> es(cov);
    if (es.info() != Eigen::Success)
        throw validation_error("align_latent: auxiliary PCA eigendecomposition failed");

    // columns of w_g = principal directions, descending variance, sign-fixed
    EMat w_g(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
    std::vector<double> sigma_g(l);
    for (std::size_t i = 0; i < l; ++i) {
        Eigen::Index src = static_cast<Eigen::Index>(l - 1 - i);
        Eigen::VectorXd dir = es.eigenvectors().col(src);
        Eigen::Index arg;
        dir.cwiseAbs().maxCoeff(&arg);
        if (dir(arg) < 0.0) dir = -dir;
        w_g.col(static_cast<Eigen::Index>(i)) = dir;
        sigma_g[i] = std::sqrt(std::max(es.eigenvalues()(src), 0.0));
    }

    // centered projection, the usual PCA transform; an uncentered rotation
    // would let the sigma_r/sigma_g rescale blow up the column means of
    // near-degenerate auxiliary components
    EMat rotated = centered * w_g;  // (Z - mean) * W_g^T with rows of W_g = dir^T
    for (std::size_t i = 0; i < l; ++i) {
        Eigen::Index col = static_cast<Eigen::Index>(i);
        if (sigma_g[i] > 0.0 && sigma_r[i] >= 0.0) {
            rotated.col(col) *= sigma_r[i] / sigma_g[i];
        } else {
            rotated.col(col).setZero();
            if (warnings)
                warnings->push_back("align_latent: synthetic component " + std::to_string(i) +
                                    " is degenerate; column zeroed");
        }
    }
    zm = rotated;
}

std::vector<std::int64_t> kmeans(const Mat& points, std::size_t k, Rng& rng, std::size_t max_iter,
                                 double tol) {
    const std::size_t n = points.rows;
    const std::size_t dim = points.cols;
    if (k < 1) throw config_error("kmeans: k must be >= 1");
    if (k > n) throw config_error("kmeans: k=" + std::to_string(k) + " exceeds " +
                                  std::to_string(n) + " points");

    // k-means++ seeding
    Mat centers(k, dim);
    std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
    {
        std::size_t first = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
        std::copy_n(points.row_ptr(first), dim, centers.row_ptr(0));
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d2 = sq_dist(points.row_ptr(i), centers.row_ptr(c - 1), dim);
                if (d2 < best_d2[i]) best_d2[i] = d2;
                total += best_d2[i];
            }
            std::size_t chosen;
            if (total > 0.0) {
                double r = rng.uniform01() * total;
                double cum = 0.0;
                chosen = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    cum += best_d2[i];
                    if (r < cum) {
                        chosen = i;
                        break;
                    }
                }
            } else {
                chosen = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
            }
            std::copy_n(points.row_ptr(chosen), dim, centers.row_ptr(c));
        }
    }

    std::vector<std::int64_t> labels(n, 0);
    Mat next(k, dim);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // assignment; ties go to the lowest center index
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d2 = sq_dist(points.row_ptr(i), centers.row_ptr(c), dim);
                if (d2 < best) {
                    best = d2;
                    arg = c;
                }
            }
            labels[i] = static_cast<std::int64_t>(arg);
        }

        std::fill(next.data.begin(), next.data.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t c = static_cast<std::size_t>(labels[i]);
            const double* src = points.row_ptr(i);
            double* dst = next.row_ptr(c);
            for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
            ++counts[c];
        }
        std::vector<bool> reseeded(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed to the point farthest from its own centroid; each
                // reseed this round claims a distinct point
                double far_d = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (reseeded[i]) continue;
                    std::size_t ci = static_cast<std::size_t>(labels[i]);
                    double d2 = sq_dist(points.row_ptr(i), centers.row_ptr(ci), dim);
                    if (d2 > far_d) {
                        far_d = d2;
                        far_i = i;
                    }
                }
                reseeded[far_i] = true;
                std::copy_n(points.row_ptr(far_i), dim, next.row_ptr(c));
                counts[c] = 1;
            } else {
                double inv = 1.0 / static_cast<double>(counts[c]);
                double* dst = next.row_ptr(c);
                for (std::size_t j = 0; j < dim; ++j) dst[j] *= inv;
            }
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c)
            shift = std::max(shift, std::sqrt(sq_dist(next.row_ptr(c), centers.row_ptr(c), dim)));
        centers = next;
        if (shift < tol) break;
    }

    // final assignment against the converged centers
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t c = 0; c < k; ++c) {
            double d2 = sq_dist(points.row_ptr(i), centers.row_ptr(c), dim);
            if (d2 < best) {
                best = d2;
                arg = c;
            }
        }
        labels[i] = static_cast<std::int64_t>(arg);
    }
    return labels;
}

LatentMatrix make_submetered(const GenerationConfig& cfg, const ReconstructionModel& model,
                             std::vector<std::string>* warnings) {
    GenerationConfig effective = cfg;
    const std::size_t l = model.latent_dim();
    if (effective.z_min.empty()) {
        effective.z_min = model.z_min;
        effective.z_max = model.z_max;
    }
    if (effective.z_min.size() != l)
        throw config_error("make_submetered: latent bounds length " +
                           std::to_string(effective.z_min.size()) + " != model L " +
                           std::to_string(l));

    LatentMatrix lm = gbm(effective, l);
    align_latent(lm, model.sigma_r, warnings);

    const std::size_t c = effective.n_clusters();
    const std::size_t per_cluster = lm.z.rows / c;
    const std::size_t b = effective.brands_per_class;
    for (std::size_t k = 0; k < c; ++k) {
        std::size_t b_k = b;
        if (per_cluster < b) {
            b_k = per_cluster;
            if (warnings)
                warnings->push_back("make_submetered: cluster " + std::to_string(k) + " has " +
                                    std::to_string(per_cluster) + " rows < " + std::to_string(b) +
                                    " brands; brand count clamped");
        }
        Mat cluster_points(per_cluster, l);
        std::copy_n(lm.z.row_ptr(k * per_cluster), per_cluster * l,
                    cluster_points.data.begin());
        Rng rng(effective.seed, make_stream(stream_id::kmeans, k));
        std::vector<std::int64_t> brand = kmeans(cluster_points, b_k, rng);
        for (std::size_t i = 0; i < per_cluster; ++i) lm.y_brand[k * per_cluster + i] = brand[i];
    }

    const std::int64_t m = static_cast<std::int64_t>(effective.modes_per_class);
    for (std::size_t i = 0; i < lm.z.rows; ++i) lm.y_class[i] = lm.y_g[i] / m;
    return lm;
}

}  // namespace hfsg
