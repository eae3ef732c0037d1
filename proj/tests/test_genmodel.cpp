#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "hfsg/errors.hpp"
#include "hfsg/genmodel.hpp"
#include "hfsg/pseudo_real.hpp"

using namespace hfsg;

namespace {

GenerationConfig config_with_bounds(std::size_t l, double lo = -2.0, double hi = 2.0) {
    GenerationConfig cfg;
    cfg.z_min.assign(l, lo);
    cfg.z_max.assign(l, hi);
    return cfg;
}

ReconstructionModel small_model() {
    PseudoRealConfig cfg;
    cfg.n_signatures = 40;
    cfg.window_len = 600;
    cfg.sample_rate_hz = 6000.0;
    cfg.mains_frequency_hz = 60.0;
    cfg.n_classes = 3;
    cfg.seed = 13;
    return fit_pca_by_variance(make_pseudo_real(cfg), 0.99);
}

}  // namespace

TEST_CASE("sample_covariance trace normalization") {
    Rng rng(1, 0);
    SUBCASE("1x1 case collapses to sigma^2 / m") {
        for (int rep = 0; rep < 5; ++rep) {
            Mat cov = sample_covariance(1, 4, 3.0, rng);
            CHECK(cov(0, 0) == doctest::Approx(9.0 / 4.0).epsilon(1e-12));
        }
    }
    SUBCASE("trace equals sigma^2 / m for any draw") {
        for (std::size_t l : {2u, 5u, 11u}) {
            for (std::size_t m : {1u, 3u}) {
                Mat cov = sample_covariance(l, m, 2.5, rng);
                double trace = 0.0;
                for (std::size_t i = 0; i < l; ++i) trace += cov(i, i);
                CHECK(trace == doctest::Approx(2.5 * 2.5 / static_cast<double>(m)).epsilon(1e-12));
                // symmetry
                for (std::size_t i = 0; i < l; ++i)
                    for (std::size_t j = 0; j < l; ++j)
                        CHECK(cov(i, j) == doctest::Approx(cov(j, i)).epsilon(1e-10));
            }
        }
    }
    SUBCASE("psd via eigen-solver oracle, cholesky succeeds") {
        Rng r2(77, 0);
        Mat cov = sample_covariance(3, 2, 2.0, r2);
        Eigen::MatrixXd m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = cov(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        for (int i = 0; i < 3; ++i) CHECK(es.eigenvalues()(i) >= -1e-12);
        Eigen::LLT<Eigen::MatrixXd> llt(m + 1e-12 * Eigen::MatrixXd::Identity(3, 3));
        CHECK(llt.info() == Eigen::Success);
    }
    CHECK_THROWS_AS(sample_covariance(0, 1, 1.0, rng), config_error);
    CHECK_THROWS_AS(sample_covariance(2, 1, 0.0, rng), config_error);
}

TEST_CASE("gbm row counts and labels") {
    SUBCASE("single cluster") {
        GenerationConfig cfg = config_with_bounds(3);
        cfg.n_samples = 4;
        cfg.n_classes = 1;
        cfg.modes_per_class = 1;
        LatentMatrix lm = gbm(cfg, 3);
        CHECK(lm.z.rows == 4);
        for (std::int64_t y : lm.y_g) CHECK(y == 0);
    }
    SUBCASE("floor distribution across clusters") {
        GenerationConfig cfg = config_with_bounds(3);
        cfg.n_samples = 100;
        cfg.n_classes = 2;
        cfg.modes_per_class = 3;
        LatentMatrix lm = gbm(cfg, 3);
        CHECK(lm.z.rows == 96);  // 6 clusters x floor(100/6)=16
        std::vector<std::size_t> counts(6, 0);
        for (std::int64_t y : lm.y_g) ++counts[static_cast<std::size_t>(y)];
        for (std::size_t c : counts) CHECK(c == 16);
    }
    SUBCASE("too many clusters for N") {
        GenerationConfig cfg = config_with_bounds(2);
        cfg.n_samples = 5;
        cfg.n_classes = 3;
        cfg.modes_per_class = 2;
        CHECK_THROWS_AS(gbm(cfg, 2), config_error);
    }
}

TEST_CASE("gbm blob specs satisfy the covariance invariants") {
    GenerationConfig cfg = config_with_bounds(5);
    cfg.n_samples = 60;
    cfg.n_classes = 3;
    cfg.modes_per_class = 2;
    cfg.sigma_min = 0.4;
    cfg.sigma_max = 2.0;
    cfg.seed = 55;
    std::vector<BlobSpec> blobs;
    LatentMatrix lm = gbm(cfg, 5, &blobs);
    REQUIRE(blobs.size() == 6);
    for (const BlobSpec& blob : blobs) {
        CHECK_NOTHROW(blob.validate(cfg.modes_per_class));
        CHECK(blob.spread >= cfg.sigma_min);
        CHECK(blob.spread <= cfg.sigma_max);
        double trace = 0.0;
        for (std::size_t i = 0; i < 5; ++i) trace += blob.covariance(i, i);
        CHECK(trace * cfg.modes_per_class / (blob.spread * blob.spread) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(lm.z.rows == 60);
}

TEST_CASE("gbm with zero separability centers every cluster at the origin") {
    // Monte-Carlo bound: per-cluster sample mean is within 4*sigma_max/(sqrt(M)*sqrt(n))
    // of zero componentwise (per-dimension variance <= trace = sigma_k^2/M <= sigma_max^2/M)
    const std::size_t l = 6;
    const std::size_t per_cluster = 50;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenerationConfig cfg = config_with_bounds(l);
        cfg.n_samples = 2 * per_cluster;
        cfg.n_classes = 2;
        cfg.modes_per_class = 1;
        cfg.separability = 0.0;
        cfg.sigma_min = 0.5;
        cfg.sigma_max = 1.5;
        cfg.seed = seed;
        LatentMatrix lm = gbm(cfg, l);
        double bound = 4.0 * cfg.sigma_max / std::sqrt(static_cast<double>(per_cluster));
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t j = 0; j < l; ++j) {
                double mean = 0.0;
                for (std::size_t i = 0; i < per_cluster; ++i)
                    mean += lm.z(k * per_cluster + i, j);
                mean /= static_cast<double>(per_cluster);
                CHECK(std::abs(mean) <= bound);
            }
        }
    }
}

TEST_CASE("centroids scale exactly with separability") {
    const std::size_t l = 4;
    auto run = [&](double eps) {
        GenerationConfig cfg = config_with_bounds(l, -1.5, 3.0);
        cfg.n_samples = 30;
        cfg.n_classes = 3;
        cfg.modes_per_class = 2;
        cfg.separability = eps;
        cfg.seed = 99;
        return gbm(cfg, l);
    };
    LatentMatrix z0 = run(0.0);
    LatentMatrix z1 = run(1.0);
    LatentMatrix z2 = run(2.0);
    // same noise draws, so z(eps) - z(0) = eps * (2u - 1) exactly per row
    for (std::size_t i = 0; i < z0.z.data.size(); ++i) {
        double d1 = z1.z.data[i] - z0.z.data[i];
        double d2 = z2.z.data[i] - z0.z.data[i];
        CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-9));
    }
}

TEST_CASE("mean pairwise centroid distance is non-decreasing in separability") {
    const std::size_t l = 4;
    double prev = -1.0;
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        GenerationConfig cfg = config_with_bounds(l);
        cfg.n_samples = 120;
        cfg.n_classes = 3;
        cfg.modes_per_class = 2;
        cfg.separability = eps;
        cfg.seed = 7;
        LatentMatrix lm = gbm(cfg, l);
        const std::size_t c = 6, per = 20;
        Mat centers(c, l);
        for (std::size_t k = 0; k < c; ++k)
            for (std::size_t i = 0; i < per; ++i)
                for (std::size_t j = 0; j < l; ++j) centers(k, j) += lm.z(k * per + i, j) / per;
        double mean_dist = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < c; ++a)
            for (std::size_t b = a + 1; b < c; ++b) {
                double acc = 0.0;
                for (std::size_t j = 0; j < l; ++j) {
                    double d = centers(a, j) - centers(b, j);
                    acc += d * d;
                }
                mean_dist += std::sqrt(acc);
                ++pairs;
            }
        mean_dist /= static_cast<double>(pairs);
        CHECK(mean_dist >= prev - 1e-9);
        prev = mean_dist;
    }
}

TEST_CASE("align_latent fixes scale and decorrelates") {
    SUBCASE("axis-aligned input with matching variances is a fixed point") {
        // sample covariance is exactly diagonal: {(a,0),(-a,0),(0,b),(0,-b)}
        LatentMatrix lm = LatentMatrix::unlabeled(Mat(4, 2));
        double a = 3.0, b = 1.0;
        lm.z(0, 0) = a;
        lm.z(1, 0) = -a;
        lm.z(2, 1) = b;
        lm.z(3, 1) = -b;
        std::vector<double> sigma_r = {std::sqrt(2.0 * a * a / 3.0),
                                       std::sqrt(2.0 * b * b / 3.0)};
        Mat before = lm.z;
        align_latent(lm, sigma_r);
        for (std::size_t i = 0; i < before.data.size(); ++i)
            CHECK(lm.z.data[i] == doctest::Approx(before.data[i]).epsilon(1e-9));
    }
    SUBCASE("output columns match sigma_r and are uncorrelated") {
        Rng rng(5, 0);
        const std::size_t n = 200, l = 3;
        LatentMatrix lm = LatentMatrix::unlabeled(Mat(n, l));
        // correlated two-cluster toy data
        for (std::size_t i = 0; i < n; ++i) {
            double base = (i % 2 == 0) ? 2.0 : -2.0;
            double u = rng.normal(), v = rng.normal(), w = rng.normal();
            lm.z(i, 0) = base + u;
            lm.z(i, 1) = base + 0.8 * u + 0.3 * v;
            lm.z(i, 2) = 0.5 * w - base;
        }
        std::vector<double> sigma_r = {4.0, 2.0, 1.0};
        align_latent(lm, sigma_r);

        std::vector<double> mean(l, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < l; ++j) mean[j] += lm.z(i, j) / n;
        for (std::size_t p = 0; p < l; ++p) {
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = lm.z(i, p) - mean[p];
                var += d * d;
            }
            var /= static_cast<double>(n - 1);
            CHECK(std::sqrt(var) == doctest::Approx(sigma_r[p]).epsilon(1e-6));
            for (std::size_t q = p + 1; q < l; ++q) {
                double cov = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    cov += (lm.z(i, p) - mean[p]) * (lm.z(i, q) - mean[q]) / (n - 1);
                CHECK(std::abs(cov) < 1e-8);
            }
        }
    }
    SUBCASE("degenerate synthetic component is zeroed with a warning") {
        LatentMatrix lm = LatentMatrix::unlabeled(Mat(5, 2));
        for (std::size_t i = 0; i < 5; ++i) lm.z(i, 0) = static_cast<double>(i);
        // column 1 constant -> one zero-variance synthetic component
        for (std::size_t i = 0; i < 5; ++i) lm.z(i, 1) = 7.0;
        std::vector<std::string> warnings;
        align_latent(lm, {1.0, 1.0}, &warnings);
        CHECK(warnings.size() == 1);
        for (std::size_t i = 0; i < 5; ++i) CHECK(lm.z(i, 1) == 0.0);
    }
}

namespace {

double wcss(const Mat& points, const std::vector<int>& labels, int k) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        std::vector<double> mean(points.cols, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < points.rows; ++i)
            if (labels[i] == c) {
                for (std::size_t j = 0; j < points.cols; ++j) mean[j] += points(i, j);
                ++count;
            }
        if (count == 0) return 1e300;  // only count nonempty partitions
        for (double& v : mean) v /= static_cast<double>(count);
        for (std::size_t i = 0; i < points.rows; ++i)
            if (labels[i] == c)
                for (std::size_t j = 0; j < points.cols; ++j) {
                    double d = points(i, j) - mean[j];
                    total += d * d;
                }
    }
    return total;
}

}  // namespace

TEST_CASE("kmeans basics and exhaustive partition oracle") {
    SUBCASE("k=1 labels everything zero") {
        Mat pts(5, 2);
        Rng rng(2, 0);
        for (double& v : pts.data) v = rng.normal();
        Rng krng(3, 0);
        auto labels = kmeans(pts, 1, krng);
        for (auto y : labels) CHECK(y == 0);
    }
    SUBCASE("duplicate pairs co-labeled with zero within-cluster variance") {
        Mat pts(4, 2);
        pts.data = {0, 0, 0, 0, 10, 10, 10, 10};
        Rng krng(4, 0);
        auto labels = kmeans(pts, 2, krng);
        CHECK(labels[0] == labels[1]);
        CHECK(labels[2] == labels[3]);
        CHECK(labels[0] != labels[2]);
        std::vector<int> as_int(labels.begin(), labels.end());
        CHECK(wcss(pts, as_int, 2) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("12 points in 3 tight blobs match the brute-force optimum") {
        Mat pts(12, 2);
        Rng rng(6, 0);
        double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
        for (std::size_t i = 0; i < 12; ++i) {
            pts(i, 0) = centers[i % 3][0] + 0.1 * rng.normal();
            pts(i, 1) = centers[i % 3][1] + 0.1 * rng.normal();
        }
        Rng krng(8, 0);
        auto labels = kmeans(pts, 3, krng);
        std::vector<int> mine(labels.begin(), labels.end());
        double my_wcss = wcss(pts, mine, 3);

        // exhaustive search over all 3^12 assignments
        double best = 1e300;
        for (int code = 0; code < 531441; ++code) {
            std::vector<int> assign(12);
            int c = code;
            for (int i = 0; i < 12; ++i) {
                assign[i] = c % 3;
                c /= 3;
            }
            best = std::min(best, wcss(pts, assign, 3));
        }
        CHECK(my_wcss == doctest::Approx(best).epsilon(1e-9));
    }
    SUBCASE("k exceeding point count is rejected") {
        Mat pts(2, 1);
        Rng krng(9, 0);
        CHECK_THROWS_AS(kmeans(pts, 3, krng), config_error);
    }
}

TEST_CASE("make_submetered labels and determinism") {
    ReconstructionModel model = small_model();
    GenerationConfig cfg;
    cfg.n_samples = 80;
    cfg.n_classes = 2;
    cfg.modes_per_class = 2;
    cfg.brands_per_class = 2;
    cfg.separability = 1.0;
    cfg.seed = 21;

    LatentMatrix lm = make_submetered(cfg, model);
    CHECK(lm.z.rows == 80);
    CHECK(lm.z.cols == model.latent_dim());

    std::vector<std::size_t> class_counts(2, 0);
    for (std::size_t i = 0; i < lm.z.rows; ++i) {
        CHECK(lm.y_class[i] == lm.y_g[i] / 2);
        CHECK(lm.y_class[i] >= 0);
        CHECK(lm.y_class[i] < 2);
        CHECK(lm.y_brand[i] >= 0);
        CHECK(lm.y_brand[i] < 2);
        ++class_counts[static_cast<std::size_t>(lm.y_class[i])];
    }
    CHECK(class_counts[0] == 40);
    CHECK(class_counts[1] == 40);

    // brand labels never cross mode boundaries: each cluster block carries its
    // own kmeans labels over the local brand range
    const std::size_t per_cluster = 20;
    for (std::size_t k = 0; k < 4; ++k) {
        std::set<std::int64_t> seen;
        for (std::size_t i = 0; i < per_cluster; ++i)
            seen.insert(lm.y_brand[k * per_cluster + i]);
        CHECK(seen.size() == 2);  // both brands present inside every mode
    }

    LatentMatrix again = make_submetered(cfg, model);
    CHECK(again.z.data == lm.z.data);
    CHECK(again.y_g == lm.y_g);
    CHECK(again.y_class == lm.y_class);
    CHECK(again.y_brand == lm.y_brand);
}

TEST_CASE("make_submetered clamps brand count for tiny clusters") {
    ReconstructionModel model = small_model();
    GenerationConfig cfg;
    cfg.n_samples = 3;
    cfg.n_classes = 1;
    cfg.modes_per_class = 1;
    cfg.brands_per_class = 5;
    cfg.seed = 2;
    std::vector<std::string> warnings;
    LatentMatrix lm = make_submetered(cfg, model, &warnings);
    CHECK(lm.z.rows == 3);
    REQUIRE(!warnings.empty());
    bool clamped_warning = false;
    for (const auto& w : warnings)
        if (w.find("clamped") != std::string::npos) clamped_warning = true;
    CHECK(clamped_warning);
    for (auto b : lm.y_brand) {
        CHECK(b >= 0);
        CHECK(b < 3);
    }
}
