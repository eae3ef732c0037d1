#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hfsg/errors.hpp"
#include "hfsg/latent.hpp"
#include "hfsg/pseudo_real.hpp"
#include "hfsg/rng.hpp"

using namespace hfsg;

namespace {

SignatureMatrix matrix_of(std::size_t rows, std::size_t cols, std::vector<double> values,
                          std::size_t spc = 1) {
    SignatureMatrix m;
    m.sample_rate_hz = 1.0;
    m.samples_per_cycle = spc;
    m.data = Mat(rows, cols);
    m.data.data = std::move(values);
    return m;
}

SignatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SignatureMatrix m;
    m.sample_rate_hz = 1.0;
    m.samples_per_cycle = 1;
    m.data = Mat(rows, cols);
    Rng rng(seed, 0);
    for (double& v : m.data.data) v = rng.normal();
    return m;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("fit_pca on identical rows yields zero projection and zero error") {
    SignatureMatrix x = matrix_of(4, 3, {3, 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2});
    ReconstructionModel model = fit_pca(x, 1);
    LatentMatrix z = project(model, x);
    for (double v : z.z.data) CHECK(std::abs(v) < 1e-12);
    SignatureMatrix x_hat = reconstruct(model, z.z);
    CHECK(reconstruction_mae(x, x_hat) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_pca hand eigendecomposition case") {
    // covariance by hand: diag(10/3, 0); all variance on the first axis
    SignatureMatrix x = matrix_of(4, 2, {1, 0, -1, 0, 2, 0, -2, 0});
    ReconstructionModel model = fit_pca(x, 2);
    CHECK(model.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.explained_variance_ratio[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.w_r(0, 0) == doctest::Approx(1.0).epsilon(1e-9));  // sign convention
    CHECK(std::abs(model.w_r(0, 1)) < 1e-9);
    CHECK(model.sigma_r[0] == doctest::Approx(std::sqrt(10.0 / 3.0)).epsilon(1e-12));
    CHECK(model.sigma_r[1] == 0.0);
    CHECK(model.z_min[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(model.z_max[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("project matches a naive triple-loop oracle") {
    SignatureMatrix train = random_matrix(6, 40, 17);
    ReconstructionModel model = fit_pca(train, 3);
    SignatureMatrix x = random_matrix(3, 40, 18);
    LatentMatrix z = project(model, x);

    // independent dense product oracle
    std::vector<double> mean(40, 0.0);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 40; ++j) mean[j] += train.data(i, j) / 6.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < 40; ++j)
                acc += (x.data(i, j) - mean[j]) * model.w_r(k, j);
            CHECK(z.z(i, k) == doctest::Approx(acc).epsilon(1e-10));
        }
}

TEST_CASE("reconstruct basis behavior") {
    SignatureMatrix train = random_matrix(8, 12, 23);
    ReconstructionModel model = fit_pca(train, 4);

    Mat zero(1, 4);
    SignatureMatrix mean_only = reconstruct(model, zero);
    for (std::size_t j = 0; j < 12; ++j)
        CHECK(mean_only.data(0, j) == doctest::Approx(model.mean_row[j]).epsilon(1e-12));

    Mat basis(1, 4);
    basis(0, 2) = 1.0;
    SignatureMatrix unit = reconstruct(model, basis);
    for (std::size_t j = 0; j < 12; ++j)
        CHECK(unit.data(0, j) ==
              doctest::Approx(model.mean_row[j] + model.w_r(2, j)).epsilon(1e-10));
}

TEST_CASE("full-rank round trip is exact") {
    SignatureMatrix x = random_matrix(6, 12, 29);
    ReconstructionModel model = fit_pca(x, 6);
    LatentMatrix z = project(model, x);
    SignatureMatrix x_hat = reconstruct(model, z.z);
    for (std::size_t i = 0; i < x.data.data.size(); ++i)
        CHECK(x_hat.data.data[i] == doctest::Approx(x.data.data[i]).epsilon(1e-8));
}

TEST_CASE("project-reconstruct round trip in latent space") {
    SignatureMatrix train = random_matrix(10, 25, 31);
    ReconstructionModel model = fit_pca(train, 5);
    Mat z(4, 5);
    Rng rng(37, 0);
    for (double& v : z.data) v = rng.normal() * 3.0;
    SignatureMatrix x = reconstruct(model, z);
    LatentMatrix z2 = project(model, x);
    for (std::size_t i = 0; i < z.data.size(); ++i)
        CHECK(z2.z.data[i] == doctest::Approx(z.data[i]).epsilon(1e-8));
}

TEST_CASE("reconstruction_mae") {
    Mat a(2, 2), b(2, 2);
    a.data = {1, 2, 3, 4};
    b.data = {1, 2, 3, 4};
    CHECK(reconstruction_mae(a, b) == 0.0);
    for (double& v : b.data) v += 0.5;
    CHECK(reconstruction_mae(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    b.data = {2, 2, 3, 2};
    CHECK(reconstruction_mae(a, b) == doctest::Approx(0.75).epsilon(1e-15));
    Mat c(1, 2);
    CHECK_THROWS_AS(reconstruction_mae(a, c), dimension_error);
}

TEST_CASE("w_r rows are orthonormal and variance ratios behave") {
    SignatureMatrix x = random_matrix(12, 30, 41);
    ReconstructionModel model = fit_pca(x, 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < 30; ++t) dot += model.w_r(i, t) * model.w_r(j, t);
            CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        }
    double cum = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        double evr = model.explained_variance_ratio[i];
        CHECK(evr >= 0.0);
        if (i > 0) CHECK(evr <= model.explained_variance_ratio[i - 1] + 1e-12);
        cum += evr;
    }
    CHECK(cum <= 1.0 + 1e-12);
}

TEST_CASE("reconstruction mae is non-increasing in l") {
    SignatureMatrix x = random_matrix(8, 20, 43);
    double prev = 1e300;
    for (std::size_t l = 1; l <= 8; ++l) {
        ReconstructionModel model = fit_pca(x, l);
        LatentMatrix z = project(model, x);
        double mae = reconstruction_mae(x, reconstruct(model, z.z));
        CHECK(mae <= prev + 1e-12);
        prev = mae;
    }
}

TEST_CASE("fit_pca is bit-deterministic") {
    SignatureMatrix x = random_matrix(9, 15, 47);
    ReconstructionModel a = fit_pca(x, 4);
    ReconstructionModel b = fit_pca(x, 4);
    CHECK(a.w_r.data == b.w_r.data);
    CHECK(a.mean_row == b.mean_row);
    CHECK(a.sigma_r == b.sigma_r);
    CHECK(a.z_min == b.z_min);
    CHECK(a.z_max == b.z_max);
    CHECK(a.explained_variance_ratio == b.explained_variance_ratio);
}

TEST_CASE("fit_pca_by_variance picks the dominant component") {
    // column 0 carries ~99.99% of the variance
    SignatureMatrix x = matrix_of(6, 3,
                                  {10, 0.1, 0, -10, -0.1, 0, 20, 0.1, 0, -20, -0.1, 0, 15, -0.1,
                                   0, -15, 0.1, 0});
    ReconstructionModel low = fit_pca_by_variance(x, 0.9);
    CHECK(low.latent_dim() == 1);
    ReconstructionModel high = fit_pca_by_variance(x, 0.999999999);
    CHECK(high.latent_dim() >= 2);
}

TEST_CASE("fit_pca validates input") {
    SignatureMatrix x = random_matrix(4, 6, 53);
    CHECK_THROWS_AS(fit_pca(x, 0), dimension_error);
    CHECK_THROWS_AS(fit_pca(x, 5), dimension_error);  // l > min(N, T)
    SignatureMatrix one = random_matrix(1, 6, 54);
    CHECK_THROWS_AS(fit_pca(one, 1), validation_error);
    SignatureMatrix bad = random_matrix(4, 6, 55);
    bad.data(2, 3) = std::nan("");
    CHECK_THROWS_AS(fit_pca(bad, 2), validation_error);
    CHECK_THROWS_AS(project(fit_pca(x, 2), random_matrix(2, 7, 56)), dimension_error);
}

TEST_CASE("pseudo-real corpus compresses to few components") {
    PseudoRealConfig cfg;
    cfg.n_signatures = 60;
    cfg.window_len = 3000;
    cfg.sample_rate_hz = 30000.0;
    cfg.mains_frequency_hz = 60.0;
    cfg.n_classes = 4;
    cfg.seed = 3;
    SignatureMatrix x = make_pseudo_real(cfg);
    CHECK(x.samples_per_cycle == 500);
    ReconstructionModel model = fit_pca_by_variance(x, 0.99);
    double cum = 0.0;
    for (double v : model.explained_variance_ratio) cum += v;
    CHECK(cum >= 0.99);
    CHECK(model.latent_dim() <= 30);  // harmonic series spans <= 2*15 dimensions

    LatentMatrix z = project(model, x);
    double mae = reconstruction_mae(x, reconstruct(model, z.z));
    double peak = 0.0;
    for (double v : x.data.data) peak = std::max(peak, std::abs(v));
    CHECK(mae <= 0.01 * peak);
}

TEST_CASE("pcamod round trip and corruption detection") {
    SignatureMatrix x = random_matrix(7, 14, 59);
    x.sample_rate_hz = 30000.0;
    x.samples_per_cycle = 7;
    ReconstructionModel model = fit_pca(x, 3);
    std::string path = temp_path("hfsg_model.pcamod");
    write_model(model, path);
    ReconstructionModel back = read_model(path);
    CHECK(back.w_r.data == model.w_r.data);
    CHECK(back.mean_row == model.mean_row);
    CHECK(back.sigma_r == model.sigma_r);
    CHECK(back.z_min == model.z_min);
    CHECK(back.z_max == model.z_max);
    CHECK(back.explained_variance_ratio == model.explained_variance_ratio);
    CHECK(back.sample_rate_hz == 30000.0);
    CHECK(back.samples_per_cycle == 7);

    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXXXX", 6);
        f.close();
        CHECK_THROWS_AS(read_model(path), format_error);
    }
    SUBCASE("truncated section") {
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
        CHECK_THROWS_AS(read_model(path), format_error);
    }
    std::filesystem::remove(path);
}

TEST_CASE("pcamod reader survives truncation at every byte offset") {
    SignatureMatrix x = random_matrix(5, 6, 61);
    ReconstructionModel model = fit_pca(x, 2);
    std::string path = temp_path("hfsg_trunc.pcamod");
    write_model(model, path);
    const auto full_size = std::filesystem::file_size(path);
    for (std::uintmax_t len = 0; len < full_size; ++len) {
        write_model(model, path);
        std::filesystem::resize_file(path, len);
        CHECK_THROWS_AS(read_model(path), format_error);
    }
    std::filesystem::remove(path);
}
