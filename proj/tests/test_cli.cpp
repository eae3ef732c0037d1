#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hfsg/cli.hpp"
#include "hfsg/config.hpp"
#include "hfsg/errors.hpp"
#include "hfsg/sigmat_io.hpp"

using namespace hfsg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path.string() : (path / rel).string();
    }
};

std::string write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
    return p.string();
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("run config parsing") {
    TempDir dir("hfsg_cfg_test");
    SUBCASE("empty file keeps every default") {
        std::string p = write_file(dir.path / "empty.cfg", "\n# just a comment\n");
        RunConfig cfg = RunConfig::from_file(p);
        RunConfig defaults;
        CHECK(cfg.manifest_text() == defaults.manifest_text());
    }
    SUBCASE("constraint violations name the key") {
        RunConfig cfg;
        cfg.apply("modes_per_class", "0");
        try {
            cfg.validate();
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("modes_per_class") != std::string::npos);
        }
    }
    SUBCASE("unknown keys are rejected by name") {
        RunConfig cfg;
        try {
            cfg.apply("modes_per_klass", "3");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("modes_per_klass") != std::string::npos);
        }
    }
    SUBCASE("type mismatches name the key") {
        RunConfig cfg;
        CHECK_THROWS_AS(cfg.apply("tau", "zebra"), config_error);
        CHECK_THROWS_AS(cfg.apply("n_samples", "-4"), config_error);
        CHECK_THROWS_AS(cfg.apply("split_mode", "diagonal"), config_error);
    }
    SUBCASE("later assignments override file values and land in the manifest") {
        std::string p = write_file(dir.path / "base.cfg", "seed=5\nn_classes=3\n");
        RunConfig cfg = RunConfig::from_file(p);
        CHECK(cfg.seed == 5);
        cfg.apply("seed", "9");
        CHECK(cfg.seed == 9);
        CHECK(cfg.manifest_text().find("seed=9\n") != std::string::npos);
        CHECK(cfg.manifest_text().find("n_classes=3\n") != std::string::npos);
    }
}

TEST_CASE("cli end-to-end pipeline") {
    TempDir dir("hfsg_cli_test");
    std::string corpus = dir.str("corpus.sigmat");
    std::string model = dir.str("model.pcamod");

    CHECK(run_cli({"corpus", "--out", corpus, "--signatures", "60", "--window", "1200",
                   "--sample-rate", "6000", "--classes", "4", "--seed", "3"}) == 0);
    CHECK(fs::exists(corpus));

    CHECK(run_cli({"train", "--input", corpus, "--variance-threshold", "0.99", "--out",
                   model}) == 0);
    CHECK(fs::exists(model));

    std::string cfg_path = write_file(dir.path / "run.cfg",
                                      "n_samples=48\nn_classes=3\nbrands_per_class=2\n"
                                      "aggregates=40\nk_min=1\nk_max=2\nseed=11\ntau=0.5\n");

    SUBCASE("generate emits latent file and labels") {
        std::string out = dir.str("gen");
        CHECK(run_cli({"generate", "--model", model, "--config", cfg_path, "--out-dir", out}) ==
              0);
        CHECK(fs::exists(out + "/z.sigmat"));
        CHECK(fs::exists(out + "/labels.csv"));
        CHECK(fs::exists(out + "/manifest.cfg"));
        SignatureMatrix z = read_signature_matrix(out + "/z.sigmat");
        CHECK(z.data.rows == 48);
    }

    SUBCASE("synth writes the full dataset and is bit-deterministic") {
        std::string out1 = dir.str("synth1");
        std::string out2 = dir.str("synth2");
        CHECK(run_cli({"synth", "--model", model, "--config", cfg_path, "--out-dir", out1}) == 0);
        CHECK(run_cli({"synth", "--model", model, "--config", cfg_path, "--out-dir", out2}) == 0);
        for (const char* name :
             {"x_train.sigmat", "x_test.sigmat", "p_train.csv", "p_test.csv",
              "yclass_train.csv", "yclass_test.csv", "ybrand_train.csv", "ybrand_test.csv",
              "activation_train.csv", "activation_test.csv", "x_submetered.sigmat",
              "labels_submetered.csv", "manifest.cfg"}) {
            CHECK(fs::exists(out1 + "/" + name));
            CHECK(slurp(out1 + "/" + name) == slurp(out2 + "/" + name));
        }
    }

    SUBCASE("flag overrides beat config values") {
        std::string out = dir.str("synth_override");
        CHECK(run_cli({"synth", "--model", model, "--config", cfg_path, "--out-dir", out,
                       "--set", "aggregates=20", "--seed", "99"}) == 0);
        std::ifstream manifest(out + "/manifest.cfg");
        std::string text((std::istreambuf_iterator<char>(manifest)),
                         std::istreambuf_iterator<char>());
        CHECK(text.find("aggregates=20\n") != std::string::npos);
        CHECK(text.find("seed=99\n") != std::string::npos);
        SignatureMatrix train = read_signature_matrix(out + "/x_train.sigmat");
        SignatureMatrix test = read_signature_matrix(out + "/x_test.sigmat");
        CHECK(train.data.rows + test.data.rows == 20);
    }

    SUBCASE("features and evaluate run on synth output") {
        std::string out = dir.str("synth3");
        REQUIRE(run_cli({"synth", "--model", model, "--config", cfg_path, "--out-dir", out}) ==
                0);
        std::string feat_csv = dir.str("features.csv");
        CHECK(run_cli({"features", "--input", out + "/x_train.sigmat", "--wavelet-levels", "6",
                       "--out", feat_csv}) == 0);
        std::ifstream f(feat_csv);
        std::string header;
        std::getline(f, header);
        CHECK(header.find("form_factor") == 0);
        CHECK(header.find("phase_shift") != std::string::npos);

        std::string report = dir.str("report.csv");
        CHECK(run_cli({"evaluate", "--real", corpus, "--synthetic", out + "/x_train.sigmat",
                       "--model", model, "--knn-k", "3", "--out", report}) == 0);
        CHECK(fs::exists(report));
    }

    SUBCASE("bad config key fails with nonzero exit") {
        std::string bad = write_file(dir.path / "bad.cfg", "modes_per_class=0\n");
        CHECK(run_cli({"synth", "--model", model, "--config", bad, "--out-dir",
                       dir.str("never")}) != 0);
        CHECK(!fs::exists(dir.str("never")));
    }

    SUBCASE("corrupted model file is reported") {
        std::string broken = dir.str("broken.pcamod");
        write_file(broken, "PCAMODgarbage");
        CHECK(run_cli({"synth", "--model", broken, "--config", cfg_path, "--out-dir",
                       dir.str("never2")}) != 0);
    }
}

TEST_CASE("cli bench runs a tiny sweep") {
    TempDir dir("hfsg_cli_bench");
    std::string cfg_path = write_file(dir.path / "bench.cfg",
                                      "n_samples=40\nn_classes=2\nbrands_per_class=2\n"
                                      "aggregates=40\nk_min=1\nk_max=2\nseed=2\ntau=0.6\n"
                                      "wavelet_levels=5\nvi_points=10\ntree_max_depth=4\n");
    std::string out = dir.str("result.csv");
    CHECK(run_cli({"bench", "--experiment", "separability", "--config", cfg_path, "--models",
                   "knn", "--seeds", "2", "--sweep", "0.5,1.5", "--out", out}) == 0);
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    CHECK(header == "sweep_value,model,seed,r2");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2 * 2);  // 2 sweep values x 2 seeds x 1 model
}

TEST_CASE("cli selftest passes on a fresh build") {
    CHECK(run_cli({"selftest"}) == 0);
}
