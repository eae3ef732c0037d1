#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hfsg/aggregator.hpp"
#include "hfsg/bench.hpp"
#include "hfsg/latent.hpp"
#include "hfsg/metrics3d.hpp"
#include "hfsg/rng.hpp"
#include "hfsg/signalio.hpp"

using namespace hfsg;

namespace {

// A mains recording whose frequency drifts off-nominal, with an appliance
// current locked to the voltage phase: the ingestion path has to undo the
// drift before windows become comparable.
struct Recording {
    Waveform voltage;
    Waveform current;
};

Recording drifting_recording(double mains_hz, double fs, std::size_t n, std::uint64_t seed) {
    Recording rec;
    rec.voltage.sample_rate_hz = fs;
    rec.current.sample_rate_hz = fs;
    rec.voltage.samples.resize(n);
    rec.current.samples.resize(n);
    Rng rng(seed, 0);
    double a3 = rng.uniform(0.1, 0.4);
    double phi3 = rng.uniform(-M_PI / 4, M_PI / 4);
    for (std::size_t t = 0; t < n; ++t) {
        double theta = 2.0 * M_PI * mains_hz * static_cast<double>(t) / fs;
        rec.voltage.samples[t] = std::sin(theta);
        rec.current.samples[t] = 2.0 * std::sin(theta) + a3 * std::sin(3.0 * theta + phi3);
    }
    return rec;
}

}  // namespace

TEST_CASE("ingestion to synthesis round trip") {
    const double fs = 6000.0;
    const std::size_t spc = 100;            // nominal 60 Hz grid
    const std::size_t window = 12 * spc;    // 12 cycles per signature

    // concatenate recordings of several appliances, mains drifting to 59.4 Hz
    Waveform aligned_all;
    aligned_all.sample_rate_hz = fs;
    for (std::uint64_t appliance = 0; appliance < 6; ++appliance) {
        Recording rec = drifting_recording(59.4, fs, 40 * spc, 100 + appliance);
        Waveform aligned = align_cycles(rec.current, rec.voltage, spc);
        REQUIRE(aligned.samples.size() % spc == 0);
        // steady recording: one segment
        auto ranges = segment_events(aligned, spc, 1, 0.2);
        CHECK(ranges.size() == 1);
        aligned_all.samples.insert(aligned_all.samples.end(), aligned.samples.begin(),
                                   aligned.samples.end());
    }

    SignatureMatrix corpus = window_signatures(aligned_all, window, spc);
    REQUIRE(corpus.data.rows >= 12);
    corpus.sample_rate_hz = fs;

    // alignment makes drifted cycles mains-frequency-invariant: every
    // signature should be in phase with the nominal reference
    VoltageReference v = generate_voltage_reference(60.0, fs, window, 1.0);
    for (std::size_t i = 0; i < corpus.data.rows; ++i)
        CHECK(pearson(corpus.data.row(i), std::span<const double>(v.waveform.samples)) > 0.9);

    ReconstructionModel model = fit_pca_by_variance(corpus, 0.99);
    LatentMatrix z = project(model, corpus);
    double mae = reconstruction_mae(corpus, reconstruct(model, z.z));
    double peak = 0.0;
    for (double s : corpus.data.data) peak = std::max(peak, std::abs(s));
    CHECK(mae <= 0.02 * peak);

    // full synthesis on the ingested model
    SynthConfig cfg;
    cfg.gen.n_samples = 40;
    cfg.gen.n_classes = 2;
    cfg.gen.brands_per_class = 2;
    cfg.gen.seed = 9;
    cfg.aggregates = 30;
    cfg.k_min = 1;
    cfg.k_max = 2;
    cfg.tau = 0.5;
    SplitPair pair = make_datasets(cfg, model);
    CHECK(pair.train.scenarios() + pair.test.scenarios() == 30);
    CHECK(pair.train.x_a.data.cols == window);

    // synthetic output scores against the ingested corpus without errors
    MetricReport report = evaluate_metrics(corpus, pair.train.x_a, model, 3);
    CHECK(report.ip_alpha >= 0.0);
    CHECK(report.ip_alpha <= 1.0);
    CHECK(report.authenticity >= 0.0);

    // and feeds the regression problem builder
    FeatureLayout layout;
    layout.samples_per_cycle = spc;
    layout.wavelet_levels = 6;
    layout.vi_points = 20;
    VoltageReference v_run = generate_voltage_reference(60.0, fs, window, 1.0);
    RegressionProblem problem = make_regression_problem(pair.train, v_run, layout);
    CHECK(problem.features.rows == pair.train.scenarios());
    CHECK(problem.features.cols == layout.flat_length(window));
}
