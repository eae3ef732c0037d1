#include "hfsg/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hfsg/aggregator.hpp"
#include "hfsg/bench.hpp"
#include "hfsg/config.hpp"
#include "hfsg/errors.hpp"
#include "hfsg/features.hpp"
#include "hfsg/genmodel.hpp"
#include "hfsg/latent.hpp"
#include "hfsg/metrics3d.hpp"
#include "hfsg/pseudo_real.hpp"
#include "hfsg/sigmat_io.hpp"

namespace hfsg {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open " + path);
    out << text;
    if (!out) throw format_error("short write to " + path);
}

Mat binmat_to_mat(const BinMat& b) {
    Mat m(b.rows, b.cols);
    for (std::size_t i = 0; i < b.data.size(); ++i) m.data[i] = b.data[i];
    return m;
}

void write_labels_csv(const LatentMatrix& lm, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open " + path);
    out << "row,y_g,y_class,y_brand\n";
    for (std::size_t i = 0; i < lm.z.rows; ++i)
        out << i << ',' << lm.y_g[i] << ',' << lm.y_class[i] << ',' << lm.y_brand[i] << '\n';
    if (!out) throw format_error("short write to " + path);
}

void write_dataset(const LabeledDataset& d, const std::string& dir, const std::string& side) {
    write_signature_matrix(d.x_a, dir + "/x_" + side + ".sigmat");
    write_matrix_csv(d.p_a, dir + "/p_" + side + ".csv");
    write_matrix_csv(binmat_to_mat(d.y_class_ind), dir + "/yclass_" + side + ".csv");
    write_matrix_csv(binmat_to_mat(d.y_brand_ind), dir + "/ybrand_" + side + ".csv");
    write_matrix_csv(binmat_to_mat(d.activation.a), dir + "/activation_" + side + ".csv");
}

VoltageReference voltage_for(const SignatureMatrix& x, double amplitude) {
    double f0 = x.sample_rate_hz / static_cast<double>(x.samples_per_cycle);
    return generate_voltage_reference(f0, x.sample_rate_hz, x.data.cols, amplitude);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const std::string& item : split_list(s)) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw config_error(key + ": bad number '" + item + "'");
        }
        if (pos != item.size()) throw config_error(key + ": bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw config_error(key + ": empty list");
    return out;
}

// ---------------------------------------------------------------------------
// subcommand payloads

struct TrainArgs {
    std::string input;
    std::string out;
    std::size_t components = 50;
    double variance_threshold = 0.99;
    bool use_threshold = false;
};

int cmd_train(const TrainArgs& a) {
    SignatureMatrix x = read_signature_matrix(a.input);
    ReconstructionModel model = a.use_threshold
                                    ? fit_pca_by_variance(x, a.variance_threshold)
                                    : fit_pca(x, a.components);
    write_model(model, a.out);

    LatentMatrix z = project(model, x);
    SignatureMatrix x_hat = reconstruct(model, z.z);
    double cum = 0.0;
    for (double v : model.explained_variance_ratio) cum += v;
    std::printf("trained model: L=%zu T=%zu cumulative_variance=%.6f train_mae=%.6g\n",
                model.latent_dim(), model.signal_dim(), cum, reconstruction_mae(x, x_hat));
    std::printf("written: %s\n", a.out.c_str());
    return 0;
}

struct CorpusArgs {
    std::string out;
    PseudoRealConfig cfg;
};

int cmd_corpus(const CorpusArgs& a) {
    SignatureMatrix m = make_pseudo_real(a.cfg);
    write_signature_matrix(m, a.out);
    std::printf("pseudo-real corpus: %zu x %zu at %.0f Hz, %zu classes -> %s\n", m.data.rows,
                m.data.cols, m.sample_rate_hz, a.cfg.n_classes, a.out.c_str());
    return 0;
}

struct GenerateArgs {
    std::string model_path;
    std::string out_dir = ".";
    std::string config_path;
    std::vector<std::string> overrides;
};

RunConfig load_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("--set: expected key=value, got '" + kv + "'");
        cfg.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

int cmd_generate(const GenerateArgs& a, const RunConfig& cfg) {
    ReconstructionModel model = read_model(a.model_path);
    SynthConfig synth = cfg.to_synth_config(model.latent_dim());

    std::vector<std::string> warnings;
    LatentMatrix lm = make_submetered(synth.gen, model, &warnings);
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    fs::create_directories(a.out_dir);
    SignatureMatrix z_out;
    z_out.data = lm.z;
    z_out.sample_rate_hz = 1.0;
    z_out.samples_per_cycle = 1;
    write_signature_matrix(z_out, a.out_dir + "/z.sigmat");
    write_labels_csv(lm, a.out_dir + "/labels.csv");
    std::string manifest = cfg.manifest_text();
    manifest += "command=generate\nmodel=" + a.model_path +
                "\neffective_samples=" + std::to_string(lm.z.rows) + "\n";
    write_text(a.out_dir + "/manifest.cfg", manifest);
    std::printf("generated %zu latent signatures (%zu clusters) -> %s\n", lm.z.rows,
                synth.gen.n_clusters(), a.out_dir.c_str());
    return 0;
}

struct SynthArgs {
    std::string model_path;
    std::string out_dir = ".";
    std::string config_path;
    std::vector<std::string> overrides;
};

int cmd_synth(const SynthArgs& a, const RunConfig& cfg) {
    std::string model_path = !a.model_path.empty() ? a.model_path : cfg.model_path;
    if (model_path.empty())
        throw config_error("synth: --model or config key model_path is required");
    ReconstructionModel model = read_model(model_path);
    SynthConfig synth = cfg.to_synth_config(model.latent_dim());

    std::vector<std::string> warnings;
    SplitPair pair = make_datasets(synth, model, &warnings);
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    fs::create_directories(a.out_dir);
    write_dataset(pair.train, a.out_dir, "train");
    write_dataset(pair.test, a.out_dir, "test");

    // the decoded, phase-corrected submetered signatures the aggregates were
    // built from; the per-cluster streams reproduce them exactly
    LatentMatrix lm = make_submetered(synth.gen, model);
    SignatureMatrix x_sub = reconstruct(model, lm.z);
    VoltageReference v = voltage_for(x_sub, synth.voltage_amplitude);
    x_sub = cond_mirror(std::move(x_sub), v);
    write_signature_matrix(x_sub, a.out_dir + "/x_submetered.sigmat");
    write_labels_csv(lm, a.out_dir + "/labels_submetered.csv");
    std::string manifest = cfg.manifest_text();
    manifest += "command=synth\nmodel=" + model_path +
                "\neffective_samples=" + std::to_string(synth.gen.effective_samples()) +
                "\ntrain_rows=" + std::to_string(pair.train.scenarios()) +
                "\ntest_rows=" + std::to_string(pair.test.scenarios()) + "\n";
    write_text(a.out_dir + "/manifest.cfg", manifest);
    std::printf("synth: %zu train / %zu test scenarios -> %s\n", pair.train.scenarios(),
                pair.test.scenarios(), a.out_dir.c_str());
    return 0;
}

struct EvaluateArgs {
    std::string real_path;
    std::string synthetic_path;
    std::string model_path;
    std::size_t knn_k = 5;
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    SignatureMatrix x_r = read_signature_matrix(a.real_path);
    SignatureMatrix x_g = read_signature_matrix(a.synthetic_path);
    ReconstructionModel model = read_model(a.model_path);
    MetricReport report = evaluate_metrics(x_r, x_g, model, a.knn_k);
    write_metric_report_csv(report, a.out);
    std::printf("ip_alpha=%.6f ir_beta=%.6f authenticity=%.6f (knn_k=%zu) -> %s\n",
                report.ip_alpha, report.ir_beta, report.authenticity, report.knn_k,
                a.out.c_str());
    return 0;
}

struct FeaturesArgs {
    std::string input;
    std::string out;
    double voltage_amplitude = 1.0;
    std::size_t wavelet_levels = 8;
    std::size_t vi_points = 50;
};

int cmd_features(const FeaturesArgs& a) {
    SignatureMatrix x = read_signature_matrix(a.input);
    VoltageReference v = voltage_for(x, a.voltage_amplitude);
    FeatureLayout layout;
    layout.samples_per_cycle = x.samples_per_cycle;
    layout.wavelet_levels = a.wavelet_levels;
    layout.vi_points = a.vi_points;
    write_features_csv(x, v, layout, a.out);
    std::printf("features: %zu rows x %zu columns -> %s\n", x.data.rows,
                layout.flat_length(x.data.cols), a.out.c_str());
    return 0;
}

struct BenchArgs {
    std::string experiment;
    std::string config_path;
    std::string model_path;
    std::string models = "knn,tree";
    std::size_t n_seeds = 5;
    std::string sweep;
    std::string out;
};

ReconstructionModel bench_model(const BenchArgs& a, const RunConfig& cfg) {
    std::string path = !a.model_path.empty() ? a.model_path : cfg.model_path;
    if (!path.empty()) return read_model(path);
    // self-contained fallback: fit on a deterministic pseudo-real corpus
    PseudoRealConfig corpus;
    corpus.n_signatures = 120;
    corpus.window_len = 1200;
    corpus.sample_rate_hz = 6000.0;
    corpus.mains_frequency_hz = 60.0;
    corpus.n_classes = 6;
    corpus.seed = cfg.seed;
    double threshold = cfg.variance_threshold > 0.0 ? cfg.variance_threshold : 0.99;
    return fit_pca_by_variance(make_pseudo_real(corpus), threshold);
}

int cmd_bench(const BenchArgs& a, const RunConfig& cfg) {
    ReconstructionModel model = bench_model(a, cfg);
    SynthConfig base = cfg.to_synth_config(model.latent_dim());
    BenchSettings settings = cfg.to_bench_settings();
    std::vector<std::string> models = split_list(a.models);
    if (a.n_seeds < 1) throw config_error("seeds: must be >= 1");
    std::vector<std::uint64_t> seeds(a.n_seeds);
    for (std::size_t i = 0; i < a.n_seeds; ++i) seeds[i] = cfg.seed + i;

    ExperimentResult result;
    if (a.experiment == "separability") {
        std::vector<double> values =
            a.sweep.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0}
                            : parse_double_list("--sweep", a.sweep);
        result = run_separability_experiment(base, model, settings, values, models, seeds);
    } else if (a.experiment == "concurrency") {
        std::vector<double> raw = a.sweep.empty() ? std::vector<double>{2, 4, 6, 8, 10}
                                                  : parse_double_list("--sweep", a.sweep);
        std::vector<std::size_t> values;
        for (double v : raw) {
            if (v < 1 || v != std::floor(v))
                throw config_error("--sweep: concurrency values must be positive integers");
            values.push_back(static_cast<std::size_t>(v));
        }
        result = run_concurrency_experiment(base, model, settings, values, models, seeds);
    } else if (a.experiment == "brand") {
        std::vector<double> values =
            a.sweep.empty() ? std::vector<double>{0.3, 0.5, 0.7, 0.9}
                            : parse_double_list("--sweep", a.sweep);
        result = run_brand_experiment(base, model, settings, values, models, seeds);
    } else {
        throw config_error(
            "--experiment: expected separability, concurrency, or brand; got '" + a.experiment +
            "'");
    }

    result.config_echo = cfg.manifest_text();
    result.write_csv(a.out);
    std::printf("%s sweep (%zu seeds):\n", result.sweep_name.c_str(), seeds.size());
    for (std::size_t v = 0; v < result.sweep_values.size(); ++v)
        for (std::size_t m = 0; m < result.models.size(); ++m)
            std::printf("  %s=%g %s median_r2=%.4f\n", result.sweep_name.c_str(),
                        result.sweep_values[v], result.models[m].c_str(),
                        result.median_r2(v, m));
    std::printf("written: %s\n", a.out.c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// selftest

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_selftest(const std::string& model_path) {
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };

    PseudoRealConfig corpus;
    corpus.n_signatures = 60;
    corpus.window_len = 1200;
    corpus.sample_rate_hz = 6000.0;
    corpus.mains_frequency_hz = 60.0;
    corpus.n_classes = 4;
    corpus.seed = 7;
    SignatureMatrix x = make_pseudo_real(corpus);

    try {
        ReconstructionModel model = fit_pca_by_variance(x, 0.99);
        LatentMatrix z = project(model, x);
        SignatureMatrix x_hat = reconstruct(model, z.z);
        LatentMatrix z2 = project(model, x_hat);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < z.z.data.size(); ++i)
            max_dev = std::max(max_dev, std::abs(z.z.data[i] - z2.z.data[i]));
        add("pca_round_trip", max_dev < 1e-8,
            "project(reconstruct(z)) deviates by " + std::to_string(max_dev));

        SynthConfig synth;
        synth.gen.n_samples = 48;
        synth.gen.n_classes = 3;
        synth.gen.brands_per_class = 2;
        synth.gen.seed = 11;
        synth.aggregates = 40;
        synth.k_min = 1;
        synth.k_max = 3;
        SplitPair pair = make_datasets(synth, model);

        // Kirchhoff on the train side against explicit row sums
        LatentMatrix lm = make_submetered(synth.gen, model);
        SignatureMatrix x_g = reconstruct(model, lm.z);
        VoltageReference v = voltage_for(x_g, 1.0);
        x_g = cond_mirror(std::move(x_g), v);
        bool kirchhoff = true;
        const BinMat& act = pair.train.activation.a;
        for (std::size_t i = 0; i < pair.train.scenarios() && kirchhoff; ++i) {
            for (std::size_t s = 0; s < x_g.data.cols; ++s) {
                double acc = 0.0;
                for (std::size_t j = 0; j < act.cols; ++j)
                    if (act(i, j)) acc += x_g.data(j, s);
                if (acc != pair.train.x_a.data(i, s)) {
                    kirchhoff = false;
                    break;
                }
            }
        }
        add("kirchhoff_exact", kirchhoff, "aggregate rows equal their active submetered sums");

        SignatureMatrix mirrored = cond_mirror(x_g, v);
        bool non_negative = true;
        for (std::size_t i = 0; i < mirrored.data.rows; ++i)
            if (pearson(mirrored.data.row(i), std::span<const double>(v.waveform.samples)) < 0.0)
                non_negative = false;
        SignatureMatrix twice = cond_mirror(mirrored, v);
        add("mirror_idempotent", non_negative && twice.data.data == mirrored.data.data,
            "no negative correlations and second pass is identity");

        MetricReport self = evaluate_metrics(x, x, model, 1);
        add("metric_self_test", self.ip_alpha >= 0.95 && self.authenticity <= 0.05,
            "ip_alpha=" + std::to_string(self.ip_alpha) +
                " authenticity=" + std::to_string(self.authenticity));

        VoltageReference v_unit = generate_voltage_reference(60.0, 30000.0, 30000, 1.0);
        double ff = form_factor(v_unit.waveform.samples);
        bool ff_ok = std::abs(ff - M_PI / (2.0 * std::sqrt(2.0))) < 1e-4;
        PhaseShift ps = phase_shift(v_unit.waveform.samples, v_unit);
        bool theta_ok = std::abs(ps.theta) < 1e-9;
        std::vector<double> bands = wavelet_energy(x.data.row(0), 8);
        double band_sum = 0.0;
        for (double b : bands) band_sum += b;
        double prefix_norm = 0.0;
        for (std::size_t s = 0; s < 1024; ++s) prefix_norm += x.data(0, s) * x.data(0, s);
        bool parseval_ok = std::abs(band_sum - prefix_norm) <= 1e-9 * prefix_norm;
        add("feature_identities", ff_ok && theta_ok && parseval_ok,
            "form factor, phase shift, wavelet Parseval");

        SplitPair again = make_datasets(synth, model);
        add("determinism",
            again.train.x_a.data.data == pair.train.x_a.data.data &&
                again.train.p_a.data == pair.train.p_a.data,
            "repeated run is bit-identical");
    } catch (const error& e) {
        add("pipeline", false, e.what());
    }

    if (!model_path.empty()) {
        try {
            ReconstructionModel m = read_model(model_path);
            add("model_load", true,
                "L=" + std::to_string(m.latent_dim()) + " T=" + std::to_string(m.signal_dim()));
        } catch (const error& e) {
            add("model_load", false, e.what());
        }
    }

    bool all = true;
    for (const Check& c : checks) {
        std::printf("[%s] %-20s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("selftest: %s\n", all ? "all checks passed" : "FAILURES detected");
    return all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"hfsg: synthetic high-frequency appliance signature toolkit"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* cmd_train_p = app.add_subcommand("train", "Fit a PCA reconstruction model");
    cmd_train_p->add_option("--input", train.input, "training SIGMAT file")->required();
    cmd_train_p->add_option("--components", train.components, "number of principal components")
        ->capture_default_str();
    auto* thr_opt = cmd_train_p->add_option(
        "--variance-threshold", train.variance_threshold,
        "choose L by cumulative explained variance instead of --components");
    cmd_train_p->add_option("--out", train.out, "output PCAMOD path")->required();

    CorpusArgs corpus;
    auto* cmd_corpus_p =
        app.add_subcommand("corpus", "Generate a pseudo-real harmonic-series corpus");
    cmd_corpus_p->add_option("--out", corpus.out, "output SIGMAT path")->required();
    cmd_corpus_p->add_option("--signatures", corpus.cfg.n_signatures, "number of signatures")->capture_default_str();
    cmd_corpus_p->add_option("--window", corpus.cfg.window_len, "samples per signature (T)")->capture_default_str();
    cmd_corpus_p->add_option("--sample-rate", corpus.cfg.sample_rate_hz, "sample rate in Hz")->capture_default_str();
    cmd_corpus_p->add_option("--mains-frequency", corpus.cfg.mains_frequency_hz,
                             "mains frequency in Hz")->capture_default_str();
    cmd_corpus_p->add_option("--classes", corpus.cfg.n_classes, "number of classes")->capture_default_str();
    cmd_corpus_p->add_option("--max-harmonics", corpus.cfg.max_harmonics,
                             "highest harmonic order")->capture_default_str();
    cmd_corpus_p->add_option("--jitter", corpus.cfg.jitter, "per-signature relative variation")->capture_default_str();
    cmd_corpus_p->add_option("--noise-std", corpus.cfg.noise_std, "additive noise std")->capture_default_str();
    cmd_corpus_p->add_option("--seed", corpus.cfg.seed, "corpus seed")->capture_default_str();

    GenerateArgs gen;
    auto* cmd_gen_p =
        app.add_subcommand("generate", "Generate labeled synthetic latent signatures");
    cmd_gen_p->add_option("--model", gen.model_path, "PCAMOD model path")->required();
    cmd_gen_p->add_option("--config", gen.config_path, "run config file");
    cmd_gen_p->add_option("--out-dir", gen.out_dir, "output directory");
    std::size_t gen_classes = 0, gen_modes = 0, gen_brands = 0, gen_samples = 0;
    double gen_sep = -1.0;
    std::uint64_t gen_seed = 0;
    auto* go1 = cmd_gen_p->add_option("--classes", gen_classes, "appliance classes (D)");
    auto* go2 = cmd_gen_p->add_option("--modes", gen_modes, "modes per class (M)");
    auto* go3 = cmd_gen_p->add_option("--brands", gen_brands, "brands per class (B)");
    auto* go4 = cmd_gen_p->add_option("--samples", gen_samples, "submetered signatures (N)");
    auto* go5 = cmd_gen_p->add_option("--sep", gen_sep, "class separability");
    auto* go6 = cmd_gen_p->add_option("--seed", gen_seed, "generation seed");

    SynthArgs synth;
    auto* cmd_synth_p =
        app.add_subcommand("synth", "Synthesize a labeled aggregate NILM dataset");
    cmd_synth_p->add_option("--model", synth.model_path, "PCAMOD model path");
    cmd_synth_p->add_option("--config", synth.config_path, "run config file");
    cmd_synth_p->add_option("--out-dir", synth.out_dir, "output directory");
    std::uint64_t synth_seed = 0;
    auto* so1 = cmd_synth_p->add_option("--seed", synth_seed, "override the config seed");
    cmd_synth_p->add_option("--set", synth.overrides, "override a config key (key=value)");

    EvaluateArgs eval;
    auto* cmd_eval_p =
        app.add_subcommand("evaluate", "Score synthetic data with the 3D metric");
    cmd_eval_p->add_option("--real", eval.real_path, "real SIGMAT file")->required();
    cmd_eval_p->add_option("--synthetic", eval.synthetic_path, "synthetic SIGMAT file")
        ->required();
    cmd_eval_p->add_option("--model", eval.model_path, "PCAMOD model path")->required();
    cmd_eval_p->add_option("--knn-k", eval.knn_k, "k for the recall ball radius")->capture_default_str();
    cmd_eval_p->add_option("--out", eval.out, "output CSV path")->required();

    FeaturesArgs feat;
    auto* cmd_feat_p = app.add_subcommand("features", "Extract NILM feature vectors");
    cmd_feat_p->add_option("--input", feat.input, "input SIGMAT file")->required();
    cmd_feat_p->add_option("--voltage-amplitude", feat.voltage_amplitude,
                           "reference voltage amplitude")->capture_default_str();
    cmd_feat_p->add_option("--wavelet-levels", feat.wavelet_levels, "Haar DWT depth")->capture_default_str();
    cmd_feat_p->add_option("--vi-points", feat.vi_points, "VI trajectory samples")->capture_default_str();
    cmd_feat_p->add_option("--out", feat.out, "output CSV path")->required();

    BenchArgs bench;
    auto* cmd_bench_p = app.add_subcommand("bench", "Run a generalization experiment");
    cmd_bench_p
        ->add_option("--experiment", bench.experiment, "separability | concurrency | brand")
        ->required();
    cmd_bench_p->add_option("--config", bench.config_path, "run config file");
    cmd_bench_p->add_option("--model", bench.model_path,
                            "PCAMOD model (default: fit a pseudo-real corpus)");
    cmd_bench_p->add_option("--models", bench.models, "comma list of baselines (knn,tree)")->capture_default_str();
    cmd_bench_p->add_option("--seeds", bench.n_seeds, "number of consecutive seeds")->capture_default_str();
    cmd_bench_p->add_option("--sweep", bench.sweep, "comma list of sweep values");
    cmd_bench_p->add_option("--out", bench.out, "output CSV path")->required();

    std::string selftest_model_path;
    auto* cmd_self_p = app.add_subcommand("selftest", "Run the embedded invariant suite");
    cmd_self_p->add_option("--model", selftest_model_path, "also check a model file loads");

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    std::string prog = "hfsg";
    argv.push_back(prog.data());
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (cmd_train_p->parsed()) {
            train.use_threshold = thr_opt->count() > 0;
            return cmd_train(train);
        }
        if (cmd_corpus_p->parsed()) return cmd_corpus(corpus);
        if (cmd_gen_p->parsed()) {
            RunConfig cfg = load_config(gen.config_path, gen.overrides);
            if (go1->count()) cfg.n_classes = gen_classes;
            if (go2->count()) cfg.modes_per_class = gen_modes;
            if (go3->count()) cfg.brands_per_class = gen_brands;
            if (go4->count()) cfg.n_samples = gen_samples;
            if (go5->count()) cfg.separability = gen_sep;
            if (go6->count()) cfg.seed = gen_seed;
            cfg.validate();
            return cmd_generate(gen, cfg);
        }
        if (cmd_synth_p->parsed()) {
            RunConfig cfg = load_config(synth.config_path, synth.overrides);
            if (so1->count()) cfg.seed = synth_seed;
            cfg.validate();
            return cmd_synth(synth, cfg);
        }
        if (cmd_eval_p->parsed()) return cmd_evaluate(eval);
        if (cmd_feat_p->parsed()) return cmd_features(feat);
        if (cmd_bench_p->parsed()) {
            RunConfig cfg = bench.config_path.empty() ? RunConfig{}
                                                      : RunConfig::from_file(bench.config_path);
            cfg.validate();
            return cmd_bench(bench, cfg);
        }
        if (cmd_self_p->parsed()) return cmd_selftest(selftest_model_path);
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace hfsg
