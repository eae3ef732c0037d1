#include "hfsg/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hfsg/errors.hpp"

namespace hfsg {

std::string to_string(SplitMode mode) {
    return mode == SplitMode::uniform ? "uniform" : "brand";
}

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "uniform") return SplitMode::uniform;
    if (s == "brand") return SplitMode::brand;
    throw config_error("split_mode: expected 'uniform' or 'brand', got '" + s + "'");
}

void SynthConfig::validate() const {
    gen.validate();
    if (aggregates < 1) throw config_error("aggregates: must be >= 1");
    if (k_min < 1) throw config_error("k_min: must be >= 1");
    if (k_min > k_max) throw config_error("k_max: must be >= k_min");
    if (k_max > gen.effective_samples())
        throw config_error("k_max: exceeds the number of submetered signatures (" +
                           std::to_string(gen.effective_samples()) + ")");
    if (!(tau > 0.0) || !(tau < 1.0)) throw config_error("tau: must be in (0, 1)");
    if (split_mode == SplitMode::brand && gen.brands_per_class < 2)
        throw config_error("split_mode: brand split requires brands_per_class >= 2");
    if (!(voltage_amplitude > 0.0)) throw config_error("voltage_amplitude: must be > 0");
}

double pearson(std::span<const double> x, std::span<const double> v) {
    if (x.size() != v.size()) throw dimension_error("pearson: length mismatch");
    if (x.size() < 2) throw validation_error("pearson: needs at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        mv += v[i];
    }
    mx /= n;
    mv /= n;
    double sxy = 0.0, sxx = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dv = v[i] - mv;
        sxy += dx * dv;
        sxx += dx * dx;
        svv += dv * dv;
    }
    if (sxx == 0.0 || svv == 0.0)
        throw validation_error("pearson: undefined correlation (constant signal)");
    return std::clamp(sxy / std::sqrt(sxx * svv), -1.0, 1.0);
}

SignatureMatrix cond_mirror(SignatureMatrix x_g, const VoltageReference& v,
                            std::vector<std::string>* warnings) {
    if (x_g.data.cols != v.waveform.samples.size())
        throw dimension_error("cond_mirror: column count " + std::to_string(x_g.data.cols) +
                              " != voltage length " + std::to_string(v.waveform.samples.size()));
    std::span<const double> vs(v.waveform.samples);
    for (std::size_t i = 0; i < x_g.data.rows; ++i) {
        double* row = x_g.data.row_ptr(i);
        bool constant = true;
        for (std::size_t j = 1; j < x_g.data.cols; ++j)
            if (row[j] != row[0]) {
                constant = false;
                break;
            }
        if (constant) {
            if (warnings)
                warnings->push_back("cond_mirror: row " + std::to_string(i) +
                                    " is constant; left untouched");
            continue;
        }
        double r = pearson(std::span<const double>(row, x_g.data.cols), vs);
        if (r < 0.0)
            for (std::size_t j = 0; j < x_g.data.cols; ++j) row[j] = -row[j];
    }
    return x_g;
}

ActivationMatrix build_activation_matrix(std::size_t a_rows, std::size_t n, std::size_t k_min,
                                         std::size_t k_max, Rng& rng) {
    if (a_rows < 1) throw config_error("activation: a_rows must be >= 1");
    if (k_min < 1 || k_min > k_max) throw config_error("activation: need 1 <= k_min <= k_max");
    if (k_max > n)
        throw config_error("activation: k_max=" + std::to_string(k_max) + " exceeds n=" +
                           std::to_string(n));
    ActivationMatrix act;
    act.k_min = k_min;
    act.k_max = k_max;
    act.a = BinMat(a_rows, n);
    for (std::size_t i = 0; i < a_rows; ++i) {
        std::size_t k = static_cast<std::size_t>(rng.uniform_int(k_min, k_max));
        for (std::size_t j : rng.sample_without_replacement(n, k)) act.a(i, j) = 1;
    }
    return act;
}

Mat aggregate_signatures(const ActivationMatrix& activation, const SignatureMatrix& x_g) {
    if (activation.a.cols != x_g.data.rows)
        throw dimension_error("aggregate: activation columns " + std::to_string(activation.a.cols) +
                              " != submetered rows " + std::to_string(x_g.data.rows));
    const std::size_t t = x_g.data.cols;
    Mat x_a(activation.a.rows, t);
    for (std::size_t i = 0; i < activation.a.rows; ++i) {
        double* dst = x_a.row_ptr(i);
        for (std::size_t j = 0; j < activation.a.cols; ++j) {
            if (!activation.a(i, j)) continue;
            const double* src = x_g.data.row_ptr(j);
            for (std::size_t s = 0; s < t; ++s) dst[s] += src[s];
        }
    }
    return x_a;
}

Mat compute_power_shares(const ActivationMatrix& activation, const SignatureMatrix& x_g,
                         const VoltageReference& v, const std::vector<std::int64_t>& y_class,
                         std::size_t n_classes, bool normalize,
                         std::vector<std::string>* warnings) {
    if (activation.a.cols != x_g.data.rows)
        throw dimension_error("power shares: activation/submetered mismatch");
    if (y_class.size() != x_g.data.rows)
        throw dimension_error("power shares: labels must cover all submetered rows");
    if (v.waveform.samples.size() != x_g.data.cols)
        throw dimension_error("power shares: voltage length != T");
    const std::size_t t = x_g.data.cols;

    // per-appliance active power: mean_t x[j,t] * v[t]
    std::vector<double> appliance_power(x_g.data.rows);
    for (std::size_t j = 0; j < x_g.data.rows; ++j) {
        const double* row = x_g.data.row_ptr(j);
        double acc = 0.0;
        for (std::size_t s = 0; s < t; ++s) acc += row[s] * v.waveform.samples[s];
        appliance_power[j] = acc / static_cast<double>(t);
        std::int64_t d = y_class[j];
        if (d < 0 || static_cast<std::size_t>(d) >= n_classes)
            throw validation_error("power shares: class label out of range for appliance " +
                                   std::to_string(j));
    }

    Mat p(activation.a.rows, n_classes);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < activation.a.rows; ++i) {
        double* row = p.row_ptr(i);
        for (std::size_t j = 0; j < activation.a.cols; ++j)
            if (activation.a(i, j))
                row[static_cast<std::size_t>(y_class[j])] += appliance_power[j];
        double sum = 0.0;
        for (std::size_t d = 0; d < n_classes; ++d) {
            if (row[d] < 0.0) {
                row[d] = 0.0;
                ++clamped;
            }
            sum += row[d];
        }
        if (normalize && sum > 0.0)
            for (std::size_t d = 0; d < n_classes; ++d) row[d] /= sum;
    }
    if (clamped && warnings)
        warnings->push_back("power shares: " + std::to_string(clamped) +
                            " negative class powers clamped to zero");
    return p;
}

namespace {

LabeledDataset take_rows(const LabeledDataset& d, const std::vector<std::size_t>& rows) {
    LabeledDataset out;
    out.x_a.sample_rate_hz = d.x_a.sample_rate_hz;
    out.x_a.samples_per_cycle = d.x_a.samples_per_cycle;
    out.x_a.data = Mat(rows.size(), d.x_a.data.cols);
    out.y_class_ind = BinMat(rows.size(), d.y_class_ind.cols);
    out.y_brand_ind = BinMat(rows.size(), d.y_brand_ind.cols);
    out.p_a = Mat(rows.size(), d.p_a.cols);
    out.activation.k_min = d.activation.k_min;
    out.activation.k_max = d.activation.k_max;
    out.activation.a = BinMat(rows.size(), d.activation.a.cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t src = rows[i];
        std::copy_n(d.x_a.data.row_ptr(src), d.x_a.data.cols, out.x_a.data.row_ptr(i));
        std::copy_n(&d.y_class_ind.data[src * d.y_class_ind.cols], d.y_class_ind.cols,
                    &out.y_class_ind.data[i * out.y_class_ind.cols]);
        std::copy_n(&d.y_brand_ind.data[src * d.y_brand_ind.cols], d.y_brand_ind.cols,
                    &out.y_brand_ind.data[i * out.y_brand_ind.cols]);
        std::copy_n(d.p_a.row_ptr(src), d.p_a.cols, out.p_a.row_ptr(i));
        std::copy_n(&d.activation.a.data[src * d.activation.a.cols], d.activation.a.cols,
                    &out.activation.a.data[i * out.activation.a.cols]);
    }
    out.appliance_class = d.appliance_class;
    out.appliance_brand = d.appliance_brand;
    out.n_classes = d.n_classes;
    out.brands_per_class = d.brands_per_class;
    out.provenance = d.provenance;
    return out;
}

}  // namespace

SplitPair split_dataset(const LabeledDataset& d, SplitMode mode, double tau, Rng& rng) {
    if (!(tau > 0.0) || !(tau < 1.0)) throw config_error("tau: must be in (0, 1)");
    const std::size_t a = d.scenarios();
    std::vector<std::size_t> train_rows, test_rows;

    if (mode == SplitMode::uniform) {
        std::vector<std::size_t> order(a);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        std::size_t n_train = static_cast<std::size_t>(tau * static_cast<double>(a));
        train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(test_rows.begin(), test_rows.end());
    } else {
        const std::size_t b = d.brands_per_class;
        if (b < 2) throw config_error("split_dataset: brand split requires >= 2 brands per class");
        // per class, pick ceil(tau*B) training brands, capped so the test
        // side keeps at least one brand
        std::size_t n_train_brands = static_cast<std::size_t>(
            std::ceil(tau * static_cast<double>(b)));
        n_train_brands = std::clamp<std::size_t>(n_train_brands, 1, b - 1);
        std::vector<std::vector<bool>> is_train_brand(d.n_classes, std::vector<bool>(b, false));
        for (std::size_t cls = 0; cls < d.n_classes; ++cls) {
            std::vector<std::size_t> ids(b);
            std::iota(ids.begin(), ids.end(), 0);
            rng.shuffle(ids);
            for (std::size_t i = 0; i < n_train_brands; ++i) is_train_brand[cls][ids[i]] = true;
        }
        for (std::size_t i = 0; i < a; ++i) {
            bool all_train = true;
            for (std::size_t j = 0; j < d.activation.a.cols; ++j) {
                if (!d.activation.a(i, j)) continue;
                std::size_t cls = static_cast<std::size_t>(d.appliance_class[j]);
                std::size_t brand = static_cast<std::size_t>(d.appliance_brand[j]);
                if (brand >= b || !is_train_brand[cls][brand]) {
                    all_train = false;
                    break;
                }
            }
            (all_train ? train_rows : test_rows).push_back(i);
        }
    }

    SplitPair pair;
    pair.mode = mode;
    pair.tau = tau;
    pair.train = take_rows(d, train_rows);
    pair.test = take_rows(d, test_rows);
    std::string suffix = "\nsplit_mode=" + to_string(mode) + "\ntau=" + std::to_string(tau);
    pair.train.provenance += suffix + "\nsplit_side=train\n";
    pair.test.provenance += suffix + "\nsplit_side=test\n";
    return pair;
}

namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        throw config_error(std::string(stage) + ": " + e.what());
    } catch (const dimension_error& e) {
        throw dimension_error(std::string(stage) + ": " + e.what());
    } catch (const validation_error& e) {
        throw validation_error(std::string(stage) + ": " + e.what());
    } catch (const format_error& e) {
        throw format_error(std::string(stage) + ": " + e.what());
    } catch (const alignment_error& e) {
        throw alignment_error(std::string(stage) + ": " + e.what());
    } catch (const feature_error& e) {
        throw feature_error(std::string(stage) + ": " + e.what());
    }
}

std::string synth_provenance(const SynthConfig& cfg, std::size_t effective_n, std::size_t l) {
    std::ostringstream os;
    os << "n_samples=" << cfg.gen.n_samples << "\n"
       << "effective_samples=" << effective_n << "\n"
       << "n_classes=" << cfg.gen.n_classes << "\n"
       << "modes_per_class=" << cfg.gen.modes_per_class << "\n"
       << "brands_per_class=" << cfg.gen.brands_per_class << "\n"
       << "separability=" << cfg.gen.separability << "\n"
       << "sigma_min=" << cfg.gen.sigma_min << "\n"
       << "sigma_max=" << cfg.gen.sigma_max << "\n"
       << "seed=" << cfg.gen.seed << "\n"
       << "aggregates=" << cfg.aggregates << "\n"
       << "k_min=" << cfg.k_min << "\n"
       << "k_max=" << cfg.k_max << "\n"
       << "normalize_shares=" << (cfg.normalize_shares ? 1 : 0) << "\n"
       << "voltage_amplitude=" << cfg.voltage_amplitude << "\n"
       << "latent_dim=" << l;
    return os.str();
}

}  // namespace

SplitPair make_datasets(const SynthConfig& cfg, const ReconstructionModel& model,
                        std::vector<std::string>* warnings) {
    cfg.validate();
    run_stage("make_datasets[model]", [&] { model.validate(); return 0; });

    LatentMatrix lm = run_stage("make_datasets[make_submetered]",
                                [&] { return make_submetered(cfg.gen, model, warnings); });

    SignatureMatrix x_g =
        run_stage("make_datasets[reconstruct]", [&] { return reconstruct(model, lm.z); });

    VoltageReference v = run_stage("make_datasets[voltage]", [&] {
        double f0 = model.sample_rate_hz / static_cast<double>(model.samples_per_cycle);
        return generate_voltage_reference(f0, model.sample_rate_hz, model.signal_dim(),
                                          cfg.voltage_amplitude);
    });

    x_g = run_stage("make_datasets[cond_mirror]",
                    [&] { return cond_mirror(std::move(x_g), v, warnings); });

    Rng act_rng(cfg.gen.seed, make_stream(stream_id::activation));
    ActivationMatrix act = run_stage("make_datasets[activation]", [&] {
        return build_activation_matrix(cfg.aggregates, x_g.data.rows, cfg.k_min, cfg.k_max,
                                       act_rng);
    });

    LabeledDataset d;
    d.x_a.sample_rate_hz = model.sample_rate_hz;
    d.x_a.samples_per_cycle = model.samples_per_cycle;
    d.x_a.data = run_stage("make_datasets[aggregate]",
                           [&] { return aggregate_signatures(act, x_g); });
    d.p_a = run_stage("make_datasets[power_shares]", [&] {
        return compute_power_shares(act, x_g, v, lm.y_class, cfg.gen.n_classes,
                                    cfg.normalize_shares, warnings);
    });

    const std::size_t b = cfg.gen.brands_per_class;
    d.y_class_ind = BinMat(cfg.aggregates, cfg.gen.n_classes);
    d.y_brand_ind = BinMat(cfg.aggregates, cfg.gen.n_classes * b);
    for (std::size_t i = 0; i < cfg.aggregates; ++i) {
        for (std::size_t dcls = 0; dcls < cfg.gen.n_classes; ++dcls)
            if (d.p_a(i, dcls) > 0.0) d.y_class_ind(i, dcls) = 1;
        for (std::size_t j = 0; j < act.a.cols; ++j)
            if (act.a(i, j)) {
                std::size_t gid = static_cast<std::size_t>(lm.y_class[j]) * b +
                                  static_cast<std::size_t>(lm.y_brand[j]);
                d.y_brand_ind(i, gid) = 1;
            }
    }
    d.activation = std::move(act);
    d.appliance_class = lm.y_class;
    d.appliance_brand = lm.y_brand;
    d.n_classes = cfg.gen.n_classes;
    d.brands_per_class = b;
    d.provenance = synth_provenance(cfg, lm.z.rows, model.latent_dim());

    Rng split_rng(cfg.gen.seed, make_stream(stream_id::split));
    return run_stage("make_datasets[split]",
                     [&] { return split_dataset(d, cfg.split_mode, cfg.tau, split_rng); });
}

SplitPair make_datasets(const SynthConfig& cfg, const std::string& model_path,
                        std::vector<std::string>* warnings) {
    ReconstructionModel model =
        run_stage("make_datasets[load_model]", [&] { return read_model(model_path); });
    return make_datasets(cfg, model, warnings);
}

SplitPair make_datasets(const SynthConfig& cfg, const SignatureMatrix& real, std::size_t l,
                        std::vector<std::string>* warnings) {
    ReconstructionModel model =
        run_stage("make_datasets[fit_pca]", [&] { return fit_pca(real, l); });
    return make_datasets(cfg, model, warnings);
}

}  // namespace hfsg
