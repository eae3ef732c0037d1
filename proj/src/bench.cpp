#include "hfsg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "hfsg/errors.hpp"

namespace hfsg {

KnnModel knn_fit(const Mat& features, const Mat& targets, std::size_t k) {
    if (features.rows == 0) throw validation_error("knn_fit: empty training set");
    if (features.rows != targets.rows)
        throw dimension_error("knn_fit: feature/target row mismatch");
    if (k < 1 || k > features.rows)
        throw config_error("knn_fit: k=" + std::to_string(k) + " outside [1, " +
                           std::to_string(features.rows) + "]");
    KnnModel model;
    model.k = k;
    model.targets = targets;
    model.offset.assign(features.cols, 0.0);
    model.scale.assign(features.cols, 1.0);

    const double n = static_cast<double>(features.rows);
    for (std::size_t j = 0; j < features.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < features.rows; ++i) mean += features(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < features.rows; ++i) {
            double d = features(i, j) - mean;
            var += d * d;
        }
        double std_dev = std::sqrt(var / n);
        model.offset[j] = mean;
        model.scale[j] = std_dev > 0.0 ? std_dev : 1.0;
    }
    model.features = Mat(features.rows, features.cols);
    for (std::size_t i = 0; i < features.rows; ++i)
        for (std::size_t j = 0; j < features.cols; ++j)
            model.features(i, j) = (features(i, j) - model.offset[j]) / model.scale[j];
    return model;
}

Mat knn_predict(const KnnModel& model, const Mat& queries) {
    if (queries.cols != model.features.cols)
        throw dimension_error("knn_predict: feature width mismatch");
    const std::size_t n_train = model.features.rows;
    Mat out(queries.rows, model.targets.cols);
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    std::vector<double> q(queries.cols);
    for (std::size_t r = 0; r < queries.rows; ++r) {
        for (std::size_t j = 0; j < queries.cols; ++j)
            q[j] = (queries(r, j) - model.offset[j]) / model.scale[j];
        for (std::size_t i = 0; i < n_train; ++i) {
            double acc = 0.0;
            const double* row = model.features.row_ptr(i);
            for (std::size_t j = 0; j < queries.cols; ++j) {
                double d = q[j] - row[j];
                acc += d * d;
            }
            dist[i] = {acc, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k),
                          dist.end());
        double* dst = out.row_ptr(r);
        for (std::size_t s = 0; s < model.k; ++s) {
            const double* trg = model.targets.row_ptr(dist[s].second);
            for (std::size_t d = 0; d < model.targets.cols; ++d) dst[d] += trg[d];
        }
        for (std::size_t d = 0; d < model.targets.cols; ++d)
            dst[d] /= static_cast<double>(model.k);
    }
    return out;
}

namespace {

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double sse = 0.0;
};

double node_sse(const Mat& targets, const std::vector<std::size_t>& idx) {
    const std::size_t d = targets.cols;
    double total = 0.0;
    for (std::size_t out = 0; out < d; ++out) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t i : idx) {
            double y = targets(i, out);
            s += y;
            s2 += y * y;
        }
        total += s2 - s * s / static_cast<double>(idx.size());
    }
    return total;
}

std::vector<double> mean_target(const Mat& targets, const std::vector<std::size_t>& idx) {
    std::vector<double> mean(targets.cols, 0.0);
    for (std::size_t i : idx)
        for (std::size_t d = 0; d < targets.cols; ++d) mean[d] += targets(i, d);
    for (double& v : mean) v /= static_cast<double>(idx.size());
    return mean;
}

class TreeBuilder {
public:
    TreeBuilder(const Mat& features, const Mat& targets, std::size_t max_depth,
                std::size_t min_leaf)
        : features_(features), targets_(targets), max_depth_(max_depth), min_leaf_(min_leaf) {}

    TreeModel build() {
        TreeModel model;
        model.n_outputs = targets_.cols;
        std::vector<std::size_t> all(features_.rows);
        std::iota(all.begin(), all.end(), 0);
        grow(model, all, 0);
        return model;
    }

private:
    int grow(TreeModel& model, const std::vector<std::size_t>& idx, std::size_t depth) {
        int node_id = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        model.nodes[node_id].value = mean_target(targets_, idx);

        if (depth >= max_depth_ || idx.size() < 2 * min_leaf_) return node_id;

        SplitChoice best = find_split(idx);
        if (!best.found) return node_id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (features_(i, best.feature) <= best.threshold ? left : right).push_back(i);
        if (left.size() < min_leaf_ || right.size() < min_leaf_) return node_id;

        model.nodes[node_id].feature = static_cast<int>(best.feature);
        model.nodes[node_id].threshold = best.threshold;
        int l = grow(model, left, depth + 1);
        int r = grow(model, right, depth + 1);
        model.nodes[node_id].left = l;
        model.nodes[node_id].right = r;
        return node_id;
    }

    SplitChoice find_split(const std::vector<std::size_t>& idx) const {
        const std::size_t n = idx.size();
        const std::size_t d = targets_.cols;
        SplitChoice best;
        best.sse = node_sse(targets_, idx);

        std::vector<std::size_t> order(idx);
        std::vector<double> suffix_s(d), prefix_s(d);
        std::vector<double> suffix_s2(d), prefix_s2(d);

        for (std::size_t f = 0; f < features_.cols; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                double va = features_(a, f), vb = features_(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::fill(prefix_s.begin(), prefix_s.end(), 0.0);
            std::fill(prefix_s2.begin(), prefix_s2.end(), 0.0);
            std::fill(suffix_s.begin(), suffix_s.end(), 0.0);
            std::fill(suffix_s2.begin(), suffix_s2.end(), 0.0);
            for (std::size_t i : order)
                for (std::size_t out = 0; out < d; ++out) {
                    double y = targets_(i, out);
                    suffix_s[out] += y;
                    suffix_s2[out] += y * y;
                }
            for (std::size_t pos = 1; pos < n; ++pos) {
                std::size_t moved = order[pos - 1];
                for (std::size_t out = 0; out < d; ++out) {
                    double y = targets_(moved, out);
                    prefix_s[out] += y;
                    prefix_s2[out] += y * y;
                    suffix_s[out] -= y;
                    suffix_s2[out] -= y * y;
                }
                if (pos < min_leaf_ || n - pos < min_leaf_) continue;
                double lo = features_(order[pos - 1], f);
                double hi = features_(order[pos], f);
                if (lo == hi) continue;  // no threshold between equal values
                double sse = 0.0;
                for (std::size_t out = 0; out < d; ++out) {
                    sse += prefix_s2[out] -
                           prefix_s[out] * prefix_s[out] / static_cast<double>(pos);
                    sse += suffix_s2[out] -
                           suffix_s[out] * suffix_s[out] / static_cast<double>(n - pos);
                }
                if (sse < best.sse - 1e-12) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (lo + hi);
                    best.sse = sse;
                }
            }
        }
        return best;
    }

    const Mat& features_;
    const Mat& targets_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
};

}  // namespace

TreeModel tree_fit(const Mat& features, const Mat& targets, std::size_t max_depth,
                   std::size_t min_leaf) {
    if (features.rows == 0) throw validation_error("tree_fit: empty training set");
    if (features.rows != targets.rows)
        throw dimension_error("tree_fit: feature/target row mismatch");
    if (min_leaf < 1) throw config_error("tree_fit: min_leaf must be >= 1");
    if (features.rows < min_leaf)
        throw validation_error("tree_fit: fewer training rows than min_leaf");
    return TreeBuilder(features, targets, max_depth, min_leaf).build();
}

Mat tree_predict(const TreeModel& model, const Mat& queries) {
    if (model.nodes.empty()) throw validation_error("tree_predict: empty model");
    Mat out(queries.rows, model.n_outputs);
    for (std::size_t r = 0; r < queries.rows; ++r) {
        const TreeNode* node = &model.nodes[0];
        while (node->feature >= 0) {
            std::size_t f = static_cast<std::size_t>(node->feature);
            if (f >= queries.cols) throw dimension_error("tree_predict: feature width mismatch");
            node = queries(r, f) <= node->threshold ? &model.nodes[node->left]
                                                    : &model.nodes[node->right];
        }
        std::copy(node->value.begin(), node->value.end(), out.row_ptr(r));
    }
    return out;
}

double r2_score(const Mat& y_true, const Mat& y_pred) {
    require_same_shape(y_true, y_pred, "r2_score");
    if (y_true.rows == 0) throw validation_error("r2_score: empty input");
    const double n = static_cast<double>(y_true.rows);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t d = 0; d < y_true.cols; ++d) {
        double mean = 0.0;
        for (std::size_t i = 0; i < y_true.rows; ++i) mean += y_true(i, d);
        mean /= n;
        for (std::size_t i = 0; i < y_true.rows; ++i) {
            double res = y_true(i, d) - y_pred(i, d);
            double dev = y_true(i, d) - mean;
            ss_res += res * res;
            ss_tot += dev * dev;
        }
    }
    if (ss_tot == 0.0) throw validation_error("r2_score: zero-variance ground truth");
    return 1.0 - ss_res / ss_tot;
}

// ---------------------------------------------------------------------------
// experiment drivers

namespace {

FeatureLayout layout_for(const BenchSettings& settings, const SignatureMatrix& x) {
    FeatureLayout layout;
    layout.samples_per_cycle = x.samples_per_cycle;
    layout.wavelet_levels = settings.wavelet_levels;
    layout.vi_points = settings.vi_points;
    layout.period_energy = settings.period_energy;
    return layout;
}

}  // namespace

void RegressionProblem::validate() const {
    if (features.rows != targets.rows)
        throw dimension_error("regression problem: feature/target row mismatch");
    for (std::size_t i = 0; i < targets.rows; ++i) {
        double sum = 0.0;
        for (std::size_t d = 0; d < targets.cols; ++d) sum += targets(i, d);
        if (sum > 1.0 + 1e-9)
            throw validation_error("regression problem: target row " + std::to_string(i) +
                                   " sums to " + std::to_string(sum));
    }
}

RegressionProblem make_regression_problem(const LabeledDataset& d, const VoltageReference& v,
                                          const FeatureLayout& layout) {
    RegressionProblem problem;
    problem.features = extract_features(d.x_a, v, layout);
    problem.targets = d.p_a;
    problem.validate();
    return problem;
}

double score_once(const SynthConfig& cfg, const ReconstructionModel& model,
                  const BenchSettings& settings, const std::string& model_name,
                  std::uint64_t seed) {
    SynthConfig run_cfg = cfg;
    run_cfg.gen.seed = seed;
    SplitPair pair = make_datasets(run_cfg, model);
    if (pair.train.scenarios() == 0 || pair.test.scenarios() == 0)
        throw validation_error("score_once: empty train or test split");

    double f0 = model.sample_rate_hz / static_cast<double>(model.samples_per_cycle);
    VoltageReference v = generate_voltage_reference(f0, model.sample_rate_hz, model.signal_dim(),
                                                    run_cfg.voltage_amplitude);
    FeatureLayout layout = layout_for(settings, pair.train.x_a);
    RegressionProblem train = make_regression_problem(pair.train, v, layout);
    RegressionProblem test = make_regression_problem(pair.test, v, layout);

    Mat pred;
    if (model_name == "knn") {
        KnnModel knn =
            knn_fit(train.features, train.targets, std::min(settings.knn_k, train.features.rows));
        pred = knn_predict(knn, test.features);
    } else if (model_name == "tree") {
        TreeModel tree = tree_fit(train.features, train.targets, settings.tree_max_depth,
                                  settings.tree_min_leaf);
        pred = tree_predict(tree, test.features);
    } else {
        throw config_error("models: unknown baseline '" + model_name + "'");
    }
    return r2_score(test.targets, pred);
}

double ExperimentResult::median_r2(std::size_t value_idx, std::size_t model_idx) const {
    std::vector<double> vals = r2.at(value_idx).at(model_idx);
    if (vals.empty()) throw validation_error("median_r2: no scores");
    std::sort(vals.begin(), vals.end());
    std::size_t n = vals.size();
    return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

void ExperimentResult::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("experiment csv: cannot open " + path);
    out << "sweep_value,model,seed,r2\n";
    char cell[40];
    for (std::size_t v = 0; v < sweep_values.size(); ++v)
        for (std::size_t m = 0; m < models.size(); ++m)
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                std::snprintf(cell, sizeof(cell), "%.17g", sweep_values[v]);
                out << cell << ',' << models[m] << ',' << seeds[s] << ',';
                std::snprintf(cell, sizeof(cell), "%.17g", r2[v][m][s]);
                out << cell << '\n';
            }
    if (!out) throw format_error("experiment csv: short write to " + path);
}

namespace {

ExperimentResult run_sweep(const std::string& sweep_name, const SynthConfig& base,
                           const ReconstructionModel& model, const BenchSettings& settings,
                           const std::vector<double>& values,
                           const std::vector<std::string>& models,
                           const std::vector<std::uint64_t>& seeds,
                           void (*apply)(SynthConfig&, double)) {
    if (values.empty()) throw config_error(sweep_name + ": sweep values must be nonempty");
    if (models.empty()) throw config_error("models: must name at least one baseline");
    if (seeds.empty()) throw config_error("seeds: must supply at least one seed");

    ExperimentResult result;
    result.sweep_name = sweep_name;
    result.sweep_values = values;
    result.models = models;
    result.seeds = seeds;
    result.r2.assign(values.size(),
                     std::vector<std::vector<double>>(models.size(),
                                                      std::vector<double>(seeds.size(), 0.0)));
    for (std::size_t v = 0; v < values.size(); ++v) {
        SynthConfig cfg = base;
        apply(cfg, values[v]);
        for (std::size_t m = 0; m < models.size(); ++m)
            for (std::size_t s = 0; s < seeds.size(); ++s)
                result.r2[v][m][s] = score_once(cfg, model, settings, models[m], seeds[s]);
    }
    return result;
}

}  // namespace

ExperimentResult run_separability_experiment(const SynthConfig& base,
                                             const ReconstructionModel& model,
                                             const BenchSettings& settings,
                                             const std::vector<double>& eps_values,
                                             const std::vector<std::string>& models,
                                             const std::vector<std::uint64_t>& seeds) {
    return run_sweep("separability", base, model, settings, eps_values, models, seeds,
                     [](SynthConfig& cfg, double value) { cfg.gen.separability = value; });
}

ExperimentResult run_concurrency_experiment(const SynthConfig& base,
                                            const ReconstructionModel& model,
                                            const BenchSettings& settings,
                                            const std::vector<std::size_t>& k_values,
                                            const std::vector<std::string>& models,
                                            const std::vector<std::uint64_t>& seeds) {
    std::vector<double> values(k_values.begin(), k_values.end());
    return run_sweep("concurrency", base, model, settings, values, models, seeds,
                     [](SynthConfig& cfg, double value) {
                         cfg.k_min = static_cast<std::size_t>(value);
                         cfg.k_max = static_cast<std::size_t>(value);
                     });
}

ExperimentResult run_brand_experiment(const SynthConfig& base, const ReconstructionModel& model,
                                      const BenchSettings& settings,
                                      const std::vector<double>& tau_values,
                                      const std::vector<std::string>& models,
                                      const std::vector<std::uint64_t>& seeds) {
    if (base.gen.brands_per_class < 2)
        throw config_error("brands_per_class: brand experiment requires >= 2 brands");
    SynthConfig branded = base;
    branded.split_mode = SplitMode::brand;
    return run_sweep("brand_tau", branded, model, settings, tau_values, models, seeds,
                     [](SynthConfig& cfg, double value) { cfg.tau = value; });
}

}  // namespace hfsg
