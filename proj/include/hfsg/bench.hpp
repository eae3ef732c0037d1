#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfsg/aggregator.hpp"
#include "hfsg/features.hpp"
#include "hfsg/mat.hpp"

namespace hfsg {

/// KNN multi-output regressor. Features are standardized per column with
/// training statistics before distance computation; predictions are the
/// unweighted mean of the k nearest targets, ties broken by lowest row index.
struct KnnModel {
    Mat features;  // standardized training features
    Mat targets;
    std::vector<double> offset;  // per-column mean
    std::vector<double> scale;   // per-column std (1 for constant columns)
    std::size_t k = 5;
};

KnnModel knn_fit(const Mat& features, const Mat& targets, std::size_t k);
Mat knn_predict(const KnnModel& model, const Mat& queries);

/// Axis-aligned variance-reduction regression tree; leaves predict the mean
/// target vector. Fully deterministic: features scanned in order, first
/// strictly-best split wins.
struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> value;  // leaf prediction (kept on internal nodes too)
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_outputs = 0;
};

TreeModel tree_fit(const Mat& features, const Mat& targets, std::size_t max_depth,
                   std::size_t min_leaf);
Mat tree_predict(const TreeModel& model, const Mat& queries);

/// 1 - SS_res / SS_tot pooled over all entries, with SS_tot measured about
/// per-column means. May be negative; errors on zero-variance truth.
double r2_score(const Mat& y_true, const Mat& y_pred);

struct BenchSettings {
    std::size_t knn_k = 5;
    std::size_t tree_max_depth = 12;
    std::size_t tree_min_leaf = 5;
    std::size_t wavelet_levels = 8;
    std::size_t vi_points = 50;
    PeriodEnergy period_energy = PeriodEnergy::sum_squares;
};

/// Power-estimation problem extracted from one dataset side: feature rows
/// paired with power-share targets.
struct RegressionProblem {
    Mat features;  // A x F
    Mat targets;   // A x D, rows sum to <= 1 (+tolerance)

    void validate() const;
};

RegressionProblem make_regression_problem(const LabeledDataset& d, const VoltageReference& v,
                                          const FeatureLayout& layout);

struct ExperimentResult {
    std::string sweep_name;
    std::vector<double> sweep_values;
    std::vector<std::string> models;
    std::vector<std::uint64_t> seeds;
    // r2[value][model][seed]
    std::vector<std::vector<std::vector<double>>> r2;
    std::string config_echo;

    double median_r2(std::size_t value_idx, std::size_t model_idx) const;
    void write_csv(const std::string& path) const;
};

/// One train/score pass: make_datasets with the given seed, feature
/// extraction, model fit on train, R^2 on test.
double score_once(const SynthConfig& cfg, const ReconstructionModel& model,
                  const BenchSettings& settings, const std::string& model_name,
                  std::uint64_t seed);

ExperimentResult run_separability_experiment(const SynthConfig& base,
                                             const ReconstructionModel& model,
                                             const BenchSettings& settings,
                                             const std::vector<double>& eps_values,
                                             const std::vector<std::string>& models,
                                             const std::vector<std::uint64_t>& seeds);

ExperimentResult run_concurrency_experiment(const SynthConfig& base,
                                            const ReconstructionModel& model,
                                            const BenchSettings& settings,
                                            const std::vector<std::size_t>& k_values,
                                            const std::vector<std::string>& models,
                                            const std::vector<std::uint64_t>& seeds);

ExperimentResult run_brand_experiment(const SynthConfig& base, const ReconstructionModel& model,
                                      const BenchSettings& settings,
                                      const std::vector<double>& tau_values,
                                      const std::vector<std::string>& models,
                                      const std::vector<std::uint64_t>& seeds);

}  // namespace hfsg
