#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hfsg/aggregator.hpp"
#include "hfsg/bench.hpp"

namespace hfsg {

/// Flat key=value run configuration covering every tunable of the pipeline.
/// Unknown keys are rejected; every value is type- and range-checked before
/// any stage runs. Defaults are echoed into the manifest.
struct RunConfig {
    // generation
    std::uint64_t seed = 1;
    std::size_t n_samples = 240;
    std::size_t n_classes = 4;
    std::size_t modes_per_class = 1;
    std::size_t brands_per_class = 2;
    double separability = 1.0;
    double sigma_min = 0.5;
    double sigma_max = 1.5;
    std::optional<double> z_min;  // scalar fallback; absent -> model bounds
    std::optional<double> z_max;

    // aggregation
    std::size_t aggregates = 600;
    std::size_t k_min = 1;
    std::size_t k_max = 3;
    SplitMode split_mode = SplitMode::uniform;
    double tau = 0.7;
    bool normalize_shares = true;
    double voltage_amplitude = 1.0;

    // training
    std::size_t components = 50;
    double variance_threshold = 0.0;  // 0 disables threshold-based selection

    // baselines and features
    std::size_t knn_k = 5;
    std::size_t tree_max_depth = 12;
    std::size_t tree_min_leaf = 5;
    std::size_t wavelet_levels = 8;
    std::size_t vi_points = 50;
    PeriodEnergy period_energy = PeriodEnergy::sum_squares;

    // plumbing
    std::string model_path;
    std::string out_dir = ".";

    static RunConfig from_file(const std::string& path);

    /// Applies one key=value assignment (file line or flag override).
    void apply(const std::string& key, const std::string& value);

    void validate() const;

    /// Deterministic full echo, one key=value per line, fixed order.
    std::string manifest_text() const;

    SynthConfig to_synth_config(std::size_t latent_dim) const;
    BenchSettings to_bench_settings() const;
};

}  // namespace hfsg
