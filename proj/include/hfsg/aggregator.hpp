#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfsg/genmodel.hpp"
#include "hfsg/latent.hpp"
#include "hfsg/signalio.hpp"

namespace hfsg {

/// Binary scenario-by-appliance activation matrix; every row activates
/// between k_min and k_max distinct appliances.
struct ActivationMatrix {
    BinMat a;
    std::size_t k_min = 1;
    std::size_t k_max = 1;
};

enum class SplitMode { uniform, brand };

std::string to_string(SplitMode mode);
SplitMode split_mode_from_string(const std::string& s);

/// Aggregate dataset: scenario waveforms, class/brand indicators, power
/// shares, the activation matrix, and the submetered appliance labels the
/// scenarios were built from.
struct LabeledDataset {
    SignatureMatrix x_a;
    BinMat y_class_ind;                          // A x D, support of p_a
    BinMat y_brand_ind;                          // A x (D*B), global brand = class*B + brand
    Mat p_a;                                     // A x D power shares
    ActivationMatrix activation;
    std::vector<std::int64_t> appliance_class;   // per submetered appliance
    std::vector<std::int64_t> appliance_brand;   // local within-mode brand id
    std::size_t n_classes = 0;
    std::size_t brands_per_class = 0;
    std::string provenance;

    std::size_t scenarios() const { return x_a.data.rows; }
};

struct SplitPair {
    LabeledDataset train;
    LabeledDataset test;
    SplitMode mode = SplitMode::uniform;
    double tau = 0.5;
};

/// Everything make_datasets needs on top of a fitted model.
struct SynthConfig {
    GenerationConfig gen;
    std::size_t aggregates = 600;  // A
    std::size_t k_min = 1;
    std::size_t k_max = 3;
    SplitMode split_mode = SplitMode::uniform;
    double tau = 0.7;
    bool normalize_shares = true;
    double voltage_amplitude = 1.0;

    void validate() const;
};

/// Pearson correlation coefficient; undefined (error) when either signal is
/// constant.
double pearson(std::span<const double> x, std::span<const double> v);

/// Negates every row whose correlation with the reference voltage is
/// negative. Constant rows are left untouched (warning recorded). Idempotent.
SignatureMatrix cond_mirror(SignatureMatrix x_g, const VoltageReference& v,
                            std::vector<std::string>* warnings = nullptr);

/// Each row draws K ~ UniformInteger[k_min, k_max] and activates K distinct
/// appliances chosen uniformly without replacement.
ActivationMatrix build_activation_matrix(std::size_t a_rows, std::size_t n, std::size_t k_min,
                                         std::size_t k_max, Rng& rng);

/// x_a = activation * x_g, accumulated left-to-right over appliance index.
Mat aggregate_signatures(const ActivationMatrix& activation, const SignatureMatrix& x_g);

/// Per-scenario per-class active power (1/T) sum_t v_t * sum_{j active, class d}
/// x_g[j,t]; negative class totals are clamped to zero (warning recorded).
/// With normalize set, each row is divided by its sum; zero-power rows stay
/// all-zero.
Mat compute_power_shares(const ActivationMatrix& activation, const SignatureMatrix& x_g,
                         const VoltageReference& v, const std::vector<std::int64_t>& y_class,
                         std::size_t n_classes, bool normalize,
                         std::vector<std::string>* warnings = nullptr);

/// Uniform mode: random row partition with floor(tau*A) training rows.
/// Brand mode: per class, ceil(tau*B) brands (at most B-1) are chosen for
/// training; a scenario trains only if every active appliance carries a
/// training brand, mixed scenarios go to test.
SplitPair split_dataset(const LabeledDataset& d, SplitMode mode, double tau, Rng& rng);

/// End-to-end pipeline: make_submetered -> reconstruct -> cond_mirror ->
/// build_activation_matrix -> aggregate_signatures -> compute_power_shares ->
/// split_dataset, with stage-tagged error propagation and a provenance echo.
SplitPair make_datasets(const SynthConfig& cfg, const ReconstructionModel& model,
                        std::vector<std::string>* warnings = nullptr);

/// Algorithm variant that loads a persisted model first.
SplitPair make_datasets(const SynthConfig& cfg, const std::string& model_path,
                        std::vector<std::string>* warnings = nullptr);

/// Algorithm variant that fits the model from a real corpus first.
SplitPair make_datasets(const SynthConfig& cfg, const SignatureMatrix& real, std::size_t l,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace hfsg
