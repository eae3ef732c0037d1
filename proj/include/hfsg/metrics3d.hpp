#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hfsg/latent.hpp"
#include "hfsg/signalio.hpp"

namespace hfsg {

/// Point cloud embedded in the model's latent space, with the cloud centroid
/// and each point's distance to it.
struct EmbeddedCloud {
    Mat points;                  // N x L
    std::vector<double> center;  // L
    std::vector<double> radii;   // N

    std::size_t size() const { return points.rows; }
};

struct MetricReport {
    std::vector<double> alphas;        // uniform grid, also used for beta
    std::vector<double> p_alpha_curve;
    std::vector<double> r_beta_curve;
    double authenticity = 0.0;
    double ip_alpha = 0.0;
    double ir_beta = 0.0;
    std::size_t knn_k = 5;
};

/// Centroid-centered cloud over raw latent points.
EmbeddedCloud make_cloud(Mat points);

/// Projects both matrices through the model's PCA and wraps them in clouds
/// (real first, synthetic second).
std::pair<EmbeddedCloud, EmbeddedCloud> embed(const SignatureMatrix& x_r,
                                              const SignatureMatrix& x_g,
                                              const ReconstructionModel& model);

/// Quantile with linear interpolation between order statistics at h = q*n,
/// so the empirical fraction at grid point k/n is exactly k/n.
double radius_quantile(std::vector<double> radii, double q);

/// P_alpha: fraction of synthetic points within the alpha-quantile radius of
/// the real cloud's center.
std::vector<double> alpha_precision_curve(const EmbeddedCloud& real, const EmbeddedCloud& synth,
                                          const std::vector<double>& alphas);

/// R_beta: fraction of real points whose nearest beta-support synthetic point
/// lies within the distance to their k-th nearest real neighbor. beta = 0 is
/// the empty support (recall 0).
std::vector<double> beta_recall_curve(const EmbeddedCloud& real, const EmbeddedCloud& synth,
                                      const std::vector<double>& betas, std::size_t k);

/// Fraction of real points whose nearest other real point is strictly closer
/// than any synthetic point; ties count as inauthentic.
double authenticity(const EmbeddedCloud& real, const EmbeddedCloud& synth);

/// (IP, IR) = 1 - 2 * integral |curve - identity|, trapezoid rule, clamped to
/// [0, 1]. Grids must be uniform and sorted.
std::pair<double, double> integrated_metrics(const std::vector<double>& grid,
                                             const std::vector<double>& p_curve,
                                             const std::vector<double>& r_curve);

/// Full evaluation on a uniform grid with step `grid_step`.
MetricReport evaluate_metrics(const SignatureMatrix& x_r, const SignatureMatrix& x_g,
                              const ReconstructionModel& model, std::size_t knn_k = 5,
                              double grid_step = 0.01);

/// CSV: "alpha,p_alpha,beta,r_beta" rows followed by "metric,value" scalars.
void write_metric_report_csv(const MetricReport& report, const std::string& path);

}  // namespace hfsg
