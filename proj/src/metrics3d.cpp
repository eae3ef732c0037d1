#include "hfsg/metrics3d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "hfsg/errors.hpp"

namespace hfsg {

namespace {

double euclidean(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j] - b[j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

EmbeddedCloud make_cloud(Mat points) {
    if (points.rows == 0) throw validation_error("embed: empty point cloud");
    EmbeddedCloud cloud;
    const std::size_t n = points.rows;
    const std::size_t l = points.cols;
    cloud.center.assign(l, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = points.row_ptr(i);
        for (std::size_t j = 0; j < l; ++j) cloud.center[j] += row[j];
    }
    for (double& v : cloud.center) v /= static_cast<double>(n);
    cloud.radii.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.radii[i] = euclidean(points.row_ptr(i), cloud.center.data(), l);
    cloud.points = std::move(points);
    return cloud;
}

std::pair<EmbeddedCloud, EmbeddedCloud> embed(const SignatureMatrix& x_r,
                                              const SignatureMatrix& x_g,
                                              const ReconstructionModel& model) {
    if (x_r.data.rows == 0 || x_g.data.rows == 0)
        throw validation_error("embed: empty input matrix");
    LatentMatrix zr = project(model, x_r);
    LatentMatrix zg = project(model, x_g);
    return {make_cloud(std::move(zr.z)), make_cloud(std::move(zg.z))};
}

double radius_quantile(std::vector<double> radii, double q) {
    if (radii.empty()) throw validation_error("quantile: empty sample");
    std::sort(radii.begin(), radii.end());
    const double n = static_cast<double>(radii.size());
    double h = q * n;
    if (h <= 1.0) return radii.front();
    if (h >= n) return radii.back();
    double k = std::floor(h);
    double frac = h - k;
    std::size_t idx = static_cast<std::size_t>(k) - 1;  // x_(k), 1-indexed order statistic
    if (frac == 0.0) return radii[idx];
    return radii[idx] + frac * (radii[idx + 1] - radii[idx]);
}

std::vector<double> alpha_precision_curve(const EmbeddedCloud& real, const EmbeddedCloud& synth,
                                          const std::vector<double>& alphas) {
    if (real.size() == 0 || synth.size() == 0)
        throw validation_error("alpha_precision: empty cloud");
    if (real.points.cols != synth.points.cols)
        throw dimension_error("alpha_precision: latent dimensions differ");
    const std::size_t l = real.points.cols;

    // distances of synthetic points to the real center
    std::vector<double> dist(synth.size());
    for (std::size_t i = 0; i < synth.size(); ++i)
        dist[i] = euclidean(synth.points.row_ptr(i), real.center.data(), l);

    std::vector<double> sorted_radii = real.radii;
    std::sort(sorted_radii.begin(), sorted_radii.end());

    std::vector<double> curve(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        double r_alpha = radius_quantile(sorted_radii, alphas[a]);
        std::size_t inside = 0;
        for (double d : dist)
            if (d <= r_alpha) ++inside;
        curve[a] = static_cast<double>(inside) / static_cast<double>(synth.size());
    }
    return curve;
}

std::vector<double> beta_recall_curve(const EmbeddedCloud& real, const EmbeddedCloud& synth,
                                      const std::vector<double>& betas, std::size_t k) {
    const std::size_t nr = real.size();
    const std::size_t ng = synth.size();
    if (nr == 0 || ng == 0) throw validation_error("beta_recall: empty cloud");
    if (k < 1 || k >= nr)
        throw config_error("beta_recall: need 1 <= k < number of real points (" +
                           std::to_string(nr) + ")");
    if (real.points.cols != synth.points.cols)
        throw dimension_error("beta_recall: latent dimensions differ");
    const std::size_t l = real.points.cols;

    // distance of each real point to its k-th nearest other real point
    std::vector<double> ball_radius(nr);
    std::vector<double> dists(nr - 1);
    for (std::size_t i = 0; i < nr; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < nr; ++j) {
            if (j == i) continue;
            dists[m++] = euclidean(real.points.row_ptr(i), real.points.row_ptr(j), l);
        }
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         dists.end());
        ball_radius[i] = dists[k - 1];
    }

    std::vector<double> sorted_synth_radii = synth.radii;
    std::sort(sorted_synth_radii.begin(), sorted_synth_radii.end());

    std::vector<double> curve(betas.size());
    for (std::size_t b = 0; b < betas.size(); ++b) {
        if (betas[b] <= 0.0) {
            curve[b] = 0.0;  // empty beta-support
            continue;
        }
        double r_beta = radius_quantile(sorted_synth_radii, betas[b]);
        std::size_t covered = 0;
        for (std::size_t i = 0; i < nr; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < ng; ++s) {
                if (synth.radii[s] > r_beta) continue;
                double d = euclidean(real.points.row_ptr(i), synth.points.row_ptr(s), l);
                if (d < best) best = d;
            }
            if (best <= ball_radius[i]) ++covered;
        }
        curve[b] = static_cast<double>(covered) / static_cast<double>(nr);
    }
    return curve;
}

double authenticity(const EmbeddedCloud& real, const EmbeddedCloud& synth) {
    const std::size_t nr = real.size();
    const std::size_t ng = synth.size();
    if (nr < 2) throw validation_error("authenticity: needs at least two real points");
    if (ng == 0) throw validation_error("authenticity: empty synthetic cloud");
    if (real.points.cols != synth.points.cols)
        throw dimension_error("authenticity: latent dimensions differ");
    const std::size_t l = real.points.cols;

    std::size_t authentic = 0;
    for (std::size_t i = 0; i < nr; ++i) {
        double d_real = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nr; ++j) {
            if (j == i) continue;
            double d = euclidean(real.points.row_ptr(i), real.points.row_ptr(j), l);
            if (d < d_real) d_real = d;
        }
        double d_synth = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < ng; ++s) {
            double d = euclidean(real.points.row_ptr(i), synth.points.row_ptr(s), l);
            if (d < d_synth) d_synth = d;
        }
        if (d_real < d_synth) ++authentic;  // ties count as inauthentic
    }
    return static_cast<double>(authentic) / static_cast<double>(nr);
}

namespace {

double curve_deviation(const std::vector<double>& grid, const std::vector<double>& curve) {
    if (grid.size() != curve.size() || grid.size() < 2)
        throw dimension_error("integrated_metrics: grid/curve mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double e0 = std::abs(curve[i] - grid[i]);
        double e1 = std::abs(curve[i + 1] - grid[i + 1]);
        acc += 0.5 * (e0 + e1) * (grid[i + 1] - grid[i]);
    }
    return acc;
}

}  // namespace

std::pair<double, double> integrated_metrics(const std::vector<double>& grid,
                                             const std::vector<double>& p_curve,
                                             const std::vector<double>& r_curve) {
    double ip = std::clamp(1.0 - 2.0 * curve_deviation(grid, p_curve), 0.0, 1.0);
    double ir = std::clamp(1.0 - 2.0 * curve_deviation(grid, r_curve), 0.0, 1.0);
    return {ip, ir};
}

MetricReport evaluate_metrics(const SignatureMatrix& x_r, const SignatureMatrix& x_g,
                              const ReconstructionModel& model, std::size_t knn_k,
                              double grid_step) {
    if (!(grid_step > 0.0) || grid_step > 1.0)
        throw config_error("evaluate_metrics: grid_step must be in (0, 1]");
    auto [real, synth] = embed(x_r, x_g, model);

    MetricReport report;
    report.knn_k = knn_k;
    std::size_t steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));
    report.alphas.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        report.alphas[i] = static_cast<double>(i) / static_cast<double>(steps);

    report.p_alpha_curve = alpha_precision_curve(real, synth, report.alphas);
    report.r_beta_curve = beta_recall_curve(real, synth, report.alphas, knn_k);
    report.authenticity = authenticity(real, synth);
    std::tie(report.ip_alpha, report.ir_beta) =
        integrated_metrics(report.alphas, report.p_alpha_curve, report.r_beta_curve);
    return report;
}

void write_metric_report_csv(const MetricReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("metric report: cannot open " + path);
    char buf[128];
    out << "alpha,p_alpha,beta,r_beta\n";
    for (std::size_t i = 0; i < report.alphas.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", report.alphas[i],
                      report.p_alpha_curve[i], report.alphas[i], report.r_beta_curve[i]);
        out << buf << '\n';
    }
    out << "metric,value\n";
    std::snprintf(buf, sizeof(buf), "ip_alpha,%.17g", report.ip_alpha);
    out << buf << '\n';
    std::snprintf(buf, sizeof(buf), "ir_beta,%.17g", report.ir_beta);
    out << buf << '\n';
    std::snprintf(buf, sizeof(buf), "authenticity,%.17g", report.authenticity);
    out << buf << '\n';
    out << "knn_k," << report.knn_k << '\n';
    if (!out) throw format_error("metric report: short write to " + path);
}

}  // namespace hfsg
