#include "hfsg/latent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hfsg/binary_io.hpp"
#include "hfsg/errors.hpp"

namespace hfsg {

namespace {

using EMat = Eigen::MatrixXd;
using EMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EMapMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EMap map_of(const Mat& m) {
    return EMap(m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
}

EMapMut map_of(Mat& m) {
    return EMapMut(m.data.data(), static_cast<Eigen::Index>(m.rows),
                   static_cast<Eigen::Index>(m.cols));
}

// Largest-magnitude entry of each row made positive (first index wins ties).
void fix_row_signs(Mat& w) {
    for (std::size_t i = 0; i < w.rows; ++i) {
        double* r = w.row_ptr(i);
        std::size_t arg = 0;
        double best = std::abs(r[0]);
        for (std::size_t j = 1; j < w.cols; ++j) {
            double a = std::abs(r[j]);
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (r[arg] < 0.0)
            for (std::size_t j = 0; j < w.cols; ++j) r[j] = -r[j];
    }
}

// Deterministic orthonormal fillers for directions beyond the numerical
// rank: canonical basis vectors orthogonalized against the accepted rows.
void pad_orthonormal(Mat& w, std::size_t built) {
    const std::size_t t = w.cols;
    std::vector<double> cand(t);
    for (std::size_t need = built; need < w.rows; ++need) {
        bool placed = false;
        for (std::size_t e = 0; e < t && !placed; ++e) {
            std::fill(cand.begin(), cand.end(), 0.0);
            cand[e] = 1.0;
            for (std::size_t r = 0; r < need; ++r) {
                const double* row = w.row_ptr(r);
                double dot = 0.0;
                for (std::size_t j = 0; j < t; ++j) dot += cand[j] * row[j];
                for (std::size_t j = 0; j < t; ++j) cand[j] -= dot * row[j];
            }
            double norm2 = 0.0;
            for (double v : cand) norm2 += v * v;
            if (norm2 > 0.25) {
                double inv = 1.0 / std::sqrt(norm2);
                double* dst = w.row_ptr(need);
                for (std::size_t j = 0; j < t; ++j) dst[j] = cand[j] * inv;
                placed = true;
            }
        }
        if (!placed)
            throw dimension_error("fit_pca: cannot complete an orthonormal basis");
    }
}

struct Spectrum {
    std::vector<double> eigenvalues;  // descending, clamped at 0
    double total = 0.0;               // sum of all eigenvalues (total scatter)
};

// Eigen-spectrum of the centered scatter matrix, plus enough information to
// rebuild principal directions. Chooses the smaller Gram matrix side.
struct PcaWork {
    EMat centered;   // N x T
    EMat vectors;    // eigenvectors of the chosen Gram matrix, column i = i-th (descending)
    Spectrum spectrum;
    bool gram_is_rows;  // true: vectors live in sample space (N), else feature space (T)
};

PcaWork decompose(const SignatureMatrix& x) {
    const std::size_t n = x.data.rows;
    const std::size_t t = x.data.cols;

    PcaWork work;
    EMap xm = map_of(x.data);
    Eigen::RowVectorXd mean = xm.colwise().mean();
    work.centered = xm.rowwise() - mean;

    const bool use_rows = n <= t;
    EMat gram = use_rows ? EMat(work.centered * work.centered.transpose())
                         : EMat(work.centered.transpose() * work.centered);
    Eigen::SelfAdjointEigenSolver<EMat> es(gram);
    if (es.info() != Eigen::Success)
        throw validation_error("fit_pca: eigendecomposition failed");

    const Eigen::Index m = gram.rows();
    work.vectors.resize(m, m);
    work.spectrum.eigenvalues.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        double ev = es.eigenvalues()(m - 1 - i);
        work.spectrum.eigenvalues[static_cast<std::size_t>(i)] = std::max(ev, 0.0);
        work.vectors.col(i) = es.eigenvectors().col(m - 1 - i);
        work.spectrum.total += std::max(ev, 0.0);
    }
    work.gram_is_rows = use_rows;
    return work;
}

ReconstructionModel build_model(const SignatureMatrix& x, PcaWork& work, std::size_t l) {
    const std::size_t n = x.data.rows;
    const std::size_t t = x.data.cols;

    ReconstructionModel model;
    model.sample_rate_hz = x.sample_rate_hz;
    model.samples_per_cycle = x.samples_per_cycle;
    model.mean_row.resize(t);
    {
        EMap xm = map_of(x.data);
        Eigen::RowVectorXd mean = xm.colwise().mean();
        for (std::size_t j = 0; j < t; ++j) model.mean_row[j] = mean(static_cast<Eigen::Index>(j));
    }

    const double lambda_max = work.spectrum.eigenvalues.empty() ? 0.0 : work.spectrum.eigenvalues[0];
    const double rank_eps = lambda_max * 1e-12;

    model.w_r = Mat(l, t);
    model.explained_variance_ratio.assign(l, 0.0);
    std::size_t built = 0;
    for (std::size_t i = 0; i < l; ++i) {
        double lambda = work.spectrum.eigenvalues[i];
        if (lambda <= rank_eps || lambda <= 0.0) break;
        Eigen::VectorXd dir;
        if (work.gram_is_rows)
            dir = work.centered.transpose() * work.vectors.col(static_cast<Eigen::Index>(i)) /
                  std::sqrt(lambda);
        else
            dir = work.vectors.col(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < t; ++j)
            model.w_r(i, j) = dir(static_cast<Eigen::Index>(j));
        if (work.spectrum.total > 0.0)
            model.explained_variance_ratio[i] = lambda / work.spectrum.total;
        built = i + 1;
    }
    pad_orthonormal(model.w_r, built);
    fix_row_signs(model.w_r);

    // latent statistics of the training data
    EMat z = work.centered * map_of(model.w_r).transpose();  // N x l
    model.sigma_r.resize(l);
    model.z_min.resize(l);
    model.z_max.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        auto col = z.col(static_cast<Eigen::Index>(i));
        model.z_min[i] = col.minCoeff();
        model.z_max[i] = col.maxCoeff();
        model.sigma_r[i] = n > 1 ? std::sqrt(col.squaredNorm() / static_cast<double>(n - 1)) : 0.0;
    }
    return model;
}

void check_fit_input(const SignatureMatrix& x) {
    x.validate();
    if (x.data.rows < 2) throw validation_error("fit_pca: needs at least two rows");
}

}  // namespace

void ReconstructionModel::validate() const {
    const std::size_t l = w_r.rows;
    const std::size_t t = w_r.cols;
    if (l == 0 || t == 0) throw validation_error("model: empty reconstruction matrix");
    if (mean_row.size() != t) throw dimension_error("model: mean_row length mismatch");
    if (sigma_r.size() != l || z_min.size() != l || z_max.size() != l ||
        explained_variance_ratio.size() != l)
        throw dimension_error("model: latent statistic length mismatch");
    for (std::size_t i = 0; i < l; ++i) {
        if (z_min[i] > z_max[i]) throw validation_error("model: z_min > z_max");
        if (sigma_r[i] < 0.0) throw validation_error("model: negative sigma_r");
        if (i > 0 && explained_variance_ratio[i] > explained_variance_ratio[i - 1] + 1e-12)
            throw validation_error("model: explained_variance_ratio not non-increasing");
    }
    // pairwise orthonormality
    EMap w = map_of(w_r);
    EMat gram = w * w.transpose();
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            double expect = i == j ? 1.0 : 0.0;
            if (std::abs(gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                         expect) > 1e-8)
                throw validation_error("model: w_r rows not orthonormal");
        }
}

LatentMatrix LatentMatrix::unlabeled(Mat z_in) {
    LatentMatrix lm;
    const std::size_t n = z_in.rows;
    lm.z = std::move(z_in);
    lm.y_g.assign(n, kLabelUnset);
    lm.y_class.assign(n, kLabelUnset);
    lm.y_brand.assign(n, kLabelUnset);
    return lm;
}

ReconstructionModel fit_pca(const SignatureMatrix& x, std::size_t l) {
    check_fit_input(x);
    const std::size_t max_l = std::min(x.data.rows, x.data.cols);
    if (l < 1 || l > max_l)
        throw dimension_error("fit_pca: l=" + std::to_string(l) + " outside [1, " +
                              std::to_string(max_l) + "]");
    PcaWork work = decompose(x);
    return build_model(x, work, l);
}

ReconstructionModel fit_pca_by_variance(const SignatureMatrix& x, double variance_threshold) {
    check_fit_input(x);
    if (!(variance_threshold > 0.0) || variance_threshold > 1.0)
        throw config_error("fit_pca: variance threshold must be in (0, 1]");
    PcaWork work = decompose(x);
    const std::size_t max_l = std::min(x.data.rows, x.data.cols);
    std::size_t l = max_l;
    if (work.spectrum.total > 0.0) {
        double cum = 0.0;
        for (std::size_t i = 0; i < max_l; ++i) {
            cum += work.spectrum.eigenvalues[i] / work.spectrum.total;
            if (cum >= variance_threshold) {
                l = i + 1;
                break;
            }
        }
    } else {
        l = 1;
    }
    return build_model(x, work, l);
}

LatentMatrix project(const ReconstructionModel& model, const SignatureMatrix& x) {
    x.validate();
    if (x.data.cols != model.signal_dim())
        throw dimension_error("project: signature length " + std::to_string(x.data.cols) +
                              " != model T " + std::to_string(model.signal_dim()));
    Mat z(x.data.rows, model.latent_dim());
    EMap xm = map_of(x.data);
    Eigen::Map<const Eigen::RowVectorXd> mean(model.mean_row.data(),
                                              static_cast<Eigen::Index>(model.mean_row.size()));
    map_of(z) = (xm.rowwise() - mean) * map_of(model.w_r).transpose();
    return LatentMatrix::unlabeled(std::move(z));
}

SignatureMatrix reconstruct(const ReconstructionModel& model, const Mat& z) {
    if (z.cols != model.latent_dim())
        throw dimension_error("reconstruct: latent width " + std::to_string(z.cols) +
                              " != model L " + std::to_string(model.latent_dim()));
    SignatureMatrix out;
    out.sample_rate_hz = model.sample_rate_hz;
    out.samples_per_cycle = model.samples_per_cycle;
    out.data = Mat(z.rows, model.signal_dim());
    Eigen::Map<const Eigen::RowVectorXd> mean(model.mean_row.data(),
                                              static_cast<Eigen::Index>(model.mean_row.size()));
    map_of(out.data) = (map_of(z) * map_of(model.w_r)).rowwise() + mean;
    return out;
}

double reconstruction_mae(const Mat& x, const Mat& x_hat) {
    require_same_shape(x, x_hat, "reconstruction_mae");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) acc += std::abs(x.data[i] - x_hat.data[i]);
    return acc / static_cast<double>(x.data.size());
}

double reconstruction_mae(const SignatureMatrix& x, const SignatureMatrix& x_hat) {
    return reconstruction_mae(x.data, x_hat.data);
}

// ---------------------------------------------------------------------------
// PCAMOD container

namespace {

constexpr char kModelMagic[6] = {'P', 'C', 'A', 'M', 'O', 'D'};
constexpr std::size_t kModelHeaderSize = 40;

void write_section(std::ofstream& out, const char tag[8], const double* values,
                   std::uint64_t count) {
    unsigned char head[16];
    std::memcpy(head, tag, 8);
    io_detail::store_u64_le(count, head + 8);
    out.write(reinterpret_cast<const char*>(head), 16);
    std::vector<unsigned char> buf(static_cast<std::size_t>(count) * 8);
    for (std::uint64_t i = 0; i < count; ++i)
        io_detail::store_f64_le(values[i], buf.data() + 8 * i);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_section(std::ifstream& in, const char tag[8], double* values, std::uint64_t count,
                  const std::string& path) {
    unsigned char head[16];
    std::streamoff at = in.tellg();
    in.read(reinterpret_cast<char*>(head), 16);
    if (in.gcount() != 16)
        throw format_error("pcamod read: truncated section header at offset " +
                           std::to_string(at) + " in " + path);
    if (std::memcmp(head, tag, 8) != 0)
        throw format_error(std::string("pcamod read: expected section '") + std::string(tag, 8) +
                           "' at offset " + std::to_string(at) + " in " + path);
    std::uint64_t stored = io_detail::load_u64_le(head + 8);
    if (stored != count)
        throw format_error("pcamod read: section '" + std::string(tag, 8) + "' declares " +
                           std::to_string(stored) + " values, header implies " +
                           std::to_string(count) + " in " + path);
    std::vector<unsigned char> buf(static_cast<std::size_t>(count) * 8);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::uint64_t>(in.gcount()) != count * 8)
        throw format_error("pcamod read: truncated section payload at offset " +
                           std::to_string(at + 16) + " in " + path);
    for (std::uint64_t i = 0; i < count; ++i) values[i] = io_detail::load_f64_le(buf.data() + 8 * i);
}

}  // namespace

void write_model(const ReconstructionModel& model, const std::string& path) {
    model.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("pcamod write: cannot open " + path);

    const std::uint64_t l = model.latent_dim();
    const std::uint64_t t = model.signal_dim();
    unsigned char header[kModelHeaderSize];
    std::memcpy(header, kModelMagic, 6);
    header[6] = 1;
    header[7] = 0;
    io_detail::store_u64_le(l, header + 8);
    io_detail::store_u64_le(t, header + 16);
    io_detail::store_f64_le(model.sample_rate_hz, header + 24);
    io_detail::store_u64_le(model.samples_per_cycle, header + 32);
    out.write(reinterpret_cast<const char*>(header), kModelHeaderSize);

    write_section(out, "MEANROW\0", model.mean_row.data(), t);
    write_section(out, "WMATRIX\0", model.w_r.data.data(), l * t);
    write_section(out, "SIGMAR\0\0", model.sigma_r.data(), l);
    write_section(out, "ZMIN\0\0\0\0", model.z_min.data(), l);
    write_section(out, "ZMAX\0\0\0\0", model.z_max.data(), l);
    write_section(out, "EVRATIO\0", model.explained_variance_ratio.data(), l);
    if (!out) throw format_error("pcamod write: short write to " + path);
}

ReconstructionModel read_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("pcamod read: cannot open " + path);

    unsigned char header[kModelHeaderSize];
    in.read(reinterpret_cast<char*>(header), kModelHeaderSize);
    if (in.gcount() != kModelHeaderSize)
        throw format_error("pcamod read: truncated header at offset " +
                           std::to_string(in.gcount()) + " in " + path);
    if (std::memcmp(header, kModelMagic, 6) != 0)
        throw format_error("pcamod read: bad magic at offset 0 in " + path);
    if (header[6] != 1)
        throw format_error("pcamod read: unsupported version at offset 6 in " + path);

    const std::uint64_t l = io_detail::load_u64_le(header + 8);
    const std::uint64_t t = io_detail::load_u64_le(header + 16);
    if (l == 0 || t == 0 || (t != 0 && l > UINT64_MAX / t))
        throw format_error("pcamod read: dimension overflow at offset 8 in " + path);

    ReconstructionModel model;
    model.sample_rate_hz = io_detail::load_f64_le(header + 24);
    model.samples_per_cycle = static_cast<std::size_t>(io_detail::load_u64_le(header + 32));
    model.mean_row.resize(t);
    model.w_r = Mat(l, t);
    model.sigma_r.resize(l);
    model.z_min.resize(l);
    model.z_max.resize(l);
    model.explained_variance_ratio.resize(l);

    read_section(in, "MEANROW\0", model.mean_row.data(), t, path);
    read_section(in, "WMATRIX\0", model.w_r.data.data(), l * t, path);
    read_section(in, "SIGMAR\0\0", model.sigma_r.data(), l, path);
    read_section(in, "ZMIN\0\0\0\0", model.z_min.data(), l, path);
    read_section(in, "ZMAX\0\0\0\0", model.z_max.data(), l, path);
    read_section(in, "EVRATIO\0", model.explained_variance_ratio.data(), l, path);
    model.validate();
    return model;
}

}  // namespace hfsg
