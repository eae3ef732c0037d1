#include "hfsg/sigmat_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "hfsg/binary_io.hpp"
#include "hfsg/errors.hpp"

namespace hfsg {

using namespace io_detail;

namespace {

constexpr char kMagic[6] = {'S', 'I', 'G', 'M', 'A', 'T'};
constexpr std::size_t kHeaderSize = 40;

void check_mul_overflow(std::uint64_t rows, std::uint64_t cols, const char* where) {
    if (rows != 0 && cols > std::numeric_limits<std::uint64_t>::max() / rows)
        throw format_error(std::string(where) + ": dimension overflow at offset 8 (rows=" +
                           std::to_string(rows) + ", cols=" + std::to_string(cols) + ")");
}

}  // namespace

void write_signature_matrix(const SignatureMatrix& m, const std::string& path) {
    m.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("sigmat write: cannot open " + path);

    unsigned char header[kHeaderSize];
    std::memcpy(header, kMagic, 6);
    header[6] = 1;  // version
    header[7] = 0;  // flags
    store_u64_le(m.data.rows, header + 8);
    store_u64_le(m.data.cols, header + 16);
    store_f64_le(m.sample_rate_hz, header + 24);
    store_u64_le(m.samples_per_cycle, header + 32);
    out.write(reinterpret_cast<const char*>(header), kHeaderSize);

    std::vector<unsigned char> buf(m.data.cols * 4);
    for (std::size_t i = 0; i < m.data.rows; ++i) {
        const double* src = m.data.row_ptr(i);
        for (std::size_t j = 0; j < m.data.cols; ++j)
            store_f32_le(static_cast<float>(src[j]), buf.data() + 4 * j);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw format_error("sigmat write: short write to " + path);
}

SignatureMatrix read_signature_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("sigmat read: cannot open " + path);

    unsigned char header[kHeaderSize];
    in.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (in.gcount() != kHeaderSize)
        throw format_error("sigmat read: truncated header at offset " +
                           std::to_string(in.gcount()) + " in " + path);
    if (std::memcmp(header, kMagic, 6) != 0)
        throw format_error("sigmat read: bad magic at offset 0 in " + path);
    if (header[6] != 1)
        throw format_error("sigmat read: unsupported version " + std::to_string(header[6]) +
                           " at offset 6 in " + path);
    if (header[7] != 0)
        throw format_error("sigmat read: unknown flags at offset 7 in " + path);

    std::uint64_t rows = load_u64_le(header + 8);
    std::uint64_t cols = load_u64_le(header + 16);
    check_mul_overflow(rows, cols, "sigmat read");
    SignatureMatrix m;
    m.sample_rate_hz = load_f64_le(header + 24);
    m.samples_per_cycle = static_cast<std::size_t>(load_u64_le(header + 32));

    m.data = Mat(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    std::vector<unsigned char> buf(cols * 4);
    for (std::uint64_t i = 0; i < rows; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::uint64_t>(in.gcount()) != cols * 4)
            throw format_error("sigmat read: truncated payload at offset " +
                               std::to_string(kHeaderSize + i * cols * 4 +
                                              static_cast<std::uint64_t>(in.gcount())) +
                               " (header declares " + std::to_string(rows) + " rows) in " + path);
        double* dst = m.data.row_ptr(static_cast<std::size_t>(i));
        for (std::uint64_t j = 0; j < cols; ++j)
            dst[j] = static_cast<double>(load_f32_le(buf.data() + 4 * j));
    }
    m.validate();
    return m;
}

void write_matrix_csv(const Mat& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("csv write: cannot open " + path);
    char cell[40];
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            std::snprintf(cell, sizeof(cell), "%.17g", m(i, j));
            if (j) out << ',';
            out << cell;
        }
        out << '\n';
    }
    if (!out) throw format_error("csv write: short write to " + path);
}

Mat read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("csv read: cannot open " + path);
    std::vector<double> values;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t this_cols = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw format_error("csv read: bad number '" + cell + "' on line " +
                                   std::to_string(rows + 1) + " of " + path);
            }
            ++this_cols;
        }
        if (rows == 0)
            cols = this_cols;
        else if (this_cols != cols)
            throw format_error("csv read: ragged row on line " + std::to_string(rows + 1) +
                               " of " + path);
        ++rows;
    }
    Mat m(rows, cols);
    m.data = std::move(values);
    return m;
}

}  // namespace hfsg
