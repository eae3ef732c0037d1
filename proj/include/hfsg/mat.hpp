#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hfsg/errors.hpp"

namespace hfsg {

/// Dense row-major matrix of doubles. Deliberately minimal: storage plus
/// indexed access; numerical kernels live with the algorithms that need them.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows*cols, row-major

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }

    std::span<double> row(std::size_t i) { return {row_ptr(i), cols}; }
    std::span<const double> row(std::size_t i) const { return {row_ptr(i), cols}; }

    bool same_shape(const Mat& other) const { return rows == other.rows && cols == other.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Dense row-major binary matrix (0/1 entries stored as bytes).
struct BinMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> data;

    BinMat() = default;
    BinMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    std::uint8_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::uint8_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t row_sum(std::size_t i) const {
        std::size_t s = 0;
        for (std::size_t j = 0; j < cols; ++j) s += data[i * cols + j];
        return s;
    }
};

inline void require_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (!a.same_shape(b))
        throw dimension_error(std::string(what) + ": shape mismatch (" + std::to_string(a.rows) +
                              "x" + std::to_string(a.cols) + " vs " + std::to_string(b.rows) +
                              "x" + std::to_string(b.cols) + ")");
}

}  // namespace hfsg
