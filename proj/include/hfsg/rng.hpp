#pragma once

#include <cstdint>
#include <vector>

namespace hfsg {

// Named stream namespaces so independent pipeline stages never share a
// counter stream. Per-cluster draws get their own stream, which makes the
// generated data independent of cluster iteration order.
enum class stream_id : std::uint64_t {
    general = 0,
    centroids = 1,
    cluster = 2,
    kmeans = 3,
    activation = 4,
    split = 5,
    corpus = 6,
};

constexpr std::uint64_t make_stream(stream_id sid, std::uint64_t index = 0) {
    return (static_cast<std::uint64_t>(sid) << 48) | index;
}

/// Counter-based PRNG: Philox-4x64 with 10 rounds.
///
/// The key holds (seed, stream), the 256-bit counter starts at zero, so one
/// seed yields 2^64 independent streams that can be consumed in any order.
/// Identical (seed, stream) always reproduces the same sequence regardless
/// of what other streams were used.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [lo, hi], inclusive, rejection-sampled (exact).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    void fill_normal(double* dst, std::size_t n);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, i));
            std::swap(v[i], v[j]);
        }
    }

    /// k distinct values from {0, ..., n-1} via partial Fisher-Yates shuffle.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    void refill();

    std::uint64_t key_[2];
    std::uint64_t counter_[4];
    std::uint64_t buf_[4];
    int buf_pos_;       // next unread slot in buf_, 4 = empty
    double cached_normal_;
    bool has_cached_normal_;
};

}  // namespace hfsg
