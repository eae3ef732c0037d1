#include "hfsg/rng.hpp"

#include <cmath>

#include "hfsg/errors.hpp"

namespace hfsg {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline void philox_round(std::uint64_t s[4], const std::uint64_t k[2]) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, s[0], hi0, lo0);
    mulhilo(kMul1, s[2], hi1, lo1);
    s[0] = hi1 ^ s[1] ^ k[0];
    s[1] = lo1;
    s[2] = hi0 ^ s[3] ^ k[1];
    s[3] = lo0;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_{seed, stream},
      counter_{0, 0, 0, 0},
      buf_{0, 0, 0, 0},
      buf_pos_(4),
      cached_normal_(0.0),
      has_cached_normal_(false) {}

void Rng::refill() {
    // 256-bit counter increment with carry, then emit the block for the new
    // counter value (matches the reference implementation's ordering)
    if (++counter_[0] == 0)
        if (++counter_[1] == 0)
            if (++counter_[2] == 0) ++counter_[3];
    std::uint64_t s[4] = {counter_[0], counter_[1], counter_[2], counter_[3]};
    std::uint64_t k[2] = {key_[0], key_[1]};
    for (int round = 0; round < 10; ++round) {
        philox_round(s, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    buf_[0] = s[0];
    buf_[1] = s[1];
    buf_[2] = s[2];
    buf_[3] = s[3];
    buf_pos_ = 0;
}

std::uint64_t Rng::next_u64() {
    if (buf_pos_ >= 4) refill();
    return buf_[buf_pos_++];
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw config_error("uniform_int: lo > hi");
    std::uint64_t range = hi - lo;
    if (range == UINT64_MAX) return next_u64();
    ++range;
    // reject draws beyond the largest multiple of range to keep exact uniformity
    std::uint64_t excess = (UINT64_MAX % range + 1) % range;
    std::uint64_t limit = 0 - excess;  // 2^64 - excess (mod 2^64); excess==0 -> accept all
    std::uint64_t x = next_u64();
    if (excess != 0)
        while (x >= limit) x = next_u64();
    return lo + x % range;
}

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 in (0,1] keeps log() finite
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(angle);
    has_cached_normal_ = true;
    return r * std::cos(angle);
}

void Rng::fill_normal(double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = normal();
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw config_error("sample_without_replacement: k > n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_int(0, n - 1 - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace hfsg
