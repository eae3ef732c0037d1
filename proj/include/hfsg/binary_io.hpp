#pragma once

#include <cstdint>
#include <cstring>

namespace hfsg::io_detail {

// Little-endian scalar packing shared by the SIGMAT and PCAMOD containers.

inline void store_u64_le(std::uint64_t v, unsigned char* dst) {
    for (int i = 0; i < 8; ++i) dst[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::uint64_t load_u64_le(const unsigned char* src) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
    return v;
}

inline void store_f64_le(double v, unsigned char* dst) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    store_u64_le(bits, dst);
}

inline double load_f64_le(const unsigned char* src) {
    std::uint64_t bits = load_u64_le(src);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline void store_f32_le(float v, unsigned char* dst) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) dst[i] = static_cast<unsigned char>(bits >> (8 * i));
}

inline float load_f32_le(const unsigned char* src) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(src[i]) << (8 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace hfsg::io_detail
