#pragma once

#include <stdexcept>
#include <string>

namespace hfsg {

// Error taxonomy used across the library. Everything derives from
// hfsg::error so callers can catch the whole family at once.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameter (counts, bounds, split settings).
struct config_error : error {
    using error::error;
};

// Matrix/vector shape mismatch, or a requested dimension the data cannot support.
struct dimension_error : error {
    using error::error;
};

// Input data violates a contract (non-finite values, constant signal where
// variation is required, empty input).
struct validation_error : error {
    using error::error;
};

// On-disk container is malformed; message names the byte offset when known.
struct format_error : error {
    using error::error;
};

// Cycle alignment cannot proceed (no usable voltage zero crossings).
struct alignment_error : error {
    using error::error;
};

// A per-row feature is undefined for the given input (e.g. all-zero row).
struct feature_error : error {
    using error::error;
};

}  // namespace hfsg
