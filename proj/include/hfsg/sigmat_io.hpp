#pragma once

#include <string>

#include "hfsg/signalio.hpp"

namespace hfsg {

// SIGMAT container, version 1. Little-endian throughout:
//   bytes 0-5   magic "SIGMAT"
//   byte  6     version = 1
//   byte  7     flags = 0
//   bytes 8-15  row count, u64
//   bytes 16-23 column count, u64
//   bytes 24-31 sample_rate_hz, IEEE-754 binary64
//   bytes 32-39 samples_per_cycle, u64
//   payload     rows*cols IEEE-754 binary32, row-major
// Payload is binary32 on disk; in-memory values are binary64.

void write_signature_matrix(const SignatureMatrix& m, const std::string& path);
SignatureMatrix read_signature_matrix(const std::string& path);

/// CSV: one row per line, comma separated, no header. Values are written
/// with shortest round-trip precision.
void write_matrix_csv(const Mat& m, const std::string& path);
Mat read_matrix_csv(const std::string& path);

}  // namespace hfsg
