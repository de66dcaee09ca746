#ifndef BLOCKPROX_FACTORS_IO_HPP_
#define BLOCKPROX_FACTORS_IO_HPP_

#include <string>

#include "blockprox/dense.hpp"

namespace blockprox {

struct FactorPair {
  std::size_t m = 0, n = 0, p = 0;
  Matrix u;  // p x m
  Matrix v;  // p x n
};

/// Flat binary factor file: 32-byte header (8-byte magic "BPXFACT1", then m,
/// n, p as little-endian uint64), followed by U (p x m) and V (p x n) as
/// little-endian doubles in row-major order.
void write_factors(const std::string& path, const Matrix& u, const Matrix& v);

FactorPair read_factors(const std::string& path);

}  // namespace blockprox

#endif  // BLOCKPROX_FACTORS_IO_HPP_
