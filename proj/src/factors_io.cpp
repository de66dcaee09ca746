#include "blockprox/factors_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "blockprox/errors.hpp"

namespace blockprox {

namespace {

constexpr char kMagic[8] = {'B', 'P', 'X', 'F', 'A', 'C', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_double(std::ostream& os, double d) {
  put_u64(os, std::bit_cast<std::uint64_t>(d));
}

double get_double(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void write_row_major(std::ostream& os, const Matrix& mat) {
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    for (std::size_t c = 0; c < mat.cols(); ++c) put_double(os, mat.at(r, c));
  }
}

void read_row_major(std::istream& is, Matrix& mat) {
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    for (std::size_t c = 0; c < mat.cols(); ++c) mat.at(r, c) = get_double(is);
  }
}

}  // namespace

void write_factors(const std::string& path, const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows()) throw UsageError("write_factors: factor ranks differ");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  put_u64(os, u.cols());  // m
  put_u64(os, v.cols());  // n
  put_u64(os, u.rows());  // p
  write_row_major(os, u);
  write_row_major(os, v);
  if (!os) throw IoError("failed writing '" + path + "'");
}

FactorPair read_factors(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("'" + path + "' is not a factor file");
  }
  FactorPair f;
  f.m = get_u64(is);
  f.n = get_u64(is);
  f.p = get_u64(is);
  f.u = Matrix(f.p, f.m);
  f.v = Matrix(f.p, f.n);
  read_row_major(is, f.u);
  read_row_major(is, f.v);
  if (!is) throw IoError("'" + path + "' is truncated");
  return f;
}

}  // namespace blockprox
