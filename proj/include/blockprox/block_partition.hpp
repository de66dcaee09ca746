#ifndef BLOCKPROX_BLOCK_PARTITION_HPP_
#define BLOCKPROX_BLOCK_PARTITION_HPP_

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "blockprox/errors.hpp"

namespace blockprox {

/// Partition of the coordinates 0..n-1 into contiguous blocks. Block i covers
/// [offset(i), offset(i) + size(i)), so block views are zero-copy slices.
class BlockPartition {
 public:
  explicit BlockPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw UsageError("BlockPartition: need at least one block");
    offsets_.reserve(sizes_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t s : sizes_) {
      if (s == 0) throw UsageError("BlockPartition: block sizes must be positive");
      offsets_.push_back(offsets_.back() + s);
    }
  }

  static BlockPartition uniform(std::size_t block_count, std::size_t block_size) {
    return BlockPartition(std::vector<std::size_t>(block_count, block_size));
  }

  std::size_t block_count() const { return sizes_.size(); }
  std::size_t dimension() const { return offsets_.back(); }
  std::size_t size(std::size_t i) const { return sizes_[check(i)]; }
  std::size_t offset(std::size_t i) const { return offsets_[check(i)]; }

  std::span<double> view(std::span<double> x, std::size_t i) const {
    check_dim(x.size());
    return x.subspan(offsets_[check(i)], sizes_[i]);
  }
  std::span<const double> view(std::span<const double> x, std::size_t i) const {
    check_dim(x.size());
    return x.subspan(offsets_[check(i)], sizes_[i]);
  }

 private:
  std::size_t check(std::size_t i) const {
    if (i >= sizes_.size()) {
      throw UsageError("BlockPartition: block index " + std::to_string(i) +
                       " out of range [0, " + std::to_string(sizes_.size()) + ")");
    }
    return i;
  }
  void check_dim(std::size_t n) const {
    if (n != dimension()) {
      throw UsageError("BlockPartition: vector has dimension " + std::to_string(n) +
                       ", partition covers " + std::to_string(dimension()));
    }
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
};

}  // namespace blockprox

#endif  // BLOCKPROX_BLOCK_PARTITION_HPP_
