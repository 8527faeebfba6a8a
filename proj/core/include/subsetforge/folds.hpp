#pragma once

#include <cstdint>
#include <vector>

#include "subsetforge/common.hpp"

namespace subsetforge {

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of_row;  // values 0..k-1
  std::uint64_t seed = 0;

  bool operator==(const FoldAssignment&) const = default;
};

// Per-class round-robin assignment after a seeded shuffle: fold positive
// counts differ by at most one, and likewise for negatives. Every class
// must have at least k members.
FoldAssignment stratified_kfold(const std::vector<int>& target, int k, std::uint64_t seed);

}  // namespace subsetforge
