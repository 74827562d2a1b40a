#pragma once

#include <vector>

#include "freeprob/common.hpp"

namespace freeprob::nc {

// A non-crossing partition of {1..r} in canonical form: each block sorted
// ascending, blocks sorted by their minimum.
struct NCPartition {
  int r = 0;
  std::vector<std::vector<int>> blocks;

  bool operator==(const NCPartition&) const = default;
  bool operator<(const NCPartition& other) const;

  // Validates and canonicalizes; throws std::domain_error if the blocks do
  // not form a non-crossing partition of {1..r}.
  static NCPartition from_blocks(int r, std::vector<std::vector<int>> blocks);

  static NCPartition singletons(int r);
  static NCPartition full_block(int r);
};

// True iff `blocks` is a partition of {1..r}; r is inferred from the total
// element count.
bool is_partition(const std::vector<std::vector<int>>& blocks);

// True iff no a<b<c<d has a,c in one block and b,d in another.  Throws
// std::domain_error when `blocks` is not a partition.
bool is_noncrossing(const std::vector<std::vector<int>>& blocks);

// All of NC(r) in lexicographic order of the canonical block form.
// Memoized per r; the returned reference stays valid for the process.
const std::vector<NCPartition>& enumerate_nc(int r, int r_max = kDefaultRMax);

// Refinement order: every block of sigma contained in a block of pi.
bool leq(const NCPartition& sigma, const NCPartition& pi);

// Kreweras complement, computed as the cycle decomposition of p^{-1} o gamma
// where p is the cyclic-within-blocks permutation of pi and gamma = (1 2 .. r).
NCPartition kreweras(const NCPartition& pi);

// Moebius function mu(pi, 1_r) of the NC(r) lattice, evaluated as the product
// over blocks V of the Kreweras complement of (-1)^{|V|-1} C_{|V|-1}.
long long moebius_to_top(const NCPartition& pi);

}  // namespace freeprob::nc
