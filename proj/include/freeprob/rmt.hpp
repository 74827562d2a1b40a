#pragma once

#include <cstdint>
#include <functional>

#include "freeprob/transforms.hpp"

namespace freeprob::rmt {

// Rotated-diagonal ensemble: X_i = U_i D_i U_i^T with independent Haar
// orthogonal U_i and deterministic-quantile diagonals, so the only sampling
// noise is the freeness error of the rotations.
struct EnsembleSpec {
  int N = 256;
  int T = 10;
  std::uint64_t seed = 1;
};

// Quantile function u in (0,1) -> location, used to fill the diagonals.
using QuantileFn = std::function<double(double)>;

QuantileFn quantile_of(const transforms::Measure& mu);

struct WordEstimate {
  std::vector<int> word;
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Normalized-trace estimates for a batch of words over the labeled letters
// (label i uses letters[i-1]).  Word products share prefixes across the batch;
// a fixed seed gives a bit-identical result.
std::vector<WordEstimate> estimate_mixed_moments(const std::vector<std::vector<int>>& words,
                                                 const std::vector<QuantileFn>& letters,
                                                 const EnsembleSpec& spec);

WordEstimate estimate_mixed_moment(const std::vector<int>& word, const QuantileFn& letter,
                                   const EnsembleSpec& spec);

// Sample-Gram maximal correlation between powers of S_n and S_m (degree D),
// run through the same CCA eigensolve as the combinatorial engine.
double empirical_max_correlation(int m, int n, int D, const QuantileFn& letter,
                                 const EnsembleSpec& spec);

}  // namespace freeprob::rmt
