#pragma once

// Straightforward single-threaded implementations of the parallel kernels.
// They share no code paths with the optimized versions beyond the public
// primitives (kernel weights, apply_mask, better_match) and are kept for
// cross-checking and benchmarking.

#include <cstdint>
#include <span>
#include <vector>

#include "spidertr/channel.hpp"
#include "spidertr/expectation.hpp"
#include "spidertr/reconstruction.hpp"

namespace spidertr::reference {

/// Four-index sum E[b_{i',j'}] = sum_{i>=i', j>=j'} a_ij K[(i,j)->(i',j')].
ExpectedLabelMatrix expected_labels(const Spider& x, double q);

/// One pass over all masks into a single ordered map.
OutcomeDistribution enumerate_outcomes(const Spider& x, double q);

struct TournamentReference {
  std::size_t winner;
  bool undefeated;
  std::vector<std::uint64_t> losses;
};

/// Every unordered pair through better_match on the spiders themselves.
TournamentReference tournament(std::span<const Spider> candidates, const TraceSample& sample, double q,
                               std::uint64_t seed);

/// Every nonzero label difference through expected_labels(LabelDiff).
double min_gap(const SpiderShape& shape);

}  // namespace spidertr::reference
