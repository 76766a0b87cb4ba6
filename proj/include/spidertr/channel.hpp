#pragma once

// Deletion channel: each node is deleted independently with probability q,
// survivors shift toward the root within their leg, emptied legs vanish and
// the remaining legs close ranks to the left. The result is zero-padded back
// to the full (n, d) shape.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "spidertr/spider.hpp"

namespace spidertr {

inline constexpr int kOutcomeEnumerationCap = 20;

/// Bit-packed survival pattern; bit j of word i set means node (i, j) is kept.
class DeletionMask {
 public:
  DeletionMask(Geometry g, std::vector<std::uint64_t> kept);
  static DeletionMask keep_all(Geometry g);
  static DeletionMask delete_all(Geometry g);

  const Geometry& geometry() const { return geo_; }
  bool kept(int i, int j) const { return (kept_[i] >> j) & 1U; }
  std::uint64_t leg_word(int i) const { return kept_[i]; }
  int kept_count() const;

 private:
  Geometry geo_;
  std::vector<std::uint64_t> kept_;
};

Trace apply_mask(const Spider& x, const DeletionMask& m);

/// `count` traces from one Rng(seed) stream: one uniform draw per node in
/// leg-major order per trace, node deleted iff draw < q.
std::vector<Trace> sample_traces(const Spider& x, double q, std::uint64_t seed, std::size_t count);
Trace sample_trace(const Spider& x, double q, std::uint64_t seed);

/// Same stream as sample_traces but only the per-node sums of trace labels
/// are kept; returns counts leg-major.
std::vector<std::uint64_t> sample_label_counts(const Spider& x, double q, std::uint64_t seed,
                                               std::size_t count);

struct Outcome {
  Trace trace;
  double probability;
};

/// Padded traces with merged probabilities, sorted by trace index.
using OutcomeDistribution = std::vector<Outcome>;

/// All 2^n masks, weight (1-q)^kept q^deleted. Requires n <= 20.
OutcomeDistribution enumerate_outcomes(const Spider& x, double q);

using Rational = boost::multiprecision::cpp_rational;

struct ExactOutcome {
  Trace trace;
  Rational probability;
};

/// Exact-rational enumeration for q = q_num / q_den.
std::vector<ExactOutcome> enumerate_outcomes_exact(const Spider& x, std::int64_t q_num,
                                                   std::int64_t q_den);

/// Probability-weighted mean label per trace position, leg-major.
std::vector<double> outcome_mean(const OutcomeDistribution& dist);
std::vector<Rational> outcome_mean(const std::vector<ExactOutcome>& dist);

}  // namespace spidertr
