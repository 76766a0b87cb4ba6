#pragma once

// Mean-based best-match reconstruction.
//
// Two candidates are compared at the trace position where their expected
// labels differ most; the candidate whose expected label there is closer to
// the empirical mean wins (ties go to the first argument). The tournament
// returns the candidate that wins every comparison, or a seeded uniform draw
// when there is none.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spidertr/execution.hpp"
#include "spidertr/expectation.hpp"
#include "spidertr/spider.hpp"

namespace spidertr {

inline constexpr int kMinGapCap = 16;
/// Expected-label differences closer than this are treated as ties.
inline constexpr double kTieTol = 1e-12;

struct DistinguishingStat {
  int I;
  int J;
  double gap;  // |e1 - e2|, the max over all positions
  double e1;
  double e2;
};

/// Empirical per-position means of a set of traces.
class TraceSample {
 public:
  /// Throws on an empty list or mixed shapes.
  static TraceSample from_traces(std::vector<Trace> traces);
  /// Per-position label sums over `count` traces, leg-major.
  static TraceSample from_counts(Geometry g, const std::vector<std::uint64_t>& sums, std::uint64_t count);
  /// Means injected directly (e.g. an exact expected matrix); test hook.
  static TraceSample from_means(Geometry g, std::vector<double> means, std::uint64_t count);

  const Geometry& geometry() const { return geo_; }
  std::uint64_t size() const { return count_; }
  double mean(int i, int j) const { return mean_[geo_.flat(i, j)]; }
  const std::vector<double>& means() const { return mean_; }
  /// Empty unless built with from_traces.
  const std::vector<Trace>& traces() const { return traces_; }

 private:
  TraceSample(Geometry g, std::vector<double> mean, std::uint64_t count, std::vector<Trace> traces)
      : geo_(g), mean_(std::move(mean)), count_(count), traces_(std::move(traces)) {}

  Geometry geo_;
  std::vector<double> mean_;
  std::uint64_t count_;
  std::vector<Trace> traces_;
};

/// Argmax of |E1 - E2| over positions, ties (within kTieTol) to the smaller (I, J).
DistinguishingStat distinguishing_index(const ExpectedLabelMatrix& e1, const ExpectedLabelMatrix& e2);
/// Throws when x1 == x2 or the shapes differ.
DistinguishingStat distinguishing_index(const Spider& x1, const Spider& x2, double q);

/// x1 iff |m - e1| <= |m - e2| (within kTieTol) with m the empirical mean
/// at the distinguishing index.
const Spider& better_match(const Spider& x1, const Spider& x2, const TraceSample& sample, double q);

/// Expected label matrices for a candidate list, row k leg-major.
class CandidateTable {
 public:
  CandidateTable(const SpiderShape& shape, std::span<const Spider> candidates, Exec exec = Exec::Parallel);
  /// All 2^n spiders in enumeration order.
  static CandidateTable all(const SpiderShape& shape, int cap = kDefaultEnumerationCap,
                            Exec exec = Exec::Parallel);

  std::size_t size() const { return count_; }
  int width() const { return width_; }
  std::span<const double> row(std::size_t k) const {
    return {values_.data() + k * static_cast<std::size_t>(width_), static_cast<std::size_t>(width_)};
  }

 private:
  CandidateTable(int width, std::size_t count) : width_(width), count_(count) {}
  void fill_from_masks(const SpiderShape& shape, std::span<const std::uint64_t> masks, Exec exec);

  int width_;
  std::size_t count_;
  std::vector<double> values_;
};

/// Outcome of comparing table rows a (first) and b at the distinguishing
/// index: true when a is the better match.
bool first_wins(std::span<const double> a, std::span<const double> b, std::span<const double> means);

enum class TournamentMode {
  AllPairs,  // every unordered pair; fills per-candidate loss counts
  Knockout,  // O(N) elimination plus verification; same winner, no loss counts
};

struct TournamentOptions {
  TournamentMode mode = TournamentMode::AllPairs;
  Exec exec = Exec::Parallel;
};

struct TournamentResult {
  std::size_t winner;  // index into the candidate list
  bool undefeated;     // false when the seeded fallback was used
  std::vector<std::uint64_t> losses;  // AllPairs only
  double min_gap;      // smallest distinguishing gap among compared pairs
  std::uint64_t comparisons;
};

/// Comparison order for a pair is (lower index, higher index).
TournamentResult run_tournament(const CandidateTable& table, const TraceSample& sample,
                                std::uint64_t seed, const TournamentOptions& opt = {});

struct TournamentOutcome {
  Spider winner;
  TournamentResult result;
};

TournamentOutcome tournament(std::span<const Spider> candidates, const TraceSample& sample, double q,
                             std::uint64_t seed, const TournamentOptions& opt = {});

struct ReconstructOptions {
  int cap = kDefaultEnumerationCap;
  TournamentMode mode = TournamentMode::AllPairs;
  Exec exec = Exec::Parallel;
};

/// Tournament over every spider of the shape.
TournamentOutcome reconstruct(const TraceSample& sample, const SpiderShape& shape, std::uint64_t seed,
                              const ReconstructOptions& opt = {});

struct MinGapResult {
  double gap;
  LabelDiff witness;  // leading nonzero entry is +1
};

/// Exact minimum over distinct candidate pairs of the distinguishing gap,
/// computed over nonzero label differences up to sign ((3^n - 1)/2 of them).
MinGapResult min_gap(const SpiderShape& shape, int cap = kMinGapCap, Exec exec = Exec::Parallel);

/// Analytic gap floor (1-q)/n * exp(-(n/d) C q^d / (L^2 (1-q^d)) - C' d - L log n)
/// for caller-chosen constants.
double eta_floor(const SpiderShape& shape, double L, double C, double C_prime);

struct ComplexityEstimate {
  double L;             // (n q^d / (d log n))^{1/3}
  double leg_term;      // (n/d) q^d / (L^2 (1 - q^d))
  double depth_term;    // d
  double log_term;      // L log n
  double exponent;      // C (n q^d)^{1/3} d^{-1/3} (log n)^{2/3}
  double T_theory;      // exp(exponent)
  bool regime_ok;       // d <= log_{1/q} n
  std::optional<std::uint64_t> T_exact;  // ceil(2 (n log 2 + log n) / g^2)
};

ComplexityEstimate sample_complexity(const SpiderShape& shape, double C_user = 1.0,
                                     std::optional<double> gap = std::nullopt);

/// ceil(2 (n log 2 + log n) / g^2).
std::uint64_t chernoff_trace_count(int n, double gap);

}  // namespace spidertr
