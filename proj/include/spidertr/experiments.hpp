#pragma once

// Seeded generate -> corrupt -> reconstruct pipelines.
//
// Trial t at trace count T uses
//   spider seed  = derive_seed(master, {1, t})
//   trace seed   = derive_seed(master, {2, T, t})
//   fallback seed= derive_seed(master, {3, T, t})
// so a trial's seed spider is shared across the T values of a sweep and no
// trial's randomness depends on any other trial.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spidertr/spider.hpp"

namespace spidertr {

struct ExperimentConfig {
  SpiderShape shape;
  int trial_count = 100;
  std::vector<std::uint64_t> trace_counts;  // strictly increasing, positive
  std::uint64_t master_seed = 0;
  std::string output_path;                  // empty: do not write
  int cap = kDefaultEnumerationCap;
  std::optional<Spider> fixed_spider;       // use this seed spider in every trial
};

struct TrialRecord {
  std::uint64_t T;
  int trial;
  std::uint64_t spider_seed;
  bool success;     // reconstruction equals the seed spider exactly
  bool undefeated;  // false when the fallback draw decided the output
  double wall_ms;
};

struct RateSummary {
  std::uint64_t T;
  int successes;
  int trials;
  double rate;
  double ci_low;   // Wilson 95%
  double ci_high;
};

struct ExperimentRecord {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;  // ordered by (T, trial)
  std::vector<RateSummary> summary; // ordered by T
};

void validate(const ExperimentConfig& config);

ExperimentRecord run_sweep(const ExperimentConfig& config);

struct TStarResult {
  std::uint64_t T_star;
  std::vector<RateSummary> levels;  // every doubling step tried
};

inline constexpr std::uint64_t kTStarGuard = std::uint64_t{1} << 20;

/// Doubling search T = 1, 2, 4, ... until the success rate over trial_count
/// trials reaches target_rate. Throws once T would exceed the guard.
TStarResult find_t_star(const SpiderShape& shape, double target_rate, int trial_count,
                        std::uint64_t master_seed, int cap = kDefaultEnumerationCap,
                        std::uint64_t guard = kTStarGuard);

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(int successes, int trials);

/// Versioned CSV; wall time column only when include_timing.
std::string sweep_csv(const ExperimentRecord& record, bool include_timing = false);
std::string sweep_json(const ExperimentRecord& record, bool include_timing = false);

inline constexpr const char* kSweepCsvVersion = "# spidertr-sweep-csv v1";

}  // namespace spidertr
