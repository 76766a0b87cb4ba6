#include "spidertr/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "omp_compat.hpp"
#include "spidertr/channel.hpp"
#include "spidertr/errors.hpp"
#include "spidertr/reconstruction.hpp"
#include "spidertr/rng.hpp"

namespace spidertr {

void validate(const ExperimentConfig& config) {
  if (config.trial_count < 1) fail("trial_count must be >= 1");
  if (config.trace_counts.empty()) fail("trace_counts must not be empty");
  for (std::size_t k = 0; k < config.trace_counts.size(); ++k) {
    if (config.trace_counts[k] == 0) fail("trace counts must be positive integers");
    if (k > 0 && config.trace_counts[k] <= config.trace_counts[k - 1]) {
      fail("trace counts must be strictly increasing");
    }
  }
  if (config.fixed_spider && !(config.fixed_spider->geometry() == config.shape.geometry)) {
    fail("fixed seed spider does not match the experiment shape");
  }
  if (config.shape.n() > config.cap) {
    fail_cap("shape n=" + std::to_string(config.shape.n()) + " exceeds the enumeration cap " +
             std::to_string(config.cap));
  }
}

namespace {

TrialRecord run_trial(const ExperimentConfig& cfg, const CandidateTable& table, std::uint64_t T, int trial) {
  const auto start = std::chrono::steady_clock::now();
  const auto t = static_cast<std::uint64_t>(trial);
  const std::uint64_t spider_seed = derive_seed(cfg.master_seed, {1, t});
  const Spider seed_spider =
      cfg.fixed_spider ? *cfg.fixed_spider : random_spider(cfg.shape.geometry, spider_seed);
  const auto sums = sample_label_counts(seed_spider, cfg.shape.q, derive_seed(cfg.master_seed, {2, T, t}), T);
  const TraceSample sample = TraceSample::from_counts(cfg.shape.geometry, sums, T);
  const TournamentResult r = run_tournament(table, sample, derive_seed(cfg.master_seed, {3, T, t}),
                                            {TournamentMode::Knockout, Exec::Parallel});
  const bool success = r.winner == seed_spider.index();
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {T, trial, spider_seed, success, r.undefeated, ms};
}

RateSummary summarize(std::uint64_t T, const std::vector<TrialRecord>& trials) {
  int s = 0;
  int c = 0;
  for (const auto& r : trials) {
    if (r.T != T) continue;
    ++c;
    s += r.success ? 1 : 0;
  }
  const auto [lo, hi] = wilson_interval(s, c);
  return {T, s, c, c ? static_cast<double>(s) / c : 0.0, lo, hi};
}

std::vector<TrialRecord> run_level(const ExperimentConfig& cfg, const CandidateTable& table,
                                   const std::vector<std::uint64_t>& counts) {
  const auto per = static_cast<std::int64_t>(cfg.trial_count);
  const auto total = static_cast<std::int64_t>(counts.size()) * per;
  std::vector<TrialRecord> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < total; ++k) {
    out[k] = run_trial(cfg, table, counts[k / per], static_cast<int>(k % per));
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0 || successes < 0 || successes > trials) fail("Wilson interval needs 0 <= successes <= trials, trials > 0");
  const double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ExperimentRecord run_sweep(const ExperimentConfig& config) {
  validate(config);
  std::ofstream out;
  if (!config.output_path.empty()) {
    out.open(config.output_path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write sweep output to " + config.output_path);
  }
  const CandidateTable table = CandidateTable::all(config.shape, config.cap);
  ExperimentRecord rec{config, run_level(config, table, config.trace_counts), {}};
  for (auto T : config.trace_counts) rec.summary.push_back(summarize(T, rec.trials));
  if (out) out << sweep_csv(rec);
  return rec;
}

TStarResult find_t_star(const SpiderShape& shape, double target_rate, int trial_count,
                        std::uint64_t master_seed, int cap, std::uint64_t guard) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) fail("target rate must lie in (0, 1)");
  ExperimentConfig cfg{shape, trial_count, {1}, master_seed, "", cap, std::nullopt};
  validate(cfg);
  const CandidateTable table = CandidateTable::all(shape, cap);
  TStarResult res{0, {}};
  for (std::uint64_t T = 1; T <= guard; T *= 2) {
    const auto trials = run_level(cfg, table, {T});
    res.levels.push_back(summarize(T, trials));
    if (res.levels.back().rate >= target_rate) {
      res.T_star = T;
      return res;
    }
  }
  fail("success rate " + std::to_string(target_rate) + " not reached below the guard of " +
       std::to_string(guard) + " traces");
}

std::string sweep_csv(const ExperimentRecord& record, bool include_timing) {
  const auto& c = record.config;
  const std::string shape = std::to_string(c.shape.n()) + "," + std::to_string(c.shape.d()) + "," +
                            fmt_double(c.shape.q);
  std::ostringstream os;
  os << kSweepCsvVersion << "\n";
  os << "kind,n,d,q,T,trial,seed,success,undefeated,successes,trials,rate,ci_low,ci_high";
  if (include_timing) os << ",wall_ms";
  os << "\n";
  for (const auto& t : record.trials) {
    os << "trial," << shape << "," << t.T << "," << t.trial << "," << t.spider_seed << ","
       << (t.success ? 1 : 0) << "," << (t.undefeated ? 1 : 0) << ",,,,,";
    if (include_timing) os << "," << fmt_double(t.wall_ms);
    os << "\n";
  }
  for (const auto& s : record.summary) {
    os << "summary," << shape << "," << s.T << ",,,,," << s.successes << "," << s.trials << ","
       << fmt_double(s.rate) << "," << fmt_double(s.ci_low) << "," << fmt_double(s.ci_high);
    if (include_timing) os << ",";
    os << "\n";
  }
  return os.str();
}

std::string sweep_json(const ExperimentRecord& record, bool include_timing) {
  const auto& c = record.config;
  nlohmann::json j;
  j["config"] = {{"n", c.shape.n()},          {"d", c.shape.d()},
                 {"q", c.shape.q},            {"trial_count", c.trial_count},
                 {"trace_counts", c.trace_counts}, {"master_seed", c.master_seed}};
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : record.trials) {
    nlohmann::json r = {{"T", t.T},       {"trial", t.trial},           {"seed", t.spider_seed},
                        {"success", t.success}, {"undefeated", t.undefeated}};
    if (include_timing) r["wall_ms"] = t.wall_ms;
    trials.push_back(std::move(r));
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : record.summary) {
    summary.push_back({{"T", s.T},
                       {"successes", s.successes},
                       {"trials", s.trials},
                       {"rate", s.rate},
                       {"ci_low", s.ci_low},
                       {"ci_high", s.ci_high}});
  }
  j["trials"] = std::move(trials);
  j["summary"] = std::move(summary);
  return j.dump(2);
}

}  // namespace spidertr
