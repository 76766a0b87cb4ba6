#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spidertr/errors.hpp"
#include "spidertr/experiments.hpp"
#include "spidertr/rng.hpp"

using namespace spidertr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig base_config() {
  ExperimentConfig c{SpiderShape(4, 2, 0.5)};
  c.trial_count = 20;
  c.trace_counts = {10, 100};
  c.master_seed = 5;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig c = base_config();
  CHECK_NOTHROW(validate(c));
  c.trace_counts = {0, 10};
  CHECK_THROWS_AS(validate(c), SpiderError);
  c.trace_counts = {10, 10};
  CHECK_THROWS_AS(validate(c), SpiderError);
  c.trace_counts = {100, 10};
  CHECK_THROWS_AS(validate(c), SpiderError);
  c.trace_counts = {};
  CHECK_THROWS_AS(validate(c), SpiderError);
  c = base_config();
  c.trial_count = 0;
  CHECK_THROWS_AS(validate(c), SpiderError);
  c = base_config();
  c.shape = SpiderShape(30, 3, 0.5);
  try {
    validate(c);
    FAIL("expected cap error");
  } catch (const SpiderError& e) {
    CHECK(e.kind() == ErrorKind::CapExceeded);
  }
  c = base_config();
  c.fixed_spider = Spider(Geometry(6, 2));
  CHECK_THROWS_AS(validate(c), SpiderError);
}

TEST_CASE("success rate grows with the trace count on (4,2), q=1/2") {
  ExperimentConfig c{SpiderShape(4, 2, 0.5)};
  c.trial_count = 100;
  c.trace_counts = {10, 100, 1000, 5000};
  c.master_seed = 2024;
  const ExperimentRecord r = run_sweep(c);
  REQUIRE(r.summary.size() == 4);
  CHECK(r.trials.size() == 400);
  for (std::size_t k = 1; k < r.summary.size(); ++k) CHECK(r.summary[k].rate >= r.summary[k - 1].rate);
  CHECK(r.summary.back().rate == 1.0);
  for (const auto& s : r.summary) {
    CHECK(s.trials == 100);
    CHECK(s.ci_low <= s.rate);
    CHECK(s.rate <= s.ci_high);
  }
}

TEST_CASE("trial order and seeding") {
  const ExperimentRecord r = run_sweep(base_config());
  for (std::size_t k = 0; k < r.trials.size(); ++k) {
    const auto& t = r.trials[k];
    CHECK(t.T == (k < 20 ? 10u : 100u));
    CHECK(t.trial == static_cast<int>(k % 20));
    CHECK(t.spider_seed == derive_seed(5, {1, static_cast<std::uint64_t>(t.trial)}));
  }
  SUBCASE("a trial does not depend on the trial count") {
    ExperimentConfig more = base_config();
    more.trial_count = 40;
    const ExperimentRecord r2 = run_sweep(more);
    for (const auto& t : r.trials) {
      const std::size_t k = (t.T == 10 ? 0 : 40) + static_cast<std::size_t>(t.trial);
      CHECK(r2.trials[k].success == t.success);
      CHECK(r2.trials[k].undefeated == t.undefeated);
    }
  }
  SUBCASE("different master seeds give different spider seeds") {
    ExperimentConfig other = base_config();
    other.master_seed = 6;
    CHECK(run_sweep(other).trials[0].spider_seed != r.trials[0].spider_seed);
  }
}

TEST_CASE("fixed seed spider") {
  ExperimentConfig c = base_config();
  c.fixed_spider = make_spider(4, 2, {{1, 1}, {0, 1}});
  c.trace_counts = {5000};
  const ExperimentRecord r = run_sweep(c);
  CHECK(r.summary[0].rate == 1.0);
}

TEST_CASE("output is byte-identical across reruns") {
  const auto dir = std::filesystem::temp_directory_path() / "spidertr_test_experiments";
  std::filesystem::create_directories(dir);
  ExperimentConfig c = base_config();
  c.output_path = (dir / "a.csv").string();
  const ExperimentRecord r1 = run_sweep(c);
  c.output_path = (dir / "b.csv").string();
  const ExperimentRecord r2 = run_sweep(c);
  const std::string a = slurp((dir / "a.csv").string());
  CHECK_FALSE(a.empty());
  CHECK(a == slurp((dir / "b.csv").string()));
  CHECK(a == sweep_csv(r1));
  CHECK(sweep_json(r1) == sweep_json(r2));
  CHECK(a.rfind(kSweepCsvVersion, 0) == 0);
  CHECK(sweep_csv(r1, true).find("wall_ms") != std::string::npos);
  CHECK(a.find("wall_ms") == std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output path fails before any trial runs") {
  ExperimentConfig c = base_config();
  c.output_path = "/nonexistent-dir/x/y.csv";
  CHECK_THROWS_AS(run_sweep(c), SpiderError);
}

TEST_CASE("wilson_interval") {
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  std::tie(lo, hi) = wilson_interval(100, 100);
  CHECK(hi == doctest::Approx(1.0));
  CHECK(lo == doctest::Approx(0.9630).epsilon(1e-3));
  std::tie(lo, hi) = wilson_interval(0, 10);
  CHECK(lo == doctest::Approx(0.0));
  CHECK_THROWS_AS(wilson_interval(1, 0), SpiderError);
}

TEST_CASE("find_t_star") {
  const TStarResult r = find_t_star(SpiderShape(2, 1, 0.5), 0.95, 50, 9);
  CHECK(r.T_star <= 64);
  CHECK(r.levels.back().T == r.T_star);
  CHECK(r.levels.back().rate >= 0.95);
  for (std::size_t k = 0; k < r.levels.size(); ++k) CHECK(r.levels[k].T == (std::uint64_t{1} << k));
  CHECK_THROWS_AS(find_t_star(SpiderShape(8, 2, 0.5), 0.95, 20, 9, 24, 4), SpiderError);
}
