// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "spidertr/channel.hpp"
#include "spidertr/expectation.hpp"
#include "spidertr/experiments.hpp"
#include "spidertr/littlewood.hpp"
#include "spidertr/reconstruction.hpp"
#include "spidertr/rng.hpp"

using namespace spidertr;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

Spider worked_example() { return make_spider(4, 2, {{1, 1}, {0, 1}}); }

oracle::Grid grid_of(const Spider& x) {
  const Geometry& g = x.geometry();
  oracle::Grid out(g.legs(), std::vector<int>(g.d()));
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j) out[i][j] = x.label(i, j);
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Verdict worked_example_golden() {
  const double want[2][2] = {{13.0 / 16, 5.0 / 16}, {3.0 / 16, 3.0 / 16}};
  const auto e = expected_labels(worked_example(), 0.5);
  double err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(e.at(i, j) - want[i][j]));
  const auto exact = outcome_mean(enumerate_outcomes_exact(worked_example(), 1, 2));
  const bool exact_ok = exact[0] == Rational(13, 16) && exact[1] == Rational(5, 16) &&
                        exact[2] == Rational(3, 16) && exact[3] == Rational(3, 16);
  return {err <= 1e-12 && exact_ok, "max error " + fmt("%.3g", err) + (exact_ok ? ", rational exact" : ", rational MISMATCH")};
}

Verdict oracle_equivalence() {
  std::vector<std::pair<int, int>> shapes;
  for (int n : {4, 6, 8, 9, 10})
    for (int d : {1, 2, 3})
      if (n % d == 0) shapes.emplace_back(n, d);
  const double qs[] = {0.2, 0.5, 0.8};
  Rng rng(20260101);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto [n, d] = shapes[rng.below(shapes.size())];
    const double q = qs[rng.below(3)];
    const Spider x = random_spider(Geometry(n, d), rng.next());
    const auto e = expected_labels(x, q);
    const auto m = oracle::brute_mean(grid_of(x), q);
    for (int i = 0; i < n / d; ++i)
      for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(e.at(i, j) - m[i][j]));
  }
  return {worst <= 1e-10, "50 spiders, max deviation " + fmt("%.3g", worst)};
}

Verdict channel_statistics() {
  const std::uint64_t T = 100000;
  const auto sums = sample_label_counts(worked_example(), 0.5, 77, T);
  const auto e = expected_labels(worked_example(), 0.5);
  double worst = 0.0;  // in units of the allowed band
  for (int p = 0; p < 4; ++p) {
    const double pr = e.values()[p];
    const double band = 3.0 * std::sqrt(pr * (1 - pr) / T);
    worst = std::max(worst, std::abs(static_cast<double>(sums[p]) / T - pr) / band);
  }
  return {worst <= 1.0, "1e5 traces, worst deviation " + fmt("%.2f", worst) + " of the 3-sigma band"};
}

Verdict littlewood_witness() {
  Rng rng(31337);
  const double pi = std::acos(-1.0);
  int fails = 0;
  int escalated = 0;
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const int a = static_cast<int>(rng.below(16));
    const int b = static_cast<int>(rng.below(8));
    std::vector<std::vector<int>> c(a + 1, std::vector<int>(b + 1));
    bool nonzero = false;
    for (auto& row : c)
      for (int& v : row) {
        v = static_cast<int>(rng.below(3)) - 1;
        nonzero |= v != 0;
      }
    if (!nonzero) c[0][0] = 1;
    const LittlewoodPoly f(c);
    for (auto [L1, L2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{4, 1}}) {
      ++checked;
      const double bound = lemma_bound(f, L1, L2);
      auto ok = [&](const ArcPoint& p) {
        return std::abs(p.theta1) <= pi / L1 && std::abs(p.theta2) <= pi / L2 && p.modulus >= bound;
      };
      ArcPoint p = find_arc_point(f, L1, L2);
      if (ok(p)) continue;
      ++escalated;
      p = find_arc_point(f, L1, L2, 2 * 64 * std::max(L1, L2));
      if (!ok(p)) ++fails;
    }
  }
  return {fails == 0, std::to_string(checked) + " searches, " + std::to_string(escalated) + " escalated, " +
                          std::to_string(fails) + " failures"};
}

Verdict positive_gap() {
  double worst = 1.0;
  for (auto [n, d] : {std::pair{4, 2}, std::pair{6, 2}, std::pair{6, 3}})
    for (double q : {0.3, 0.5, 0.7}) {
      std::vector<Spider> all;
      for (const Spider& s : enumerate_candidates(Geometry(n, d))) all.push_back(s);
      for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
          worst = std::min(worst, distinguishing_index(all[a], all[b], q).gap);
    }
  return {worst > 1e-9, "smallest gap " + fmt("%.6g", worst)};
}

Verdict end_to_end() {
  std::string detail;
  bool pass = true;

  ExperimentConfig a{SpiderShape(4, 2, 0.5)};
  a.trace_counts = {5000};
  a.master_seed = 600;
  a.fixed_spider = worked_example();
  const int example_ok = run_sweep(a).summary[0].successes;
  pass &= example_ok >= 99;
  detail += "(a) " + std::to_string(example_ok) + "/100";

  for (auto [n, d, q] : {std::tuple{6, 3, 0.3}, std::tuple{8, 2, 0.5}}) {
    const SpiderShape shape(n, d, q);
    const TStarResult ts = find_t_star(shape, 0.9, 100, 601);
    ExperimentConfig c{shape};
    c.trace_counts = {ts.T_star};
    c.master_seed = 602;  // fresh seed set
    const RateSummary s = run_sweep(c).summary[0];
    pass &= s.rate >= 0.85;
    detail += "; (b) (" + std::to_string(n) + "," + std::to_string(d) + ") T*=" + std::to_string(ts.T_star) +
              " fresh rate " + fmt("%.2f", s.rate);
  }

  const SpiderShape shape(4, 2, 0.5);
  const double g = min_gap(shape).gap;
  const std::uint64_t T = chernoff_trace_count(4, g);
  ExperimentConfig c{shape};
  c.trace_counts = {T};
  c.master_seed = 603;
  const RateSummary s = run_sweep(c).summary[0];
  pass &= s.rate >= 0.99;
  detail += "; (c) gap " + fmt("%.4g", g) + " T_exact=" + std::to_string(T) + " rate " + fmt("%.2f", s.rate);
  return {pass, detail};
}

Verdict scaling_direction() {
  const TStarResult t2 = find_t_star(SpiderShape(12, 2, 0.5), 0.9, 100, 700);
  const TStarResult t3 = find_t_star(SpiderShape(12, 3, 0.5), 0.9, 100, 700);
  const auto ci = [](const RateSummary& s) {
    return "[" + fmt("%.2f", s.ci_low) + "," + fmt("%.2f", s.ci_high) + "]";
  };
  std::string detail = "T*(d=2)=" + std::to_string(t2.T_star) + " CI " + ci(t2.levels.back()) +
                       ", T*(d=3)=" + std::to_string(t3.T_star) + " CI " + ci(t3.levels.back());
  if (t3.T_star <= t2.T_star) return {true, detail};
  // Inversion: tolerated when d=3 at T*(d=2) is within noise of the target.
  const RateSummary* at = nullptr;
  for (const auto& s : t3.levels)
    if (s.T == t2.T_star) at = &s;
  const bool noise = at && at->ci_high >= 0.9;
  return {noise, detail + (noise ? " (inversion within noise)" : " (inversion beyond noise)")};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPIDERTR_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("spidertr_accept_" + std::to_string(::getpid()));
  const std::vector<std::string> files = {"s.json", "t.txt", "e.csv", "r.json", "sweep.csv",
                                          "sweep.json", "findt.json", "mingap.json", "lw.json", "cx.json"};
  bool ok = true;
  for (const char* run : {"1", "2"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    const auto p = [&](const std::string& f) { return (dir / f).string(); };
    fs::path coeffs = dir / "coeffs.json";
    std::ofstream(coeffs) << "[[1,0,-1],[0,1,1],[-1,1,0]]";
    ok &= run_cli("gen --n 12 --d 4 --seed 7 --out " + p("s.json")) == 0;
    ok &= run_cli("channel --spider " + p("s.json") + " --q 0.5 --count 2000 --seed 1 --out " + p("t.txt")) == 0;
    ok &= run_cli("expect --spider " + p("s.json") + " --q 0.5 --out " + p("e.csv")) == 0;
    ok &= run_cli("reconstruct --traces " + p("t.txt") + " --n 12 --d 4 --q 0.5 --seed 3 --out " + p("r.json")) == 0;
    ok &= run_cli("sweep --n 6 --d 3 --q 0.3 --trials 30 --T 4 16 64 --seed 5 --format csv --out " + p("sweep.csv")) == 0;
    ok &= run_cli("sweep --n 6 --d 3 --q 0.3 --trials 30 --T 4 16 64 --seed 5 --out " + p("sweep.json")) == 0;
    ok &= run_cli("findt --n 4 --d 2 --q 0.5 --trials 30 --target 0.9 --seed 6 --out " + p("findt.json")) == 0;
    ok &= run_cli("mingap --n 6 --d 2 --q 0.5 --out " + p("mingap.json")) == 0;
    ok &= run_cli("littlewood --coeffs " + coeffs.string() + " --L1 2 --L2 1 --out " + p("lw.json")) == 0;
    ok &= run_cli("complexity --n 16 --d 2 --q 0.5 --gap 0.1 --out " + p("cx.json")) == 0;
  }
  int same = 0;
  for (const auto& f : files) {
    const std::string a = slurp(root / "1" / f);
    same += !a.empty() && a == slurp(root / "2" / f);
  }
  fs::remove_all(root);
  ok &= same == static_cast<int>(files.size());
  return {ok, std::to_string(same) + "/" + std::to_string(files.size()) + " output files byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"worked-example expected labels", worked_example_golden},
      {"closed form matches exhaustive outcomes", oracle_equivalence},
      {"channel empirical means", channel_statistics},
      {"arc witness meets the modulus bound", littlewood_witness},
      {"positive distinguishing gap", positive_gap},
      {"end-to-end reconstruction", end_to_end},
      {"trace count non-increasing in depth", scaling_direction},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::printf("%s %zu %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
