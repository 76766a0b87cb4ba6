// spidertr: command-line front end for spider trace reconstruction.
//
//   spidertr gen --n 12 --d 4 --seed 7 --out spider.json
//   spidertr channel --spider spider.json --q 0.5 --seed 1 --count 1000 --out traces.txt
//   spidertr reconstruct --traces traces.txt --n 12 --d 4 --q 0.5 --seed 3
//
// Exit codes: 0 success, 2 precondition violation, 3 enumeration cap exceeded.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "spidertr/channel.hpp"
#include "spidertr/errors.hpp"
#include "spidertr/expectation.hpp"
#include "spidertr/experiments.hpp"
#include "spidertr/littlewood.hpp"
#include "spidertr/reconstruction.hpp"

namespace {

using namespace spidertr;
using json = nlohmann::json;

constexpr int kExitPrecondition = 2;
constexpr int kExitCap = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write " + g.out);
  out << text;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json legs_json(const LabelDiff& d) {
  json legs = json::array();
  for (int i = 0; i < d.geometry().legs(); ++i) {
    json leg = json::array();
    for (int j = 0; j < d.geometry().d(); ++j) leg.push_back(d.value(i, j));
    legs.push_back(std::move(leg));
  }
  return legs;
}

std::vector<Trace> read_traces(const std::string& path, const Geometry& g) {
  std::istringstream in(read_file(path));
  std::vector<Trace> traces;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    traces.push_back(Trace::from_bitstring(g, line));
  }
  return traces;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace reconstruction for spider graphs under node deletion"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format for tabular results")
      ->check(CLI::IsMember({"csv", "json"}));

  int n = 0;
  int d = 0;
  double q = 0.5;
  int cap = kDefaultEnumerationCap;
  std::string spider_path;
  std::string bits;

  auto* gen = app.add_subcommand("gen", "Random (or explicit) spider as a JSON document");
  gen->add_option("--n", n)->required();
  gen->add_option("--d", d)->required();
  gen->add_option("--bits", bits, "Leg-major bit string instead of a random spider");

  std::uint64_t count = 1;
  auto* channel = app.add_subcommand("channel", "Sample padded traces, one bit string per line");
  channel->add_option("--spider", spider_path)->required();
  channel->add_option("--q", q)->required();
  channel->add_option("--count", count);

  auto* expect = app.add_subcommand("expect", "Expected trace label matrix as CSV");
  expect->add_option("--spider", spider_path)->required();
  expect->add_option("--q", q)->required();

  std::string coeffs_path;
  int L1 = 1;
  int L2 = 1;
  int grid = 0;
  auto* littlewood = app.add_subcommand("littlewood", "Arc-restricted large-modulus point");
  littlewood->add_option("--coeffs", coeffs_path, "JSON matrix of {-1,0,1} coefficients")->required();
  littlewood->add_option("--L1", L1);
  littlewood->add_option("--L2", L2);
  littlewood->add_option("--grid", grid, "Points per axis (0: 64*L)");

  std::string traces_path;
  auto* recon = app.add_subcommand("reconstruct", "Best-match tournament over all candidates");
  recon->add_option("--traces", traces_path)->required();
  recon->add_option("--n", n)->required();
  recon->add_option("--d", d)->required();
  recon->add_option("--q", q)->required();
  recon->add_option("--cap", cap);

  int gap_cap = kMinGapCap;
  auto* mingap = app.add_subcommand("mingap", "Exact minimum distinguishing gap");
  mingap->add_option("--n", n)->required();
  mingap->add_option("--d", d)->required();
  mingap->add_option("--q", q)->required();
  mingap->add_option("--cap", gap_cap);

  double gap = 0.0;
  double C = 1.0;
  auto* complexity = app.add_subcommand("complexity", "Trace-count estimates");
  complexity->add_option("--n", n)->required();
  complexity->add_option("--d", d)->required();
  complexity->add_option("--q", q)->required();
  auto* gap_opt = complexity->add_option("--gap", gap);
  complexity->add_option("--C", C);

  int trials = 100;
  std::vector<std::uint64_t> trace_counts;
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Success rate over a list of trace counts");
  sweep->add_option("--n", n)->required();
  sweep->add_option("--d", d)->required();
  sweep->add_option("--q", q)->required();
  sweep->add_option("--trials", trials);
  sweep->add_option("--T", trace_counts, "Trace counts, strictly increasing")->required();
  sweep->add_option("--cap", cap);
  sweep->add_flag("--timing", timing, "Include wall-clock columns (not reproducible)");

  double target = 0.9;
  std::uint64_t guard = kTStarGuard;
  auto* findt = app.add_subcommand("findt", "Doubling search for the trace count reaching a success rate");
  findt->add_option("--n", n)->required();
  findt->add_option("--d", d)->required();
  findt->add_option("--q", q)->required();
  findt->add_option("--target", target);
  findt->add_option("--trials", trials);
  findt->add_option("--cap", cap);
  findt->add_option("--guard", guard);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitPrecondition;
  }

  try {
    if (gen->parsed()) {
      const Geometry geo(n, d);
      const Spider x = bits.empty() ? random_spider(geo, g.seed) : Spider::from_bitstring(geo, bits);
      emit(g, to_json(x) + "\n");
    } else if (channel->parsed()) {
      const Spider x = spider_from_json(read_file(spider_path));
      (void)SpiderShape(x.geometry(), q);
      std::string text;
      for (const auto& t : sample_traces(x, q, g.seed, count)) text += t.bitstring() + "\n";
      emit(g, text);
    } else if (expect->parsed()) {
      const Spider x = spider_from_json(read_file(spider_path));
      const auto e = expected_labels(x, q);
      std::string text;
      for (int i = 0; i < x.geometry().legs(); ++i) {
        for (int j = 0; j < x.geometry().d(); ++j) text += (j ? "," : "") + fmt17(e.at(i, j));
        text += "\n";
      }
      emit(g, text);
    } else if (littlewood->parsed()) {
      const LittlewoodPoly f = littlewood_from_json(read_file(coeffs_path));
      const ArcPoint p = find_arc_point(f, L1, L2, grid);
      const json j = {{"theta1", p.theta1}, {"theta2", p.theta2}, {"modulus", p.modulus},
                      {"bound", lemma_bound(f, L1, L2)}, {"L1", L1}, {"L2", L2},
                      {"degree1", f.degree1()}, {"degree2", f.degree2()}, {"grid", grid}};
      emit(g, j.dump(2) + "\n");
    } else if (recon->parsed()) {
      const SpiderShape shape(n, d, q);
      const TraceSample sample = TraceSample::from_traces(read_traces(traces_path, shape.geometry));
      ReconstructOptions opt;
      opt.cap = cap;
      const TournamentOutcome r = reconstruct(sample, shape, g.seed, opt);
      json j;
      j["spider"] = json::parse(to_json(r.winner));
      j["diagnostics"] = {{"T", sample.size()},
                          {"undefeated", r.result.undefeated},
                          {"min_observed_gap", r.result.min_gap},
                          {"comparisons", r.result.comparisons},
                          {"loss_counts", r.result.losses}};
      emit(g, j.dump(2) + "\n");
    } else if (mingap->parsed()) {
      const SpiderShape shape(n, d, q);
      const MinGapResult r = min_gap(shape, gap_cap);
      const json j = {{"n", n}, {"d", d}, {"q", q}, {"min_gap", r.gap}, {"witness", legs_json(r.witness)}};
      emit(g, j.dump(2) + "\n");
    } else if (complexity->parsed()) {
      const SpiderShape shape(n, d, q);
      std::optional<double> g_opt;
      if (gap_opt->count() > 0) g_opt = gap;
      const ComplexityEstimate e = sample_complexity(shape, C, g_opt);
      json j = {{"n", n}, {"d", d}, {"q", q}, {"C", C}, {"L", e.L},
                {"eta_terms", {{"leg_term", e.leg_term}, {"depth_term", e.depth_term}, {"log_term", e.log_term}}},
                {"exponent", e.exponent}, {"T_theory", e.T_theory}, {"regime_ok", e.regime_ok}};
      if (e.T_exact) j["T_exact"] = *e.T_exact;
      emit(g, j.dump(2) + "\n");
    } else if (sweep->parsed()) {
      ExperimentConfig cfg{SpiderShape(n, d, q), trials, trace_counts, g.seed, "", cap, std::nullopt};
      validate(cfg);
      // Fail on an unwritable destination before spending time on trials.
      if (!g.out.empty() && !std::ofstream(g.out, std::ios::binary | std::ios::trunc)) fail("cannot write " + g.out);
      const ExperimentRecord rec = run_sweep(cfg);
      emit(g, g.format == "csv" ? sweep_csv(rec, timing) : sweep_json(rec, timing) + "\n");
    } else if (findt->parsed()) {
      const TStarResult r = find_t_star(SpiderShape(n, d, q), target, trials, g.seed, cap, guard);
      json levels = json::array();
      for (const auto& s : r.levels)
        levels.push_back({{"T", s.T}, {"rate", s.rate}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high}});
      const json j = {{"n", n}, {"d", d}, {"q", q}, {"target", target}, {"T_star", r.T_star}, {"levels", levels}};
      emit(g, j.dump(2) + "\n");
    }
  } catch (const SpiderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::CapExceeded ? kExitCap : kExitPrecondition;
  }
  return 0;
}
