#include "spidertr/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spidertr/errors.hpp"
#include "spidertr/rng.hpp"

namespace spidertr::reference {

ExpectedLabelMatrix expected_labels(const Spider& x, double q) {
  const Geometry& g = x.geometry();
  const auto k = kernel(SpiderShape(g, q));
  std::vector<double> e(g.n(), 0.0);
  for (int ip = 0; ip < g.legs(); ++ip)
    for (int jp = 0; jp < g.d(); ++jp) {
      double s = 0.0;
      for (int i = ip; i < g.legs(); ++i)
        for (int j = jp; j < g.d(); ++j) s += x.label(i, j) * k->weight(i, j, ip, jp);
      e[g.flat(ip, jp)] = s;
    }
  return ExpectedLabelMatrix(g, std::move(e));
}

OutcomeDistribution enumerate_outcomes(const Spider& x, double q) {
  const Geometry& g = x.geometry();
  if (g.n() > kOutcomeEnumerationCap) fail_cap("outcome enumeration cap exceeded");
  std::map<std::string, double> merged;
  const std::uint64_t total = std::uint64_t{1} << g.n();
  for (std::uint64_t m = 0; m < total; ++m) {
    std::vector<std::uint64_t> kept(g.legs(), 0);
    int kept_count = 0;
    for (int p = 0; p < g.n(); ++p) {
      if ((m >> p) & 1U) {
        kept[p / g.d()] |= std::uint64_t{1} << (p % g.d());
        ++kept_count;
      }
    }
    const double w = std::pow(1.0 - q, kept_count) * std::pow(q, g.n() - kept_count);
    merged[apply_mask(x, DeletionMask(g, kept)).bitstring()] += w;
  }
  OutcomeDistribution dist;
  for (const auto& [bits, p] : merged) dist.push_back({Trace::from_bitstring(g, bits), p});
  return dist;
}

TournamentReference tournament(std::span<const Spider> candidates, const TraceSample& sample, double q,
                               std::uint64_t seed) {
  const std::size_t N = candidates.size();
  if (N == 0) fail("tournament needs at least one candidate");
  TournamentReference r{0, false, std::vector<std::uint64_t>(N, 0)};
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      const Spider& w = better_match(candidates[a], candidates[b], sample, q);
      ++r.losses[&w == &candidates[a] ? b : a];
    }
  for (std::size_t a = 0; a < N; ++a) {
    if (r.losses[a] == 0) {
      r.winner = a;
      r.undefeated = true;
      return r;
    }
  }
  Rng rng(seed);
  r.winner = static_cast<std::size_t>(rng.below(N));
  return r;
}

double min_gap(const SpiderShape& shape) {
  const Geometry& g = shape.geometry;
  const int n = g.n();
  std::uint64_t total = 1;
  for (int p = 0; p < n; ++p) total *= 3;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> v(n);
  for (std::uint64_t code = 1; code < total; ++code) {
    std::uint64_t c = code;
    for (int p = 0; p < n; ++p) {
      v[p] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    const LabelDiff delta(g, v);
    if (delta.is_zero()) continue;
    const auto e = spidertr::expected_labels(delta, shape.q);
    double mx = 0.0;
    for (double x : e.values()) mx = std::max(mx, std::abs(x));
    best = std::min(best, mx);
  }
  return best;
}

}  // namespace spidertr::reference
