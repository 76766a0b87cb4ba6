#include "spidertr/reconstruction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "omp_compat.hpp"
#include "spidertr/errors.hpp"
#include "spidertr/rng.hpp"

namespace spidertr {

TraceSample TraceSample::from_traces(std::vector<Trace> traces) {
  if (traces.empty()) fail("trace sample is empty");
  const Geometry g = traces.front().geometry();
  std::vector<std::uint64_t> sums(g.n(), 0);
  for (const auto& t : traces) {
    if (!(t.geometry() == g)) fail("trace sample mixes spider shapes");
    for (int i = 0; i < g.legs(); ++i)
      for (int j = 0; j < g.d(); ++j) sums[g.flat(i, j)] += t.label(i, j);
  }
  const auto count = static_cast<std::uint64_t>(traces.size());
  std::vector<double> mean(g.n());
  for (int p = 0; p < g.n(); ++p) mean[p] = static_cast<double>(sums[p]) / static_cast<double>(count);
  return TraceSample(g, std::move(mean), count, std::move(traces));
}

TraceSample TraceSample::from_counts(Geometry g, const std::vector<std::uint64_t>& sums,
                                     std::uint64_t count) {
  if (count == 0) fail("trace sample is empty");
  if (static_cast<int>(sums.size()) != g.n()) fail("label sums do not match the shape");
  std::vector<double> mean(g.n());
  for (int p = 0; p < g.n(); ++p) {
    if (sums[p] > count) fail("label sum exceeds the trace count");
    mean[p] = static_cast<double>(sums[p]) / static_cast<double>(count);
  }
  return TraceSample(g, std::move(mean), count, {});
}

TraceSample TraceSample::from_means(Geometry g, std::vector<double> means, std::uint64_t count) {
  if (count == 0) fail("trace sample is empty");
  if (static_cast<int>(means.size()) != g.n()) fail("means do not match the shape");
  return TraceSample(g, std::move(means), count, {});
}

namespace {

struct Comparison {
  bool first_wins;
  double gap;
};

// Values within kTieTol of each other count as tied, so the outcome does not
// depend on how an expected matrix was summed. Ties go to the smaller (I, J).
inline int argmax_abs_diff(std::span<const double> a, std::span<const double> b, double& gap) {
  gap = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) gap = std::max(gap, std::abs(a[p] - b[p]));
  for (std::size_t p = 0; p < a.size(); ++p)
    if (std::abs(a[p] - b[p]) >= gap - kTieTol) return static_cast<int>(p);
  return 0;
}

inline Comparison compare(std::span<const double> a, std::span<const double> b,
                          std::span<const double> means) {
  double gap;
  const int p = argmax_abs_diff(a, b, gap);
  const double m = means[p];
  return {std::abs(m - a[p]) <= std::abs(m - b[p]) + kTieTol, gap};
}

}  // namespace

bool first_wins(std::span<const double> a, std::span<const double> b, std::span<const double> means) {
  return compare(a, b, means).first_wins;
}

DistinguishingStat distinguishing_index(const ExpectedLabelMatrix& e1, const ExpectedLabelMatrix& e2) {
  if (!(e1.geometry() == e2.geometry())) fail("expected matrices have different shapes");
  double gap;
  const int p = argmax_abs_diff(e1.values(), e2.values(), gap);
  const int d = e1.geometry().d();
  return {p / d, p % d, gap, e1.values()[p], e2.values()[p]};
}

DistinguishingStat distinguishing_index(const Spider& x1, const Spider& x2, double q) {
  if (!(x1.geometry() == x2.geometry())) fail("spiders have different shapes");
  if (x1 == x2) fail("distinguishing index of identical spiders is undefined");
  return distinguishing_index(expected_labels(x1, q), expected_labels(x2, q));
}

const Spider& better_match(const Spider& x1, const Spider& x2, const TraceSample& sample, double q) {
  if (!(sample.geometry() == x1.geometry())) fail("trace sample shape differs from the candidates");
  if (x1 == x2) fail("distinguishing index of identical spiders is undefined");
  return first_wins(expected_labels(x1, q).values(), expected_labels(x2, q).values(), sample.means()) ? x1 : x2;
}

namespace {

std::uint64_t flat_mask(const Spider& x) {
  const Geometry& g = x.geometry();
  std::uint64_t m = 0;
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j)
      if (x.label(i, j)) m |= std::uint64_t{1} << g.flat(i, j);
  return m;
}

}  // namespace

void CandidateTable::fill_from_masks(const SpiderShape& shape, std::span<const std::uint64_t> masks,
                                     Exec exec) {
  const auto k = kernel(shape);
  const Geometry& g = shape.geometry;
  const int n = g.n();
  std::vector<const double*> slices(n);
  for (int p = 0; p < n; ++p) slices[p] = k->slice(p / g.d(), p % g.d()).data();
  values_.assign(count_ * static_cast<std::size_t>(width_), 0.0);

  auto build_row = [&](std::int64_t r) {
    double* row = values_.data() + r * width_;
    std::uint64_t m = masks[r];
    while (m) {
      const int p = std::countr_zero(m);
      const double* s = slices[p];
      for (int t = 0; t < n; ++t) row[t] += s[t];
      m &= m - 1;
    }
  };
  const auto rows = static_cast<std::int64_t>(count_);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) build_row(r);
  } else {
    for (std::int64_t r = 0; r < rows; ++r) build_row(r);
  }
}

CandidateTable::CandidateTable(const SpiderShape& shape, std::span<const Spider> candidates, Exec exec)
    : width_(shape.n()), count_(candidates.size()) {
  if (shape.n() > 64) fail("candidate tables need n <= 64");
  std::vector<std::uint64_t> masks;
  masks.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!(c.geometry() == shape.geometry)) fail("candidate shape differs from the tournament shape");
    masks.push_back(flat_mask(c));
  }
  fill_from_masks(shape, masks, exec);
}

CandidateTable CandidateTable::all(const SpiderShape& shape, int cap, Exec exec) {
  const CandidateRange range = enumerate_candidates(shape.geometry, cap);
  CandidateTable t(shape.n(), range.size());
  const int n = shape.n();
  std::vector<std::uint64_t> masks(range.size());
  // Candidate k holds flat position p at bit n-1-p of k.
  for (std::uint64_t k = 0; k < range.size(); ++k) {
    std::uint64_t m = 0;
    for (int p = 0; p < n; ++p)
      if ((k >> (n - 1 - p)) & 1U) m |= std::uint64_t{1} << p;
    masks[k] = m;
  }
  t.fill_from_masks(shape, masks, exec);
  return t;
}

TournamentResult run_tournament(const CandidateTable& table, const TraceSample& sample,
                                std::uint64_t seed, const TournamentOptions& opt) {
  const std::size_t N = table.size();
  if (N == 0) fail("tournament needs at least one candidate");
  if (static_cast<int>(sample.means().size()) != table.width()) {
    fail("trace sample shape differs from the candidates");
  }
  const std::span<const double> means = sample.means();
  const bool par = opt.exec == Exec::Parallel && !omp_in_parallel();
  const auto n_signed = static_cast<std::int64_t>(N);

  TournamentResult res{0, false, {}, std::numeric_limits<double>::infinity(), 0};

  // Comparison of candidates i and j in canonical order; true when i loses.
  auto loses = [&](std::size_t i, std::size_t j, double& gap) {
    if (i < j) {
      const Comparison c = compare(table.row(i), table.row(j), means);
      gap = c.gap;
      return !c.first_wins;
    }
    const Comparison c = compare(table.row(j), table.row(i), means);
    gap = c.gap;
    return c.first_wins;
  };

  std::size_t undefeated = N;
  if (opt.mode == TournamentMode::AllPairs) {
    res.losses.assign(N, 0);
    std::vector<double> row_gap(N, std::numeric_limits<double>::infinity());
    auto row_kernel = [&](std::int64_t si) {
      const auto i = static_cast<std::size_t>(si);
      std::uint64_t l = 0;
      double mg = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < N; ++j) {
        if (j == i) continue;
        double gap;
        if (loses(i, j, gap)) ++l;
        mg = std::min(mg, gap);
      }
      res.losses[i] = l;
      row_gap[i] = mg;
    };
    if (par) {
#pragma omp parallel for schedule(dynamic, 16)
      for (std::int64_t i = 0; i < n_signed; ++i) row_kernel(i);
    } else {
      for (std::int64_t i = 0; i < n_signed; ++i) row_kernel(i);
    }
    for (std::size_t i = 0; i < N; ++i) {
      res.min_gap = std::min(res.min_gap, row_gap[i]);
      if (res.losses[i] == 0 && undefeated == N) undefeated = i;
    }
    res.comparisons = N * (N - 1) / 2;
  } else {
    // Any undefeated candidate survives the elimination pass, so only the
    // survivor needs to be verified.
    std::size_t champ = 0;
    double mg = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < N; ++k) {
      double gap;
      if (loses(champ, k, gap)) champ = k;
      mg = std::min(mg, gap);
    }
    std::uint64_t champ_losses = 0;
    double vg = std::numeric_limits<double>::infinity();
    if (par) {
#pragma omp parallel for reduction(+ : champ_losses) reduction(min : vg) schedule(static)
      for (std::int64_t j = 0; j < n_signed; ++j) {
        if (static_cast<std::size_t>(j) == champ) continue;
        double gap;
        if (loses(champ, static_cast<std::size_t>(j), gap)) ++champ_losses;
        vg = std::min(vg, gap);
      }
    } else {
      for (std::size_t j = 0; j < N; ++j) {
        if (j == champ) continue;
        double gap;
        if (loses(champ, j, gap)) ++champ_losses;
        vg = std::min(vg, gap);
      }
    }
    res.min_gap = std::min(mg, vg);
    res.comparisons = 2 * (N - 1);
    if (champ_losses == 0) undefeated = champ;
  }

  if (undefeated < N) {
    res.winner = undefeated;
    res.undefeated = true;
  } else {
    Rng rng(seed);
    res.winner = static_cast<std::size_t>(rng.below(N));
    res.undefeated = false;
  }
  if (N == 1) res.min_gap = 0.0;
  return res;
}

TournamentOutcome tournament(std::span<const Spider> candidates, const TraceSample& sample, double q,
                             std::uint64_t seed, const TournamentOptions& opt) {
  if (candidates.empty()) fail("tournament needs at least one candidate");
  const SpiderShape shape(candidates.front().geometry(), q);
  if (!(sample.geometry() == shape.geometry)) fail("trace sample shape differs from the candidates");
  const CandidateTable table(shape, candidates, opt.exec);
  TournamentResult r = run_tournament(table, sample, seed, opt);
  return {candidates[r.winner], std::move(r)};
}

TournamentOutcome reconstruct(const TraceSample& sample, const SpiderShape& shape, std::uint64_t seed,
                              const ReconstructOptions& opt) {
  if (!(sample.geometry() == shape.geometry)) fail("trace sample shape differs from the requested shape");
  const CandidateTable table = CandidateTable::all(shape, opt.cap, opt.exec);
  TournamentResult r = run_tournament(table, sample, seed, {opt.mode, opt.exec});
  return {Spider::from_index(shape.geometry, r.winner), std::move(r)};
}

namespace {

struct GapTask {
  int lead;         // first nonzero flat position, fixed at +1
  int prefix_len;   // trits enumerated explicitly after lead
  int prefix_code;  // base-3 digits, 0 -> -1, 1 -> 0, 2 -> +1
};

struct GapBest {
  double gap = std::numeric_limits<double>::infinity();
  std::vector<int> trits;
};

// Reflected base-3 Gray enumeration of the trailing free trits; each step
// moves one trit by one, so the expected matrix is updated by one slice.
GapBest run_gap_task(const GapTask& task, int n, const std::vector<const double*>& slices) {
  std::vector<int> trit(n, 0);
  std::vector<double> e(n, 0.0);
  auto add = [&](int p, double s) {
    const double* sl = slices[p];
    for (int t = 0; t < n; ++t) e[t] += s * sl[t];
  };
  trit[task.lead] = 1;
  add(task.lead, 1.0);
  int code = task.prefix_code;
  for (int k = 0; k < task.prefix_len; ++k) {
    const int p = task.lead + 1 + k;
    trit[p] = code % 3 - 1;
    code /= 3;
    if (trit[p]) add(p, trit[p]);
  }
  const int first_free = task.lead + 1 + task.prefix_len;
  for (int p = first_free; p < n; ++p) {
    trit[p] = -1;
    add(p, -1.0);
  }
  std::vector<int> dir(n, 1);

  GapBest best;
  auto score = [&] {
    double mx = 0.0;
    for (int t = 0; t < n; ++t) mx = std::max(mx, std::abs(e[t]));
    if (mx < best.gap) {
      best.gap = mx;
      best.trits = trit;
    }
  };
  score();
  for (;;) {
    int p = n - 1;
    while (p >= first_free && (trit[p] + dir[p] < -1 || trit[p] + dir[p] > 1)) {
      dir[p] = -dir[p];
      --p;
    }
    if (p < first_free) break;
    trit[p] += dir[p];
    add(p, static_cast<double>(dir[p]));
    score();
  }
  return best;
}

}  // namespace

MinGapResult min_gap(const SpiderShape& shape, int cap, Exec exec) {
  const Geometry& g = shape.geometry;
  const int n = g.n();
  if (n > cap || n > 40) {
    fail_cap("min_gap enumerates 3^n label differences; n=" + std::to_string(n) +
             " exceeds the cap of " + std::to_string(cap));
  }
  const auto k = kernel(shape);
  std::vector<const double*> slices(n);
  for (int p = 0; p < n; ++p) slices[p] = k->slice(p / g.d(), p % g.d()).data();

  std::vector<GapTask> tasks;
  for (int lead = 0; lead < n; ++lead) {
    const int len = std::min(n - 1 - lead, 5);
    int combos = 1;
    for (int t = 0; t < len; ++t) combos *= 3;
    for (int c = 0; c < combos; ++c) tasks.push_back({lead, len, c});
  }
  std::vector<GapBest> results(tasks.size());
  const auto nt = static_cast<std::int64_t>(tasks.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < nt; ++t) results[t] = run_gap_task(tasks[t], n, slices);
  } else {
    for (std::int64_t t = 0; t < nt; ++t) results[t] = run_gap_task(tasks[t], n, slices);
  }
  std::size_t arg = 0;
  for (std::size_t t = 1; t < results.size(); ++t)
    if (results[t].gap < results[arg].gap) arg = t;
  return {results[arg].gap, LabelDiff(g, results[arg].trits)};
}

double eta_floor(const SpiderShape& shape, double L, double C, double C_prime) {
  const double n = shape.n();
  const double d = shape.d();
  const double qd = ipow(shape.q, shape.d());
  const double expo = -(n / d) * C * qd / (L * L * (1.0 - qd)) - C_prime * d - L * std::log(n);
  return (1.0 - shape.q) / n * std::exp(expo);
}

std::uint64_t chernoff_trace_count(int n, double gap) {
  if (!(gap > 0.0)) fail("trace count needs a positive gap");
  const double t = 2.0 * (n * std::log(2.0) + std::log(static_cast<double>(n))) / (gap * gap);
  return static_cast<std::uint64_t>(std::ceil(t));
}

ComplexityEstimate sample_complexity(const SpiderShape& shape, double C_user, std::optional<double> gap) {
  if (!(C_user > 0.0)) fail("constant C must be positive");
  const double n = shape.n();
  const double d = shape.d();
  const double qd = ipow(shape.q, shape.d());
  const double logn = std::log(n);
  ComplexityEstimate est{};
  est.L = std::cbrt(n * qd / (d * logn));
  est.leg_term = (n / d) * qd / (est.L * est.L * (1.0 - qd));
  est.depth_term = d;
  est.log_term = est.L * logn;
  est.exponent = C_user * std::cbrt(n * qd) / std::cbrt(d) * std::pow(logn, 2.0 / 3.0);
  est.T_theory = std::exp(est.exponent);
  est.regime_ok = shape.in_regime();
  if (gap) est.T_exact = chernoff_trace_count(shape.n(), *gap);
  return est;
}

}  // namespace spidertr
