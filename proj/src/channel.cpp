#include "spidertr/channel.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>

#include "omp_compat.hpp"
#include "spidertr/errors.hpp"
#include "spidertr/rng.hpp"

namespace spidertr {

DeletionMask::DeletionMask(Geometry g, std::vector<std::uint64_t> kept)
    : geo_(g), kept_(std::move(kept)) {
  if (static_cast<int>(kept_.size()) != g.legs()) fail("deletion mask has the wrong number of legs");
  if (g.d() < 64) {
    const std::uint64_t lim = (std::uint64_t{1} << g.d()) - 1;
    for (auto w : kept_)
      if (w & ~lim) fail("deletion mask has bits beyond depth d");
  }
}

DeletionMask DeletionMask::keep_all(Geometry g) {
  const std::uint64_t full = g.d() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.d()) - 1;
  return DeletionMask(g, std::vector<std::uint64_t>(g.legs(), full));
}

DeletionMask DeletionMask::delete_all(Geometry g) {
  return DeletionMask(g, std::vector<std::uint64_t>(g.legs(), 0));
}

int DeletionMask::kept_count() const {
  int c = 0;
  for (auto w : kept_) c += std::popcount(w);
  return c;
}

namespace {

// Survivors of one leg compacted toward depth 0; returns the survivor count.
inline int compact_leg(std::uint64_t labels, std::uint64_t kept, std::uint64_t& out) {
  out = 0;
  int pos = 0;
  while (kept) {
    const int j = std::countr_zero(kept);
    out |= ((labels >> j) & 1U) << pos;
    ++pos;
    kept &= kept - 1;
  }
  return pos;
}

inline void apply_words(const Spider& x, const std::uint64_t* kept, std::vector<std::uint64_t>& out) {
  const int legs = x.geometry().legs();
  int next = 0;
  for (int i = 0; i < legs; ++i) {
    std::uint64_t leg;
    if (compact_leg(x.leg_word(i), kept[i], leg) > 0) out[next++] = leg;
  }
  for (; next < legs; ++next) out[next] = 0;
}

}  // namespace

Trace apply_mask(const Spider& x, const DeletionMask& m) {
  if (!(x.geometry() == m.geometry())) fail("mask and spider shapes differ");
  const int legs = x.geometry().legs();
  std::vector<std::uint64_t> kept(legs), out(legs);
  for (int i = 0; i < legs; ++i) kept[i] = m.leg_word(i);
  apply_words(x, kept.data(), out);
  return Trace(x.geometry(), std::move(out));
}

namespace {

template <class Sink>
void sample_stream(const Spider& x, double q, std::uint64_t seed, std::size_t count, Sink&& sink) {
  const Geometry& g = x.geometry();
  Rng rng(seed);
  std::vector<std::uint64_t> kept(g.legs()), out(g.legs());
  for (std::size_t t = 0; t < count; ++t) {
    for (int i = 0; i < g.legs(); ++i) {
      std::uint64_t w = 0;
      for (int j = 0; j < g.d(); ++j)
        if (!(rng.uniform01() < q)) w |= std::uint64_t{1} << j;
      kept[i] = w;
    }
    apply_words(x, kept.data(), out);
    sink(out);
  }
}

}  // namespace

std::vector<Trace> sample_traces(const Spider& x, double q, std::uint64_t seed, std::size_t count) {
  std::vector<Trace> traces;
  traces.reserve(count);
  sample_stream(x, q, seed, count, [&](const std::vector<std::uint64_t>& words) {
    traces.emplace_back(x.geometry(), words);
  });
  return traces;
}

Trace sample_trace(const Spider& x, double q, std::uint64_t seed) {
  return std::move(sample_traces(x, q, seed, 1).front());
}

std::vector<std::uint64_t> sample_label_counts(const Spider& x, double q, std::uint64_t seed,
                                               std::size_t count) {
  const Geometry& g = x.geometry();
  std::vector<std::uint64_t> counts(g.n(), 0);
  sample_stream(x, q, seed, count, [&](const std::vector<std::uint64_t>& words) {
    for (int i = 0; i < g.legs(); ++i) {
      std::uint64_t w = words[i];
      while (w) {
        const int j = std::countr_zero(w);
        ++counts[g.flat(i, j)];
        w &= w - 1;
      }
    }
  });
  return counts;
}

namespace {

void check_outcome_cap(const Geometry& g) {
  if (g.n() > kOutcomeEnumerationCap) {
    fail_cap("exhaustive outcome enumeration needs n <= " + std::to_string(kOutcomeEnumerationCap) +
             " (got n=" + std::to_string(g.n()) + ")");
  }
}

// Mask number m keeps flat node p iff bit p of m is set.
inline void mask_words(const Geometry& g, std::uint64_t m, std::vector<std::uint64_t>& kept) {
  const std::uint64_t leg_mask = (std::uint64_t{1} << g.d()) - 1;
  for (int i = 0; i < g.legs(); ++i) kept[i] = (m >> (i * g.d())) & leg_mask;
}

// Same value as Trace::index() without materializing the trace.
inline std::uint64_t words_index(const Geometry& g, const std::vector<std::uint64_t>& words) {
  std::uint64_t k = 0;
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j) k = (k << 1) | ((words[i] >> j) & 1U);
  return k;
}

}  // namespace

OutcomeDistribution enumerate_outcomes(const Spider& x, double q) {
  const Geometry& g = x.geometry();
  check_outcome_cap(g);
  const int n = g.n();
  const std::uint64_t total = std::uint64_t{1} << n;

  std::vector<double> weight(n + 1);
  for (int k = 0; k <= n; ++k) weight[k] = std::pow(1.0 - q, k) * std::pow(q, n - k);

  // Fixed chunking (independent of thread count) so the floating-point
  // summation order, and therefore the result, is reproducible.
  constexpr std::int64_t kChunks = 64;
  std::vector<std::unordered_map<std::uint64_t, double>> partial(kChunks);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < kChunks; ++c) {
    std::vector<std::uint64_t> kept(g.legs()), out(g.legs());
    const std::uint64_t lo = total * c / kChunks;
    const std::uint64_t hi = total * (c + 1) / kChunks;
    auto& acc = partial[c];
    for (std::uint64_t m = lo; m < hi; ++m) {
      mask_words(g, m, kept);
      apply_words(x, kept.data(), out);
      acc[words_index(g, out)] += weight[std::popcount(m)];
    }
  }

  std::map<std::uint64_t, double> merged;
  for (const auto& acc : partial) {
    // Sort each chunk's keys so merging does not depend on hash iteration order.
    std::map<std::uint64_t, double> ordered(acc.begin(), acc.end());
    for (const auto& [k, p] : ordered) merged[k] += p;
  }
  OutcomeDistribution dist;
  dist.reserve(merged.size());
  for (const auto& [k, p] : merged) dist.push_back({Trace::from_index(g, k), p});
  return dist;
}

std::vector<ExactOutcome> enumerate_outcomes_exact(const Spider& x, std::int64_t q_num,
                                                   std::int64_t q_den) {
  const Geometry& g = x.geometry();
  check_outcome_cap(g);
  if (q_den <= 0 || q_num <= 0 || q_num >= q_den) fail("exact mode needs 0 < q_num < q_den");
  const int n = g.n();
  const Rational q(q_num, q_den);
  const Rational keep = Rational(1) - q;
  std::vector<Rational> weight(n + 1);
  for (int k = 0; k <= n; ++k) {
    Rational w = 1;
    for (int t = 0; t < k; ++t) w *= keep;
    for (int t = k; t < n; ++t) w *= q;
    weight[k] = w;
  }
  std::map<std::uint64_t, Rational> merged;
  std::vector<std::uint64_t> kept(g.legs()), out(g.legs());
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < total; ++m) {
    mask_words(g, m, kept);
    apply_words(x, kept.data(), out);
    merged[words_index(g, out)] += weight[std::popcount(m)];
  }
  std::vector<ExactOutcome> dist;
  dist.reserve(merged.size());
  for (auto& [k, p] : merged) dist.push_back({Trace::from_index(g, k), p});
  return dist;
}

std::vector<double> outcome_mean(const OutcomeDistribution& dist) {
  if (dist.empty()) return {};
  const Geometry& g = dist.front().trace.geometry();
  std::vector<double> mean(g.n(), 0.0);
  for (const auto& o : dist)
    for (int i = 0; i < g.legs(); ++i)
      for (int j = 0; j < g.d(); ++j)
        if (o.trace.label(i, j)) mean[g.flat(i, j)] += o.probability;
  return mean;
}

std::vector<Rational> outcome_mean(const std::vector<ExactOutcome>& dist) {
  if (dist.empty()) return {};
  const Geometry& g = dist.front().trace.geometry();
  std::vector<Rational> mean(g.n(), Rational(0));
  for (const auto& o : dist)
    for (int i = 0; i < g.legs(); ++i)
      for (int j = 0; j < g.d(); ++j)
        if (o.trace.label(i, j)) mean[g.flat(i, j)] += o.probability;
  return mean;
}

}  // namespace spidertr
