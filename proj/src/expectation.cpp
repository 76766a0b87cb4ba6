#include "spidertr/expectation.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace spidertr {

double ipow(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

namespace {

// Row r of the binomial pmf table with success probability p, built by the
// Pascal recurrence so no factorials are formed.
std::vector<double> binomial_table(int rows, double p) {
  std::vector<double> t(static_cast<std::size_t>(rows) * rows, 0.0);
  if (rows == 0) return t;
  t[0] = 1.0;
  for (int r = 1; r < rows; ++r) {
    for (int k = 0; k <= r; ++k) {
      const double stay = k <= r - 1 ? t[(r - 1) * rows + k] * (1.0 - p) : 0.0;
      const double step = k >= 1 ? t[(r - 1) * rows + k - 1] * p : 0.0;
      t[r * rows + k] = stay + step;
    }
  }
  return t;
}

}  // namespace

TransitionKernel::TransitionKernel(const SpiderShape& shape)
    : shape_(shape), legs_(shape.legs()), d_(shape.d()) {
  const double q = shape.q;
  const double leg_survives = 1.0 - ipow(q, d_);  // underflow of q^d to 0 is fine
  leg_ = binomial_table(legs_, leg_survives);
  depth_ = binomial_table(d_, 1.0 - q);

  const Geometry& g = shape.geometry;
  slices_.assign(g.n(), std::vector<double>(g.n(), 0.0));
  for (int i = 0; i < legs_; ++i)
    for (int j = 0; j < d_; ++j) {
      auto& s = slices_[g.flat(i, j)];
      for (int ip = 0; ip <= i; ++ip)
        for (int jp = 0; jp <= j; ++jp) s[g.flat(ip, jp)] = weight(i, j, ip, jp);
    }
}

std::shared_ptr<const TransitionKernel> kernel(const SpiderShape& shape) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::uint64_t>, std::shared_ptr<const TransitionKernel>> cache;
  const auto key = std::make_tuple(shape.n(), shape.d(), std::bit_cast<std::uint64_t>(shape.q));
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = std::make_shared<const TransitionKernel>(shape);
  cache.emplace(key, k);
  return k;
}

std::complex<double> ExpectedLabelMatrix::series(std::complex<double> w1,
                                                 std::complex<double> w2) const {
  std::complex<double> outer = 0.0;
  for (int ip = geo_.legs() - 1; ip >= 0; --ip) {
    std::complex<double> inner = 0.0;
    for (int jp = geo_.d() - 1; jp >= 0; --jp) inner = inner * w2 + at(ip, jp);
    outer = outer * w1 + inner;
  }
  return outer;
}

namespace {

template <class Label>
ExpectedLabelMatrix expected_from(const Geometry& g, double q, Label&& label) {
  const auto k = kernel(SpiderShape(g, q));
  const int legs = g.legs();
  const int d = g.d();
  // tmp[i][jp] = sum_j a[i][j] * depth(j -> jp)
  std::vector<double> tmp(g.n(), 0.0);
  for (int i = 0; i < legs; ++i)
    for (int j = 0; j < d; ++j) {
      const int a = label(i, j);
      if (a == 0) continue;
      for (int jp = 0; jp <= j; ++jp) tmp[g.flat(i, jp)] += a * k->depth_factor(j, jp);
    }
  std::vector<double> e(g.n(), 0.0);
  for (int ip = 0; ip < legs; ++ip)
    for (int jp = 0; jp < d; ++jp) {
      double s = 0.0;
      for (int i = ip; i < legs; ++i) s += k->leg_factor(i, ip) * tmp[g.flat(i, jp)];
      e[g.flat(ip, jp)] = (1.0 - q) * s;
    }
  return ExpectedLabelMatrix(g, std::move(e));
}

template <class Label>
std::complex<double> closed_form(const Geometry& g, double q, std::complex<double> w1,
                                 std::complex<double> w2, Label&& label) {
  const double qd = ipow(q, g.d());
  const std::complex<double> z1 = qd + (1.0 - qd) * w1;
  const std::complex<double> z2 = q + (1.0 - q) * w2;
  std::complex<double> outer = 0.0;
  for (int i = g.legs() - 1; i >= 0; --i) {
    std::complex<double> inner = 0.0;
    for (int j = g.d() - 1; j >= 0; --j) inner = inner * z2 + static_cast<double>(label(i, j));
    outer = outer * z1 + inner;
  }
  return (1.0 - q) * outer;
}

}  // namespace

ExpectedLabelMatrix expected_labels(const Spider& x, double q) {
  return expected_from(x.geometry(), q, [&](int i, int j) { return x.label(i, j); });
}

ExpectedLabelMatrix expected_labels(const LabelDiff& delta, double q) {
  return expected_from(delta.geometry(), q, [&](int i, int j) { return delta.value(i, j); });
}

std::complex<double> genfunc_eval(const Spider& x, double q, std::complex<double> w1,
                                  std::complex<double> w2) {
  (void)SpiderShape(x.geometry(), q);  // validates q
  return closed_form(x.geometry(), q, w1, w2, [&](int i, int j) { return x.label(i, j); });
}

std::complex<double> genfunc_eval(const LabelDiff& delta, double q, std::complex<double> w1,
                                  std::complex<double> w2) {
  (void)SpiderShape(delta.geometry(), q);
  return closed_form(delta.geometry(), q, w1, w2, [&](int i, int j) { return delta.value(i, j); });
}

}  // namespace spidertr
