#include "spidertr/littlewood.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "omp_compat.hpp"
#include "spidertr/errors.hpp"

namespace spidertr {

LittlewoodPoly::LittlewoodPoly(const std::vector<std::vector<int>>& coeffs) {
  int rows = 0;
  int cols = 0;
  for (int r = 0; r < static_cast<int>(coeffs.size()); ++r) {
    for (int c = 0; c < static_cast<int>(coeffs[r].size()); ++c) {
      const int v = coeffs[r][c];
      if (v < -1 || v > 1) {
        fail("Littlewood coefficient (" + std::to_string(r) + "," + std::to_string(c) +
             ") = " + std::to_string(v) + " is not in {-1, 0, 1}");
      }
      if (v != 0) {
        rows = std::max(rows, r + 1);
        cols = std::max(cols, c + 1);
      }
    }
  }
  if (rows == 0) fail("the zero polynomial is not a valid Littlewood polynomial here");
  rows_ = rows;
  cols_ = cols;
  c_.assign(static_cast<std::size_t>(rows) * cols, 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < std::min<int>(cols, coeffs[r].size()); ++c) c_[r * cols + c] = coeffs[r][c];
}

std::vector<std::vector<int>> LittlewoodPoly::coefficients() const {
  std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out[r][c] = coeff(r, c);
  return out;
}

LittlewoodPoly from_label_diff(const LabelDiff& delta) {
  if (delta.is_zero()) fail("label difference is zero; spiders are identical");
  const Geometry& g = delta.geometry();
  std::vector<std::vector<int>> c(g.legs(), std::vector<int>(g.d()));
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j) c[i][j] = delta.value(i, j);
  return LittlewoodPoly(c);
}

LittlewoodPoly littlewood_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("malformed coefficient document: ") + e.what());
  }
  if (doc.is_object() && doc.contains("coeffs")) doc = doc["coeffs"];
  if (!doc.is_array()) fail("coefficient document must be an array of arrays");
  std::vector<std::vector<int>> c;
  for (const auto& row : doc) {
    if (!row.is_array()) fail("coefficient document must be an array of arrays");
    std::vector<int> r;
    for (const auto& v : row) {
      if (!v.is_number_integer()) fail("coefficients must be integers");
      r.push_back(v.get<int>());
    }
    c.push_back(std::move(r));
  }
  return LittlewoodPoly(c);
}

std::complex<double> eval(const LittlewoodPoly& f, std::complex<double> z1, std::complex<double> z2) {
  std::complex<double> outer = 0.0;
  for (int r = f.degree1(); r >= 0; --r) {
    std::complex<double> inner = 0.0;
    for (int c = f.degree2(); c >= 0; --c) inner = inner * z2 + static_cast<double>(f.coeff(r, c));
    outer = outer * z1 + inner;
  }
  return outer;
}

std::complex<double> rotation_product_eval(const LittlewoodPoly& f, int L1, int L2,
                                           std::complex<double> z1, std::complex<double> z2) {
  if (L1 < 1 || L2 < 1) fail("rotation counts L1, L2 must be >= 1");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::complex<double> prod = 1.0;
  for (int x = 1; x <= L1; ++x)
    for (int y = 1; y <= L2; ++y)
      prod *= eval(f, z1 * std::polar(1.0, kTwoPi * x / L1), z2 * std::polar(1.0, kTwoPi * y / L2));
  return prod;
}

double lemma_bound(const LittlewoodPoly& f, int L1, int L2) {
  const double ab = static_cast<double>(std::max(f.degree1(), 1)) * std::max(f.degree2(), 1);
  const double base = std::max(ab, 2.0);
  return std::pow(base, -(static_cast<double>(L1) * L2 - 1.0));
}

namespace {

struct Axis {
  double half;  // arc is [-half, half]
  int intervals;  // power of two

  double theta(int k, int level_intervals) const {
    return half * (static_cast<double>(2 * k - level_intervals) / level_intervals);
  }
};

int dyadic_intervals(int points) {
  const unsigned need = static_cast<unsigned>(std::max(points - 1, 1));
  return static_cast<int>(std::bit_ceil(need));
}

double modulus_at(const LittlewoodPoly& f, double t1, double t2) {
  return std::abs(eval(f, std::polar(1.0, t1), std::polar(1.0, t2)));
}

// Moduli on the finest lattice, row-major over theta1.
std::vector<double> lattice_moduli(const LittlewoodPoly& f, const Axis& a1, const Axis& a2, Exec exec) {
  const int rows = a1.intervals + 1;
  const int cols = a2.intervals + 1;
  std::vector<double> mod(static_cast<std::size_t>(rows) * cols);
  const int deg1 = f.degree1();
  const int deg2 = f.degree2();

  auto row_kernel = [&](int r) {
    const std::complex<double> z1 = std::polar(1.0, a1.theta(r, a1.intervals));
    // Column polynomial in z2 after substituting z1.
    std::vector<std::complex<double>> g(deg2 + 1, 0.0);
    for (int c = 0; c <= deg2; ++c) {
      std::complex<double> acc = 0.0;
      for (int k = deg1; k >= 0; --k) acc = acc * z1 + static_cast<double>(f.coeff(k, c));
      g[c] = acc;
    }
    for (int c = 0; c < cols; ++c) {
      const std::complex<double> z2 = std::polar(1.0, a2.theta(c, a2.intervals));
      std::complex<double> acc = 0.0;
      for (int k = deg2; k >= 0; --k) acc = acc * z2 + g[k];
      mod[static_cast<std::size_t>(r) * cols + c] = std::abs(acc);
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) row_kernel(r);
  } else {
    for (int r = 0; r < rows; ++r) row_kernel(r);
  }
  return mod;
}

// Golden-section maximization of h on [lo, hi]; returns (argmax, max) over
// all evaluated points including both ends.
template <class H>
std::pair<double, double> golden_max(H&& h, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best_t = lo;
  double best_v = h(lo);
  auto consider = [&](double t, double v) {
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  };
  consider(hi, h(hi));
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = h(c);
  double fd = h(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 48 && b - a > 1e-13; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = h(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = h(d);
      consider(d, fd);
    }
  }
  return {best_t, best_v};
}

ArcPoint refine_point(const LittlewoodPoly& f, ArcPoint p, const Axis& a1, const Axis& a2,
                      double step1, double step2) {
  for (int round = 0; round < 2; ++round) {
    const double lo1 = std::max(-a1.half, p.theta1 - step1);
    const double hi1 = std::min(a1.half, p.theta1 + step1);
    auto [t1, v1] = golden_max([&](double t) { return modulus_at(f, t, p.theta2); }, lo1, hi1);
    if (v1 > p.modulus) p = {t1, p.theta2, v1};
    const double lo2 = std::max(-a2.half, p.theta2 - step2);
    const double hi2 = std::min(a2.half, p.theta2 + step2);
    auto [t2, v2] = golden_max([&](double t) { return modulus_at(f, p.theta1, t); }, lo2, hi2);
    if (v2 > p.modulus) p = {p.theta1, t2, v2};
  }
  return p;
}

}  // namespace

ArcPoint find_arc_point(const LittlewoodPoly& f, const ArcSearchOptions& opt) {
  if (opt.L1 < 1 || opt.L2 < 1) fail("arc parameters L1, L2 must be >= 1");
  if (opt.grid != 0 && opt.grid < 2) fail("grid must be >= 2 points per axis");
  const int g1 = opt.grid ? opt.grid : 64 * opt.L1;
  const int g2 = opt.grid ? opt.grid : 64 * opt.L2;
  const Axis a1{std::numbers::pi / opt.L1, dyadic_intervals(g1)};
  const Axis a2{std::numbers::pi / opt.L2, dyadic_intervals(g2)};
  const int cols = a2.intervals + 1;

  const std::vector<double> mod = lattice_moduli(f, a1, a2, opt.exec);

  ArcPoint best{0.0, 0.0, -1.0};
  const int levels = std::max(std::countr_zero(static_cast<unsigned>(a1.intervals)),
                              std::countr_zero(static_cast<unsigned>(a2.intervals)));
  for (int level = levels; level >= 0; --level) {
    const int m1 = std::max(a1.intervals >> level, 1);
    const int m2 = std::max(a2.intervals >> level, 1);
    const int s1 = a1.intervals / m1;
    const int s2 = a2.intervals / m2;
    ArcPoint lb{0.0, 0.0, -1.0};
    for (int r = 0; r <= m1; ++r)
      for (int c = 0; c <= m2; ++c) {
        const double v = mod[static_cast<std::size_t>(r * s1) * cols + c * s2];
        if (v > lb.modulus) lb = {a1.theta(r, m1), a2.theta(c, m2), v};
      }
    lb.modulus = modulus_at(f, lb.theta1, lb.theta2);
    if (opt.refine) lb = refine_point(f, lb, a1, a2, 2.0 * a1.half / m1, 2.0 * a2.half / m2);
    if (lb.modulus > best.modulus) best = lb;
  }
  return best;
}

}  // namespace spidertr
