#include <doctest.h>

#include <complex>
#include <numbers>

#include "spidertr/errors.hpp"
#include "spidertr/littlewood.hpp"
#include "spidertr/rng.hpp"

using namespace spidertr;
using cd = std::complex<double>;
using Coeffs = std::vector<std::vector<int>>;

namespace {

constexpr double kPi = std::numbers::pi;

LittlewoodPoly random_poly(Rng& rng, int max_a, int max_b) {
  for (;;) {
    const int a = static_cast<int>(rng.below(max_a + 1));
    const int b = static_cast<int>(rng.below(max_b + 1));
    std::vector<std::vector<int>> c(a + 1, std::vector<int>(b + 1));
    bool nonzero = false;
    for (auto& row : c)
      for (int& v : row) {
        v = static_cast<int>(rng.below(3)) - 1;
        nonzero |= v != 0;
      }
    if (nonzero) return LittlewoodPoly(c);
  }
}

cd unit(Rng& rng) { return std::polar(1.0, 2.0 * kPi * rng.uniform01()); }

}  // namespace

TEST_CASE("LittlewoodPoly construction") {
  const LittlewoodPoly f({{1, 0, 0}, {0, -1, 0}, {0, 0, 0}});
  CHECK(f.degree1() == 1);
  CHECK(f.degree2() == 1);
  CHECK(f.coeff(1, 1) == -1);
  CHECK_THROWS_AS(LittlewoodPoly(Coeffs{{0, 0}, {0}}), SpiderError);
  CHECK_THROWS_AS(LittlewoodPoly(Coeffs{{2}}), SpiderError);
  CHECK(littlewood_from_json("[[1,-1],[0,1]]").coeff(1, 1) == 1);
  CHECK(littlewood_from_json(R"({"coeffs": [[0],[1]]})").degree1() == 1);
  CHECK_THROWS_AS(littlewood_from_json("[[1,\"x\"]]"), SpiderError);
}

TEST_CASE("from_label_diff") {
  SUBCASE("single +1 at the origin is the constant 1") {
    const LabelDiff d(Geometry(4, 2), {1, 0, 0, 0});
    const auto f = from_label_diff(d);
    CHECK(f.degree1() == 0);
    CHECK(f.degree2() == 0);
    CHECK(f.coeff(0, 0) == 1);
  }
  SUBCASE("all ones minus all zeros") {
    const auto f = from_label_diff(diff(make_spider(4, 2, {{1, 1}, {1, 1}}), Spider(Geometry(4, 2))));
    CHECK(f.coefficients() == std::vector<std::vector<int>>{{1, 1}, {1, 1}});
  }
  SUBCASE("spiders differing on leg 1 only give z1 (c0 + c1 z2)") {
    const auto f = from_label_diff(diff(make_spider(4, 2, {{1, 0}, {1, 0}}), make_spider(4, 2, {{1, 0}, {0, 1}})));
    CHECK(f.degree1() == 1);
    CHECK(f.coeff(0, 0) == 0);
    CHECK(f.coeff(0, 1) == 0);
    CHECK(f.coeff(1, 0) == 1);
    CHECK(f.coeff(1, 1) == -1);
  }
  SUBCASE("zero difference is rejected") {
    const Spider x = make_spider(4, 2, {{1, 0}, {1, 0}});
    CHECK_THROWS_AS(from_label_diff(diff(x, x)), SpiderError);
  }
}

TEST_CASE("eval") {
  const LittlewoodPoly one(Coeffs{{1}});
  CHECK(eval(one, cd(0.3, 0.9), cd(-2, 1)) == cd(1, 0));
  const LittlewoodPoly z1z2({{0, 0}, {0, 1}});
  CHECK(std::abs(eval(z1z2, cd(0, 1), cd(0, 1)) - cd(-1, 0)) <= 1e-15);

  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = random_poly(rng, 15, 7);
    const cd z1 = unit(rng);
    const cd z2 = unit(rng);
    const cd v = eval(f, z1, z2);
    // triangle inequality on the torus
    CHECK(std::abs(v) <= (f.degree1() + 1) * (f.degree2() + 1) + 1e-9);
    // real coefficients: conjugate symmetry
    CHECK(std::abs(eval(f, std::conj(z1), std::conj(z2)) - std::conj(v)) <= 1e-12);
    // against a direct power sum
    cd direct = 0.0;
    for (int r = 0; r <= f.degree1(); ++r)
      for (int c = 0; c <= f.degree2(); ++c) direct += double(f.coeff(r, c)) * std::pow(z1, r) * std::pow(z2, c);
    CHECK(std::abs(v - direct) <= 1e-10);
  }
}

TEST_CASE("rotation_product_eval") {
  Rng rng(8);
  const LittlewoodPoly one(Coeffs{{1}});
  CHECK(rotation_product_eval(one, 3, 2, unit(rng), unit(rng)) == cd(1, 0));
  for (int rep = 0; rep < 50; ++rep) {
    const auto f = random_poly(rng, 6, 4);
    const cd z1 = unit(rng);
    const cd z2 = unit(rng);
    CHECK(std::abs(rotation_product_eval(f, 1, 1, z1, z2) - eval(f, z1, z2)) <= 1e-12);

    double max_factor = 0.0;
    for (int x = 1; x <= 3; ++x)
      for (int y = 1; y <= 2; ++y)
        max_factor = std::max(max_factor, std::abs(eval(f, z1 * std::polar(1.0, 2 * kPi * x / 3),
                                                           z2 * std::polar(1.0, 2 * kPi * y / 2))));
    CHECK(std::abs(rotation_product_eval(f, 3, 2, z1, z2)) <= std::pow(max_factor, 6) * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("lemma_bound clamps degenerate degrees") {
  CHECK(lemma_bound(LittlewoodPoly(Coeffs{{1}}), 3, 1) == doctest::Approx(0.25));           // base 2
  CHECK(lemma_bound(LittlewoodPoly(Coeffs{{1}, {-1}}), 1, 1) == 1.0);                       // exponent 0
  CHECK(lemma_bound(LittlewoodPoly(Coeffs{{1, 0, 1}, {0, 0, 0}, {0, 0, 1}}), 2, 1) == doctest::Approx(0.25));  // ab = 4
}

TEST_CASE("find_arc_point basics") {
  SUBCASE("constant polynomial") {
    const LittlewoodPoly one(Coeffs{{1}});
    for (int L : {1, 2, 4}) {
      const ArcPoint p = find_arc_point(one, L, 1);
      CHECK(p.modulus == doctest::Approx(1.0));
      CHECK(p.modulus >= lemma_bound(one, L, 1));
    }
  }
  SUBCASE("z1 - 1 peaks at theta1 = pi with modulus 2") {
    const LittlewoodPoly f({{-1}, {1}});
    const ArcPoint p = find_arc_point(f, 1, 1);
    CHECK(std::abs(std::abs(p.theta1) - kPi) <= 1e-9);
    CHECK(p.modulus == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("invalid parameters") {
    const LittlewoodPoly one(Coeffs{{1}});
    CHECK_THROWS_AS(find_arc_point(one, 0, 1), SpiderError);
    CHECK_THROWS_AS(find_arc_point(one, 1, 1, 1), SpiderError);
  }
}

TEST_CASE("find_arc_point stays inside the arcs and reports a recomputable modulus") {
  Rng rng(21);
  for (int rep = 0; rep < 60; ++rep) {
    const auto f = random_poly(rng, 10, 5);
    const int L1 = 1 + static_cast<int>(rng.below(4));
    const int L2 = 1 + static_cast<int>(rng.below(2));
    const ArcPoint p = find_arc_point(f, L1, L2, 33);
    CHECK(std::abs(p.theta1) <= kPi / L1);
    CHECK(std::abs(p.theta2) <= kPi / L2);
    CHECK(std::abs(p.modulus - std::abs(eval(f, std::polar(1.0, p.theta1), std::polar(1.0, p.theta2)))) <= 1e-12);
  }
}

TEST_CASE("full-torus search finds |f| >= 1 (maximum modulus)") {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto f = random_poly(rng, 12, 6);
    CHECK(find_arc_point(f, 1, 1).modulus >= 1.0 - 1e-9);
  }
}

TEST_CASE("doubling the grid never lowers the modulus") {
  Rng rng(41);
  for (int rep = 0; rep < 40; ++rep) {
    const auto f = random_poly(rng, 15, 7);
    for (bool refine : {false, true}) {
      ArcSearchOptions opt;
      opt.L1 = 1 + static_cast<int>(rng.below(4));
      opt.refine = refine;
      double last = -1.0;
      for (int grid = 3; grid <= 257; grid *= 2) {
        opt.grid = grid;
        const double m = find_arc_point(f, opt).modulus;
        CHECK(m >= last);
        last = m;
      }
    }
  }
}

TEST_CASE("serial and parallel arc search agree exactly") {
  Rng rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = random_poly(rng, 15, 7);
    ArcSearchOptions opt;
    opt.L1 = 2;
    opt.exec = Exec::Serial;
    const ArcPoint a = find_arc_point(f, opt);
    opt.exec = Exec::Parallel;
    const ArcPoint b = find_arc_point(f, opt);
    CHECK(a.theta1 == b.theta1);
    CHECK(a.theta2 == b.theta2);
    CHECK(a.modulus == b.modulus);
  }
}

TEST_CASE("arc witness meets the explicit bound on random polynomials") {
  Rng rng(61);
  int checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = random_poly(rng, 15, 7);
    for (int L1 : {1, 2, 4}) {
      const ArcPoint p = find_arc_point(f, L1, 1);
      CHECK(p.modulus >= lemma_bound(f, L1, 1));
      ++checked;
    }
  }
  CHECK(checked == 600);
}
