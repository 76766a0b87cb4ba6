#pragma once

// Bivariate Littlewood polynomials (coefficients in {-1, 0, 1}) and an
// arc-restricted search for points of large modulus on the unit torus.
//
// For a nonzero f of degrees (a, b) and integers L1, L2 >= 1 there is a point
// z1 = e^{i t1}, z2 = e^{i t2} with |t1| <= pi/L1, |t2| <= pi/L2 and
//
//   |f(z1, z2)| >= (ab)^{-(L1 L2 - 1)}.
//
// find_arc_point produces an empirical witness; lemma_bound gives the
// right-hand side with degenerate degrees clamped (see lemma_bound).

#include <complex>
#include <string_view>
#include <vector>

#include "spidertr/execution.hpp"
#include "spidertr/spider.hpp"

namespace spidertr {

class LittlewoodPoly {
 public:
  /// coeffs[k1][k2] multiplies z1^k1 z2^k2. Rows may be ragged. Trailing
  /// zero rows and columns are trimmed. Throws on a coefficient outside
  /// {-1, 0, 1} or on the zero polynomial.
  explicit LittlewoodPoly(const std::vector<std::vector<int>>& coeffs);

  int degree1() const { return rows_ - 1; }
  int degree2() const { return cols_ - 1; }
  int coeff(int k1, int k2) const { return c_[k1 * cols_ + k2]; }
  std::vector<std::vector<int>> coefficients() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> c_;
};

/// The difference polynomial sum delta_ij z1^i z2^j. Throws on a zero diff.
LittlewoodPoly from_label_diff(const LabelDiff& delta);

/// JSON array of arrays, or {"coeffs": [[...], ...]}.
LittlewoodPoly littlewood_from_json(std::string_view text);

/// Nested Horner evaluation.
std::complex<double> eval(const LittlewoodPoly& f, std::complex<double> z1, std::complex<double> z2);

/// prod_{x<=L1, y<=L2} f(z1 e^{2 pi i x/L1}, z2 e^{2 pi i y/L2}).
std::complex<double> rotation_product_eval(const LittlewoodPoly& f, int L1, int L2,
                                           std::complex<double> z1, std::complex<double> z2);

/// (max(A*B, 2))^{-(L1 L2 - 1)} with A = max(a, 1), B = max(b, 1).
double lemma_bound(const LittlewoodPoly& f, int L1, int L2);

struct ArcPoint {
  double theta1;
  double theta2;
  double modulus;
};

struct ArcSearchOptions {
  int L1 = 1;
  int L2 = 1;
  /// Requested points per axis, endpoints included; 0 means 64*L per axis.
  /// Rounded up to a dyadic lattice of 2^k + 1 points.
  int grid = 0;
  bool refine = true;
  Exec exec = Exec::Parallel;
};

/// Lattice maximum of |f| over [-pi/L1, pi/L1] x [-pi/L2, pi/L2], evaluated
/// on every dyadic level up to the requested grid, each level's best point
/// refined by golden-section coordinate ascent inside the arcs. The best
/// over all levels is returned, so a finer grid never returns less.
/// Lattice ties go to the lexicographically smaller (theta1, theta2).
ArcPoint find_arc_point(const LittlewoodPoly& f, const ArcSearchOptions& opt);

inline ArcPoint find_arc_point(const LittlewoodPoly& f, int L1, int L2, int grid = 0) {
  ArcSearchOptions opt;
  opt.L1 = L1;
  opt.L2 = L2;
  opt.grid = grid;
  return find_arc_point(f, opt);
}

}  // namespace spidertr
