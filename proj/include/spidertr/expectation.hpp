#pragma once

// Closed-form expected trace statistics.
//
// A label at seed node (i, j) lands at trace position (i', j') with
// probability
//
//   K[(i,j) -> (i',j')] = (1-q) * Bin(i', i; 1-q^d) * Bin(j', j; 1-q)
//
// (the node survives, exactly i' of the legs before it survive, exactly j' of
// the nodes above it survive). Expected trace labels are therefore a linear
// image of the seed labels, and their generating function is
//
//   A_a(w1, w2) = (1-q) * sum a_ij (q^d + (1-q^d) w1)^i (q + (1-q) w2)^j.

#include <complex>
#include <memory>
#include <vector>

#include "spidertr/spider.hpp"

namespace spidertr {

/// x^k by repeated squaring.
double ipow(double x, int k);

class TransitionKernel {
 public:
  explicit TransitionKernel(const SpiderShape& shape);

  const SpiderShape& shape() const { return shape_; }

  /// P(exactly ip of the first i legs survive); zero when ip > i.
  double leg_factor(int i, int ip) const { return ip > i ? 0.0 : leg_[i * legs_ + ip]; }
  /// P(exactly jp of the first j nodes of a leg survive); zero when jp > j.
  double depth_factor(int j, int jp) const { return jp > j ? 0.0 : depth_[j * d_ + jp]; }

  /// K[(i,j) -> (ip,jp)].
  double weight(int i, int j, int ip, int jp) const {
    return (1.0 - shape_.q) * leg_factor(i, ip) * depth_factor(j, jp);
  }

  /// Expected trace labels of the spider whose only 1 is at (i, j),
  /// leg-major over trace positions.
  const std::vector<double>& slice(int i, int j) const { return slices_[shape_.geometry.flat(i, j)]; }

 private:
  SpiderShape shape_;
  int legs_;
  int d_;
  std::vector<double> leg_;
  std::vector<double> depth_;
  std::vector<std::vector<double>> slices_;
};

/// Shared, immutable kernel for (n, d, q); built once per key.
std::shared_ptr<const TransitionKernel> kernel(const SpiderShape& shape);

/// E[b_{i',j'}] over trace positions, leg-major. Entries lie in [0, 1] for
/// spiders and in [-1, 1] for label differences.
class ExpectedLabelMatrix {
 public:
  ExpectedLabelMatrix(Geometry g, std::vector<double> values) : geo_(g), values_(std::move(values)) {}

  const Geometry& geometry() const { return geo_; }
  double at(int ip, int jp) const { return values_[geo_.flat(ip, jp)]; }
  const std::vector<double>& values() const { return values_; }

  /// sum_{i',j'} E[b_{i',j'}] w1^{i'} w2^{j'} from the coefficients.
  std::complex<double> series(std::complex<double> w1, std::complex<double> w2) const;

 private:
  Geometry geo_;
  std::vector<double> values_;
};

ExpectedLabelMatrix expected_labels(const Spider& x, double q);
ExpectedLabelMatrix expected_labels(const LabelDiff& delta, double q);

/// A_a(w1, w2) through the closed form, nested Horner in z1 and z2.
std::complex<double> genfunc_eval(const Spider& x, double q, std::complex<double> w1,
                                  std::complex<double> w2);
std::complex<double> genfunc_eval(const LabelDiff& delta, double q, std::complex<double> w1,
                                  std::complex<double> w2);

}  // namespace spidertr
