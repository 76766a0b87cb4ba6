#pragma once

// Spider data model: geometry, bit-packed labels, label differences,
// candidate enumeration, and the JSON spider document.
//
// Node (i, j) is leg i, depth j (depth 0 is adjacent to the root). The root
// is unlabeled and never deleted, so it is not stored. Labels are packed one
// 64-bit word per leg with bit j holding depth j.
//
// The flattened (leg-major) bit string lists nodes in order
// (0,0), (0,1), ..., (0,d-1), (1,0), ... ; candidate k is the spider whose
// flattened string is the n-bit big-endian binary expansion of k, so
// enumeration order is lexicographic in that string.

#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

namespace spidertr {

inline constexpr int kMaxLegLength = 64;
inline constexpr int kDefaultEnumerationCap = 24;

class Geometry {
 public:
  /// Throws on n <= 0, d <= 0, d not dividing n, or d > 64.
  Geometry(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }
  int legs() const { return n_ / d_; }
  /// Leg-major flattened position of node (i, j).
  int flat(int i, int j) const { return i * d_ + j; }

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  int n_;
  int d_;
};

/// Geometry plus the channel deletion probability q in (0, 1).
struct SpiderShape {
  SpiderShape(int n, int d, double q);
  SpiderShape(Geometry g, double q);

  Geometry geometry;
  double q;

  int n() const { return geometry.n(); }
  int d() const { return geometry.d(); }
  int legs() const { return geometry.legs(); }

  /// d <= log_{1/q}(n): whole legs vanish with probability q^d >= 1/n.
  bool in_regime() const;
};

namespace detail {
struct SpiderTag {};
struct TraceTag {};
}  // namespace detail

/// Binary-labeled (n, d)-spider, bit-packed per leg. Spider and Trace are
/// distinct instantiations so a trace is never passed where a seed belongs.
template <class Tag>
class BitSpider {
 public:
  /// All-zero spider.
  explicit BitSpider(Geometry g) : geo_(g), legs_(g.legs(), 0) {}

  /// From packed leg words; throws if a word has bits at depth >= d.
  BitSpider(Geometry g, std::vector<std::uint64_t> leg_words);

  /// From a leg-major string of '0'/'1' of length n.
  static BitSpider from_bitstring(Geometry g, std::string_view bits);

  /// Candidate number k in lexicographic enumeration order (n <= 64).
  static BitSpider from_index(Geometry g, std::uint64_t k);

  const Geometry& geometry() const { return geo_; }
  int label(int i, int j) const { return static_cast<int>((legs_[i] >> j) & 1U); }
  std::uint64_t leg_word(int i) const { return legs_[i]; }
  const std::vector<std::uint64_t>& leg_words() const { return legs_; }
  int ones() const;

  /// Leg-major '0'/'1' string of length n.
  std::string bitstring() const;
  /// Inverse of from_index; requires n <= 64.
  std::uint64_t index() const;

  friend bool operator==(const BitSpider&, const BitSpider&) = default;

 private:
  Geometry geo_;
  std::vector<std::uint64_t> legs_;
};

using Spider = BitSpider<detail::SpiderTag>;
using Trace = BitSpider<detail::TraceTag>;

extern template class BitSpider<detail::SpiderTag>;
extern template class BitSpider<detail::TraceTag>;

/// Elementwise difference of two spiders' labels, entries in {-1, 0, 1},
/// stored leg-major.
class LabelDiff {
 public:
  LabelDiff(Geometry g, std::vector<int> values);

  const Geometry& geometry() const { return geo_; }
  int value(int i, int j) const { return values_[geo_.flat(i, j)]; }
  const std::vector<int>& values() const { return values_; }
  bool is_zero() const;
  LabelDiff negated() const;

  friend bool operator==(const LabelDiff&, const LabelDiff&) = default;

 private:
  Geometry geo_;
  std::vector<int> values_;
};

/// Validating constructor from a legs x depth 0/1 matrix. Rejects
/// d not dividing n, a matrix of the wrong dimensions, and non-binary labels,
/// each with its own message.
Spider make_spider(int n, int d, const std::vector<std::vector<int>>& legs);

LabelDiff diff(const Spider& x1, const Spider& x2);

/// Lazy range over all 2^n spiders of a geometry in lexicographic order.
class CandidateRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Spider;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const Geometry* g, std::uint64_t k) : geo_(g), k_(k) {}

    Spider operator*() const { return Spider::from_index(*geo_, k_); }
    iterator& operator++() { ++k_; return *this; }
    iterator operator++(int) { auto t = *this; ++k_; return t; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.k_ == b.k_; }

   private:
    const Geometry* geo_ = nullptr;
    std::uint64_t k_ = 0;
  };

  CandidateRange(Geometry g, int cap);

  std::uint64_t size() const { return count_; }
  iterator begin() const { return {&geo_, 0}; }
  iterator end() const { return {&geo_, count_}; }

 private:
  Geometry geo_;
  std::uint64_t count_;
};

/// Throws CapExceeded when n > cap.
CandidateRange enumerate_candidates(const Geometry& g, int cap = kDefaultEnumerationCap);

/// i.i.d. fair labels from Rng(seed), one draw per node in leg-major order.
Spider random_spider(const Geometry& g, std::uint64_t seed);

/// {"n": int, "d": int, "legs": [[bit,...],...]}
std::string to_json(const Spider& x);
Spider spider_from_json(std::string_view text);

}  // namespace spidertr
