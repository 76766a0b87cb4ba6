#include "spidertr/spider.hpp"

#include <bit>
#include <cmath>
#include <json.hpp>

#include "spidertr/errors.hpp"
#include "spidertr/rng.hpp"

namespace spidertr {

Geometry::Geometry(int n, int d) : n_(n), d_(d) {
  if (n <= 0 || d <= 0) {
    fail("spider geometry needs n > 0 and d > 0 (got n=" + std::to_string(n) +
         ", d=" + std::to_string(d) + ")");
  }
  if (n % d != 0) {
    fail("leg length d=" + std::to_string(d) + " does not divide n=" + std::to_string(n));
  }
  if (d > kMaxLegLength) {
    fail("leg length d=" + std::to_string(d) + " exceeds the packed limit of 64");
  }
}

SpiderShape::SpiderShape(int n, int d, double q_) : SpiderShape(Geometry(n, d), q_) {}

SpiderShape::SpiderShape(Geometry g, double q_) : geometry(g), q(q_) {
  if (!(q > 0.0 && q < 1.0)) {
    fail("deletion probability q must lie in (0, 1), got " + std::to_string(q));
  }
}

bool SpiderShape::in_regime() const {
  // d <= log(n) / log(1/q)
  return static_cast<double>(d()) * std::log(1.0 / q) <= std::log(static_cast<double>(n())) + 1e-12;
}

template <class Tag>
BitSpider<Tag>::BitSpider(Geometry g, std::vector<std::uint64_t> leg_words)
    : geo_(g), legs_(std::move(leg_words)) {
  if (static_cast<int>(legs_.size()) != g.legs()) {
    fail("expected " + std::to_string(g.legs()) + " legs, got " + std::to_string(legs_.size()));
  }
  if (g.d() < 64) {
    const std::uint64_t mask = (std::uint64_t{1} << g.d()) - 1;
    for (auto w : legs_) {
      if (w & ~mask) fail("leg word has labels beyond depth d");
    }
  }
}

template <class Tag>
BitSpider<Tag> BitSpider<Tag>::from_bitstring(Geometry g, std::string_view bits) {
  if (static_cast<int>(bits.size()) != g.n()) {
    fail("bit string has length " + std::to_string(bits.size()) + ", expected n=" +
         std::to_string(g.n()));
  }
  std::vector<std::uint64_t> legs(g.legs(), 0);
  for (int i = 0; i < g.legs(); ++i) {
    for (int j = 0; j < g.d(); ++j) {
      const char c = bits[g.flat(i, j)];
      if (c == '1') {
        legs[i] |= std::uint64_t{1} << j;
      } else if (c != '0') {
        fail(std::string("bit string contains non-binary character '") + c + "'");
      }
    }
  }
  return BitSpider(g, std::move(legs));
}

template <class Tag>
BitSpider<Tag> BitSpider<Tag>::from_index(Geometry g, std::uint64_t k) {
  if (g.n() > 64) fail("candidate index form needs n <= 64");
  std::vector<std::uint64_t> legs(g.legs(), 0);
  const int n = g.n();
  for (int p = 0; p < n; ++p) {
    if ((k >> (n - 1 - p)) & 1U) legs[p / g.d()] |= std::uint64_t{1} << (p % g.d());
  }
  return BitSpider(g, std::move(legs));
}

template <class Tag>
int BitSpider<Tag>::ones() const {
  int c = 0;
  for (auto w : legs_) c += std::popcount(w);
  return c;
}

template <class Tag>
std::string BitSpider<Tag>::bitstring() const {
  std::string s(geo_.n(), '0');
  for (int i = 0; i < geo_.legs(); ++i)
    for (int j = 0; j < geo_.d(); ++j)
      if (label(i, j)) s[geo_.flat(i, j)] = '1';
  return s;
}

template <class Tag>
std::uint64_t BitSpider<Tag>::index() const {
  if (geo_.n() > 64) fail("candidate index form needs n <= 64");
  std::uint64_t k = 0;
  for (int i = 0; i < geo_.legs(); ++i)
    for (int j = 0; j < geo_.d(); ++j) k = (k << 1) | static_cast<std::uint64_t>(label(i, j));
  return k;
}

template class BitSpider<detail::SpiderTag>;
template class BitSpider<detail::TraceTag>;

LabelDiff::LabelDiff(Geometry g, std::vector<int> values) : geo_(g), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != g.n()) fail("label difference has wrong size");
  for (int v : values_) {
    if (v < -1 || v > 1) fail("label difference entries must be in {-1, 0, 1}");
  }
}

bool LabelDiff::is_zero() const {
  for (int v : values_)
    if (v != 0) return false;
  return true;
}

LabelDiff LabelDiff::negated() const {
  std::vector<int> v(values_);
  for (int& x : v) x = -x;
  return LabelDiff(geo_, std::move(v));
}

Spider make_spider(int n, int d, const std::vector<std::vector<int>>& legs) {
  if (n <= 0 || d <= 0) fail("spider needs n > 0 and d > 0");
  if (n % d != 0) {
    fail("shape error: d=" + std::to_string(d) + " does not divide n=" + std::to_string(n));
  }
  Geometry g(n, d);
  if (static_cast<int>(legs.size()) != g.legs()) {
    fail("dimension error: expected " + std::to_string(g.legs()) + " legs, got " +
         std::to_string(legs.size()));
  }
  std::vector<std::uint64_t> words(g.legs(), 0);
  for (int i = 0; i < g.legs(); ++i) {
    if (static_cast<int>(legs[i].size()) != d) {
      fail("dimension error: leg " + std::to_string(i) + " has " + std::to_string(legs[i].size()) +
           " labels, expected d=" + std::to_string(d));
    }
    for (int j = 0; j < d; ++j) {
      const int b = legs[i][j];
      if (b != 0 && b != 1) {
        fail("label error: node (" + std::to_string(i) + "," + std::to_string(j) +
             ") has non-binary label " + std::to_string(b));
      }
      if (b) words[i] |= std::uint64_t{1} << j;
    }
  }
  return Spider(g, std::move(words));
}

LabelDiff diff(const Spider& x1, const Spider& x2) {
  if (!(x1.geometry() == x2.geometry())) fail("diff of spiders with different shapes");
  const Geometry& g = x1.geometry();
  std::vector<int> v(g.n());
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j) v[g.flat(i, j)] = x1.label(i, j) - x2.label(i, j);
  return LabelDiff(g, std::move(v));
}

CandidateRange::CandidateRange(Geometry g, int cap) : geo_(g), count_(0) {
  if (g.n() > cap || g.n() > 63) {
    fail_cap("candidate enumeration of 2^" + std::to_string(g.n()) +
             " spiders exceeds the cap of n=" + std::to_string(cap));
  }
  count_ = std::uint64_t{1} << g.n();
}

CandidateRange enumerate_candidates(const Geometry& g, int cap) { return CandidateRange(g, cap); }

Spider random_spider(const Geometry& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> words(g.legs(), 0);
  for (int i = 0; i < g.legs(); ++i)
    for (int j = 0; j < g.d(); ++j)
      if (rng.bit()) words[i] |= std::uint64_t{1} << j;
  return Spider(g, std::move(words));
}

std::string to_json(const Spider& x) {
  const Geometry& g = x.geometry();
  nlohmann::json legs = nlohmann::json::array();
  for (int i = 0; i < g.legs(); ++i) {
    nlohmann::json leg = nlohmann::json::array();
    for (int j = 0; j < g.d(); ++j) leg.push_back(x.label(i, j));
    legs.push_back(std::move(leg));
  }
  nlohmann::json doc;
  doc["n"] = g.n();
  doc["d"] = g.d();
  doc["legs"] = std::move(legs);
  return doc.dump();
}

Spider spider_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("malformed spider document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("d") || !doc.contains("legs")) {
    fail("spider document needs keys n, d, legs");
  }
  if (!doc["n"].is_number_integer() || !doc["d"].is_number_integer() || !doc["legs"].is_array()) {
    fail("spider document: n and d must be integers and legs an array");
  }
  std::vector<std::vector<int>> legs;
  for (const auto& leg : doc["legs"]) {
    if (!leg.is_array()) fail("spider document: each leg must be an array of bits");
    std::vector<int> bits;
    for (const auto& b : leg) {
      if (!b.is_number_integer()) fail("spider document: labels must be integers");
      bits.push_back(b.get<int>());
    }
    legs.push_back(std::move(bits));
  }
  return make_spider(doc["n"].get<int>(), doc["d"].get<int>(), legs);
}

}  // namespace spidertr
