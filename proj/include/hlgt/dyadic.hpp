#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlgt/common.hpp"

namespace hlgt {

// Exact dyadic rational num / 2^exp, kept normalized (num odd or exp == 0).
struct Dyadic {
  std::int64_t num = 0;
  int exp = 0;

  static Dyadic make(std::int64_t num, int exp);
  Dyadic operator+(const Dyadic& o) const;
  Dyadic operator-(const Dyadic& o) const;
  Dyadic scaled_pow2(int k) const;  // times 2^k
  std::strong_ordering operator<=>(const Dyadic& o) const;
  bool operator==(const Dyadic& o) const = default;
  double to_double() const;
  std::string to_string() const;
  // Exponent k with this == 2^k; throws if not a power of two.
  int log2_exact() const;
};

// Binary rooted tree, stored as its partition 0 = s_0 < ... < s_n = 1.
class DyadicTree {
 public:
  DyadicTree();  // single leaf
  explicit DyadicTree(std::vector<Dyadic> points);
  static DyadicTree complete(int N);
  // "((,),)" style; a lone leaf may be written "" or ".".
  static DyadicTree parse(const std::string& s);
  std::string to_string() const;

  const std::vector<Dyadic>& points() const { return pts_; }
  int leaves() const { return int(pts_.size()) - 1; }
  bool contains_point(const Dyadic& d) const;
  bool operator==(const DyadicTree& o) const = default;

  static bool is_tree_partition(const std::vector<Dyadic>& pts);

 private:
  std::vector<Dyadic> pts_;
};

DyadicTree tree_union(const DyadicTree& a, const DyadicTree& b);

enum class Orient { Left, Right };
inline char orient_char(Orient o) { return o == Orient::Left ? 'L' : 'R'; }

// A Left edge points to its left endpoint, a Right edge to its right endpoint.
struct Edge {
  Dyadic lo, hi;
  Orient orient = Orient::Left;
  bool operator==(const Edge&) const = default;
};

struct OrientedLattice {
  double L = 1.0;
  std::vector<Edge> edges;

  int size() const { return int(edges.size()); }
  std::vector<Dyadic> points() const;
  DyadicTree tree() const { return DyadicTree(points()); }
  std::string pattern() const;  // e.g. "LRLR"
  bool operator==(const OrientedLattice& o) const { return L == o.L && edges == o.edges; }
};

OrientedLattice lattice_from_tree(const DyadicTree& t, Orient o, double L = 1.0);
// gamma_N of the cofinal sequence: each edge splits into outward-pointing halves.
OrientedLattice cofinal_lattice(int N, Orient seed = Orient::Left, double L = 1.0);
// All edges of the complete level-N tree with the same orientation.
OrientedLattice uniform_lattice(int N, Orient o = Orient::Left, double L = 1.0);

struct WitnessStep {
  int fine;  // fine edge index
  int sign;  // +1 along the fine orientation, -1 against it
};

// For each coarse edge the fine edges traversed from its source to its target.
// The last step is the carrier: the fine edge at the target end, traversed with sign +1.
struct Witness {
  int coarse_edges = 0;
  int fine_edges = 0;
  std::vector<std::vector<WitnessStep>> paths;
  int carrier(int coarse) const { return paths[coarse].back().fine; }
};

std::optional<Witness> is_refinement(const OrientedLattice& coarse, const OrientedLattice& fine);

// How a bisected edge orients its halves. Both keep the parent orientation on
// the half at the target end, so both are refinements in the sense of is_refinement.
enum class SplitPolicy {
  Outward,  // L -> (L, R), R -> (L, R): the cofinal pattern
  Uniform   // L -> (L, L), R -> (R, R)
};

// Coarsest refinement of `coarse` whose partition contains `points`,
// obtained by repeated bisection.
OrientedLattice refine_to(const OrientedLattice& coarse, const std::vector<Dyadic>& points,
                          SplitPolicy policy = SplitPolicy::Outward);
OrientedLattice common_refinement(const OrientedLattice& a, const OrientedLattice& b);

// Element of Thompson's group F as a tree pair with equal leaf counts.
class ThompsonElement {
 public:
  ThompsonElement() = default;
  ThompsonElement(DyadicTree domain, DyadicTree range);
  static ThompsonElement identity() { return {}; }
  static ThompsonElement x0();  // ((,),) <- (,(,)) : f(1/2) = 1/4 ... see .cpp
  static ThompsonElement x1();

  const DyadicTree& domain() const { return dom_; }
  const DyadicTree& range() const { return ran_; }
  Dyadic apply(const Dyadic& d) const;
  ThompsonElement inverse() const { return {ran_, dom_}; }
  ThompsonElement canonical() const;
  // break points of the piecewise-linear map, interior of (0, 1)
  std::vector<Dyadic> breakpoints() const;
  // Same tree pair expressed over a refinement of the domain partition.
  ThompsonElement expanded(const DyadicTree& finer_domain) const;
  bool operator==(const ThompsonElement& o) const;

 private:
  DyadicTree dom_, ran_;
};

// (f * g)(d) = f(g(d))
ThompsonElement operator*(const ThompsonElement& f, const ThompsonElement& g);

DyadicTree adapted_tree(const ThompsonElement& f, const DyadicTree& t);
bool is_adapted(const ThompsonElement& f, const OrientedLattice& lat);
// Edge-wise image of an adapted lattice; orientations are carried along.
OrientedLattice thompson_map_lattice(const ThompsonElement& f, const OrientedLattice& lat);
// Parse a lattice from a pattern such as "LRR" over the given tree.
OrientedLattice lattice_from_pattern(const DyadicTree& t, const std::string& pattern, double L = 1.0);

}  // namespace hlgt
