#include "hlgt/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <cctype>
#include <cmath>
#include <set>

namespace hlgt {

Dyadic Dyadic::make(std::int64_t num, int exp) {
  while (exp > 0 && num % 2 == 0) {
    num /= 2;
    --exp;
  }
  while (exp < 0) {
    num *= 2;
    ++exp;
  }
  if (exp > 60) throw ResourceError("dyadic denominator exceeds 2^60");
  return {num, exp};
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
  int e = std::max(exp, o.exp);
  return make(num * (std::int64_t(1) << (e - exp)) + o.num * (std::int64_t(1) << (e - o.exp)), e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + Dyadic{-o.num, o.exp}; }

Dyadic Dyadic::scaled_pow2(int k) const { return make(num, exp - k); }

std::strong_ordering Dyadic::operator<=>(const Dyadic& o) const {
  int e = std::max(exp, o.exp);
  auto a = num * (std::int64_t(1) << (e - exp));
  auto b = o.num * (std::int64_t(1) << (e - o.exp));
  return a <=> b;
}

double Dyadic::to_double() const { return std::ldexp(double(num), -exp); }

std::string Dyadic::to_string() const {
  if (exp == 0) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(std::int64_t(1) << exp);
}

int Dyadic::log2_exact() const {
  if (num <= 0 || !std::has_single_bit(std::uint64_t(num))) throw ContractError("not a power of two: " + to_string());
  return std::countr_zero(std::uint64_t(num)) - exp;
}

namespace {

const Dyadic kZero{0, 0};
const Dyadic kOne{1, 0};

Dyadic midpoint(const Dyadic& a, const Dyadic& b) { return (a + b).scaled_pow2(-1); }

}  // namespace

bool DyadicTree::is_tree_partition(const std::vector<Dyadic>& pts) {
  if (pts.size() < 2 || pts.front() != kZero || pts.back() != kOne) return false;
  if (!std::is_sorted(pts.begin(), pts.end()) ||
      std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    return false;
  std::function<bool(std::size_t, std::size_t)> ok = [&](std::size_t i, std::size_t j) {
    if (j == i + 1) return true;
    Dyadic m = midpoint(pts[i], pts[j]);
    auto it = std::lower_bound(pts.begin() + i, pts.begin() + j, m);
    if (it == pts.begin() + j || *it != m) return false;
    std::size_t k = it - pts.begin();
    return ok(i, k) && ok(k, j);
  };
  return ok(0, pts.size() - 1);
}

DyadicTree::DyadicTree() : pts_{kZero, kOne} {}

DyadicTree::DyadicTree(std::vector<Dyadic> points) : pts_(std::move(points)) {
  if (!is_tree_partition(pts_)) throw ContractError("point set is not a dyadic tree partition");
}

DyadicTree DyadicTree::complete(int N) {
  std::vector<Dyadic> p;
  for (std::int64_t i = 0; i <= (std::int64_t(1) << N); ++i) p.push_back(Dyadic::make(i, N));
  return DyadicTree(std::move(p));
}

DyadicTree DyadicTree::parse(const std::string& s) {
  if (s.empty() || s == ".") return DyadicTree();
  std::size_t pos = 0;
  std::vector<Dyadic> pts{kZero};
  std::function<void(Dyadic, Dyadic)> node = [&](Dyadic a, Dyadic b) {
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      Dyadic m = midpoint(a, b);
      node(a, m);
      if (pos >= s.size() || s[pos] != ',') throw ConfigError("tree string: expected ',' in '" + s + "'");
      ++pos;
      node(m, b);
      if (pos >= s.size() || s[pos] != ')') throw ConfigError("tree string: expected ')' in '" + s + "'");
      ++pos;
    } else {
      pts.push_back(b);
    }
  };
  node(kZero, kOne);
  if (pos != s.size()) throw ConfigError("tree string: trailing characters in '" + s + "'");
  return DyadicTree(std::move(pts));
}

std::string DyadicTree::to_string() const {
  if (leaves() == 1) return ".";
  std::function<std::string(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) -> std::string {
    if (j == i + 1) return "";
    Dyadic m = midpoint(pts_[i], pts_[j]);
    std::size_t k = std::lower_bound(pts_.begin() + i, pts_.begin() + j, m) - pts_.begin();
    return "(" + rec(i, k) + "," + rec(k, j) + ")";
  };
  return rec(0, pts_.size() - 1);
}

bool DyadicTree::contains_point(const Dyadic& d) const { return std::binary_search(pts_.begin(), pts_.end(), d); }

DyadicTree tree_union(const DyadicTree& a, const DyadicTree& b) {
  std::set<Dyadic> s(a.points().begin(), a.points().end());
  s.insert(b.points().begin(), b.points().end());
  return DyadicTree(std::vector<Dyadic>(s.begin(), s.end()));
}

std::vector<Dyadic> OrientedLattice::points() const {
  std::vector<Dyadic> p;
  for (const auto& e : edges) p.push_back(e.lo);
  if (!edges.empty()) p.push_back(edges.back().hi);
  return p;
}

std::string OrientedLattice::pattern() const {
  std::string s;
  for (const auto& e : edges) s += orient_char(e.orient);
  return s;
}

OrientedLattice lattice_from_tree(const DyadicTree& t, Orient o, double L) {
  OrientedLattice lat{L, {}};
  const auto& p = t.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) lat.edges.push_back({p[i], p[i + 1], o});
  return lat;
}

namespace {

// Outward bisection: the half at the target end keeps the orientation, the
// other half points away from it. Both L and R split into (L, R).
std::pair<Edge, Edge> cofinal_split(const Edge& e) {
  Dyadic m = midpoint(e.lo, e.hi);
  return {Edge{e.lo, m, Orient::Left}, Edge{m, e.hi, Orient::Right}};
}

std::pair<Edge, Edge> uniform_split(const Edge& e) {
  Dyadic m = midpoint(e.lo, e.hi);
  return {Edge{e.lo, m, e.orient}, Edge{m, e.hi, e.orient}};
}

}  // namespace

OrientedLattice cofinal_lattice(int N, Orient seed, double L) {
  OrientedLattice lat{L, {Edge{kZero, kOne, seed}}};
  for (int k = 0; k < N; ++k) {
    OrientedLattice next{L, {}};
    for (const auto& e : lat.edges) {
      auto [a, b] = cofinal_split(e);
      next.edges.push_back(a);
      next.edges.push_back(b);
    }
    lat = std::move(next);
  }
  return lat;
}

OrientedLattice uniform_lattice(int N, Orient o, double L) { return lattice_from_tree(DyadicTree::complete(N), o, L); }

std::optional<Witness> is_refinement(const OrientedLattice& coarse, const OrientedLattice& fine) {
  if (coarse.L != fine.L || fine.edges.empty() || coarse.edges.empty()) return std::nullopt;
  Witness w;
  w.coarse_edges = coarse.size();
  w.fine_edges = fine.size();
  std::size_t f = 0;
  for (const auto& ce : coarse.edges) {
    if (f >= fine.edges.size() || fine.edges[f].lo != ce.lo) return std::nullopt;
    std::vector<int> inside;
    while (f < fine.edges.size() && fine.edges[f].hi <= ce.hi) inside.push_back(int(f++));
    if (inside.empty() || fine.edges[inside.back()].hi != ce.hi) return std::nullopt;
    if (ce.orient == Orient::Left) std::reverse(inside.begin(), inside.end());
    std::vector<WitnessStep> path;
    for (int i : inside) path.push_back({i, fine.edges[i].orient == ce.orient ? 1 : -1});
    if (path.back().sign != 1) return std::nullopt;  // carrier must follow the coarse edge
    w.paths.push_back(std::move(path));
  }
  if (f != fine.edges.size()) return std::nullopt;
  return w;
}

OrientedLattice refine_to(const OrientedLattice& coarse, const std::vector<Dyadic>& points, SplitPolicy policy) {
  OrientedLattice out{coarse.L, {}};
  std::function<void(const Edge&)> rec = [&](const Edge& e) {
    bool interior = std::any_of(points.begin(), points.end(), [&](const Dyadic& d) { return e.lo < d && d < e.hi; });
    if (!interior) {
      out.edges.push_back(e);
      return;
    }
    auto [a, b] = policy == SplitPolicy::Outward ? cofinal_split(e) : uniform_split(e);
    rec(a);
    rec(b);
  };
  for (const auto& e : coarse.edges) rec(e);
  return out;
}

OrientedLattice common_refinement(const OrientedLattice& a, const OrientedLattice& b) {
  if (a.L != b.L) throw ContractError("lattices over different intervals");
  std::vector<Dyadic> pts = a.points();
  auto pb = b.points();
  pts.insert(pts.end(), pb.begin(), pb.end());
  OrientedLattice ra = refine_to(a, pts), rb = refine_to(b, pts);
  // Both now share the partition; split wherever orientations disagree.
  std::vector<Dyadic> extra;
  for (std::size_t i = 0; i < ra.edges.size(); ++i)
    if (ra.edges[i].orient != rb.edges[i].orient) extra.push_back(midpoint(ra.edges[i].lo, ra.edges[i].hi));
  if (extra.empty()) return ra;
  pts.insert(pts.end(), extra.begin(), extra.end());
  ra = refine_to(a, pts);
  rb = refine_to(b, pts);
  if (!(ra == rb)) throw ContractError("common refinement did not converge");
  return ra;
}

ThompsonElement::ThompsonElement(DyadicTree domain, DyadicTree range) : dom_(std::move(domain)), ran_(std::move(range)) {
  if (dom_.leaves() != ran_.leaves()) throw ContractError("tree pair with unequal leaf counts");
}

ThompsonElement ThompsonElement::x0() { return {DyadicTree::parse("(,(,))"), DyadicTree::parse("((,),)")}; }
ThompsonElement ThompsonElement::x1() { return {DyadicTree::parse("(,(,(,)))"), DyadicTree::parse("(,((,),))")}; }

Dyadic ThompsonElement::apply(const Dyadic& d) const {
  if (d < kZero || d > kOne) throw DomainError("Thompson map argument outside [0, 1]");
  if (d == kOne) return kOne;
  const auto& dp = dom_.points();
  const auto& rp = ran_.points();
  std::size_t i = std::upper_bound(dp.begin(), dp.end(), d) - dp.begin() - 1;
  // slope = |range leaf| / |domain leaf| is a power of two
  int k = (rp[i + 1] - rp[i]).log2_exact() - (dp[i + 1] - dp[i]).log2_exact();
  return rp[i] + (d - dp[i]).scaled_pow2(k);
}

std::vector<Dyadic> ThompsonElement::breakpoints() const {
  std::vector<Dyadic> out;
  const auto& dp = dom_.points();
  const auto& rp = ran_.points();
  auto slope = [&](std::size_t i) { return (rp[i + 1] - rp[i]).log2_exact() - (dp[i + 1] - dp[i]).log2_exact(); };
  for (std::size_t i = 1; i + 1 < dp.size(); ++i)
    if (slope(i - 1) != slope(i)) out.push_back(dp[i]);
  return out;
}

ThompsonElement ThompsonElement::expanded(const DyadicTree& finer_domain) const {
  for (const auto& p : dom_.points())
    if (!finer_domain.contains_point(p)) throw ContractError("expanded(): tree does not refine the domain");
  std::vector<Dyadic> img;
  for (const auto& p : finer_domain.points()) img.push_back(apply(p));
  return {finer_domain, DyadicTree(std::move(img))};
}

ThompsonElement ThompsonElement::canonical() const {
  std::vector<Dyadic> d = dom_.points(), r = ran_.points();
  bool changed = true;
  // Adjacent leaves i, i+1 form a caret when they are halves of one standard
  // dyadic interval; remove carets present in both trees.
  auto caret = [](const std::vector<Dyadic>& p, std::size_t i) {
    Dyadic l1 = p[i + 1] - p[i], l2 = p[i + 2] - p[i + 1];
    if (l1 != l2) return false;
    Dyadic twice = l1.scaled_pow2(1);
    // p[i] must be a multiple of 2*len
    return p[i].exp <= twice.exp;
  };
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 2 < d.size(); ++i) {
      if (caret(d, i) && caret(r, i)) {
        d.erase(d.begin() + i + 1);
        r.erase(r.begin() + i + 1);
        changed = true;
        break;
      }
    }
  }
  return {DyadicTree(d), DyadicTree(r)};
}

bool ThompsonElement::operator==(const ThompsonElement& o) const {
  auto a = canonical(), b = o.canonical();
  return a.dom_ == b.dom_ && a.ran_ == b.ran_;
}

ThompsonElement operator*(const ThompsonElement& f, const ThompsonElement& g) {
  // Refine g's range and f's domain to a common tree, then pull back / push forward.
  DyadicTree mid = tree_union(g.range(), f.domain());
  ThompsonElement ginv = g.inverse().expanded(mid);
  ThompsonElement fe = f.expanded(mid);
  return ThompsonElement(ginv.range(), fe.range()).canonical();
}

DyadicTree adapted_tree(const ThompsonElement& f, const DyadicTree& t) { return tree_union(t, f.domain()); }

bool is_adapted(const ThompsonElement& f, const OrientedLattice& lat) {
  DyadicTree t = lat.tree();
  for (const auto& p : f.domain().points())
    if (!t.contains_point(p)) return false;
  return true;
}

OrientedLattice thompson_map_lattice(const ThompsonElement& f, const OrientedLattice& lat) {
  if (!is_adapted(f, lat))
    throw ContractError("lattice not adapted; refine to " + adapted_tree(f, lat.tree()).to_string());
  OrientedLattice out{lat.L, {}};
  for (const auto& e : lat.edges) out.edges.push_back({f.apply(e.lo), f.apply(e.hi), e.orient});
  return out;
}

}  // namespace hlgt

namespace hlgt {

OrientedLattice lattice_from_pattern(const DyadicTree& t, const std::string& pattern, double L) {
  if (int(pattern.size()) != t.leaves()) throw ConfigError("orientation pattern length does not match tree");
  OrientedLattice lat = lattice_from_tree(t, Orient::Left, L);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = char(std::toupper(pattern[i]));
    if (c != 'L' && c != 'R') throw ConfigError("orientation must be L or R");
    lat.edges[i].orient = c == 'L' ? Orient::Left : Orient::Right;
  }
  return lat;
}

}  // namespace hlgt
