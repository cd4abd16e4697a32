#include "hlgt/observables.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "hlgt/heat_kernel.hpp"

namespace hlgt {

GroupValue holonomy(const GroupId& G, const std::vector<GroupValue>& config, const DyadicTree& t, const Dyadic& tau) {
  const auto& pts = t.points();
  if (config.size() + 1 != pts.size()) throw ContractError("holonomy: configuration does not match tree");
  auto it = std::find(pts.begin(), pts.end(), tau);
  if (it == pts.end()) throw ContractError("holonomy: " + tau.to_string() + " is not a partition point; refine first");
  GroupValue h = identity(G);
  for (long i = 0; i < it - pts.begin(); ++i) h = multiply(G, h, config[i]);
  return h;
}

std::vector<GroupValue> holonomy_path(const GroupId& G, const std::vector<GroupValue>& config) {
  std::vector<GroupValue> h;
  GroupValue acc = identity(G);
  for (const auto& g : config) h.push_back(acc = multiply(G, acc, g));
  return h;
}

std::vector<GroupValue> holonomy_inverse(const GroupId& G, const std::vector<GroupValue>& path) {
  std::vector<GroupValue> g;
  GroupValue prev = identity(G);
  for (const auto& h : path) {
    g.push_back(multiply(G, invert(G, prev), h));
    prev = h;
  }
  return g;
}

std::vector<GroupValue> project_config(const GroupId& G, const std::vector<GroupValue>& fine, const DyadicTree& fine_tree,
                                       const DyadicTree& coarse_tree) {
  const auto& fp = fine_tree.points();
  if (fine.size() + 1 != fp.size()) throw ContractError("project_config: configuration does not match tree");
  std::vector<GroupValue> out;
  std::size_t j = 0;
  const auto& cp = coarse_tree.points();
  for (std::size_t c = 1; c < cp.size(); ++c) {
    GroupValue acc = identity(G);
    while (j + 1 < fp.size() && fp[j + 1] <= cp[c]) acc = multiply(G, acc, fine[j++]);
    if (fp[j] != cp[c]) throw ContractError("project_config: trees are not nested");
    out.push_back(acc);
  }
  return out;
}

DualityReport duality_check(const GroupId& G, int N, long samples, std::uint64_t seed) {
  if (!G.is_abelian() || !G.is_finite()) throw UnsupportedError("duality_check: finite abelian backend required");
  int E = 1 << N, n = G.order();
  double pairs = std::pow(double(n), 2.0 * E);
  auto digits = [&](long idx) {
    std::vector<GroupValue> v(E);
    for (int e = E - 1; e >= 0; --e) {
      v[e] = GroupValue::integer(idx % n);
      idx /= n;
    }
    return v;
  };
  DualityReport r;
  auto check = [&](const std::vector<GroupValue>& g, const std::vector<GroupValue>& h) {
    std::vector<GroupValue> moved(E);
    for (int e = 0; e < E; ++e) moved[e] = multiply(G, g[e], h[e]);
    auto lhs = holonomy_path(G, moved), hg = holonomy_path(G, g), hh = holonomy_path(G, h);
    ++r.checked;
    for (int e = 0; e < E; ++e)
      if (lhs[e].k != multiply(G, hg[e], hh[e]).k) {
        ++r.mismatches;
        break;
      }
  };
  if (pairs <= 1e6) {
    long total = long(std::pow(double(n), double(E)));
    for (long a = 0; a < total; ++a)
      for (long b = 0; b < total; ++b) check(digits(a), digits(b));
  } else {
    std::mt19937_64 rng(seed);
    for (long s = 0; s < samples; ++s) {
      std::vector<GroupValue> g(E), h(E);
      for (int e = 0; e < E; ++e) {
        g[e] = random_element(G, rng);
        h[e] = random_element(G, rng);
      }
      check(g, h);
    }
  }
  return r;
}

InvarianceReport invariant_function_check(const GroupId& G, int E, const std::function<cplx(const std::vector<int>&)>& f) {
  FiniteGroup F(G);
  long total = 1;
  for (int e = 0; e < E; ++e) total *= F.n;
  if (double(total) * double(total) > 1e7) throw ResourceError("invariant_function_check: lattice too large");
  auto decode = [&](long idx) {
    std::vector<int> v(E);
    for (int e = E - 1; e >= 0; --e) {
      v[e] = int(idx % F.n);
      idx /= F.n;
    }
    return v;
  };
  const double tol = 1e-12;
  InvarianceReport r{true, true, true};
  std::map<int, cplx> by_hol;
  for (long i = 0; i < total; ++i) {
    auto g = decode(i);
    cplx fg = f(g);
    int hol = 0;
    for (int e = 0; e < E; ++e) hol = F.mul(hol, g[e]);
    auto [it, fresh] = by_hol.emplace(hol, fg);
    if (!fresh && std::abs(it->second - fg) > tol) r.factors_through_holonomy = false;
    for (long ki = 0; ki < total; ++ki) {
      auto k = decode(ki);
      std::vector<int> moved(E);
      for (int e = 0; e < E; ++e) moved[e] = F.mul(F.mul(k[e], g[e]), F.inv(k[(e + 1) % E]));
      bool same = std::abs(f(moved) - fg) <= tol;
      if (!same) {
        r.fully_invariant = false;
        if (k[0] == 0) r.loop_invariant = false;
      }
    }
  }
  return r;
}

namespace {

// Fourier modes of the backend with their Casimirs; shift(i, label) is the mode
// index after multiplying by the character `label`, or -1 if truncated away.
struct ModeSpace {
  GroupId G;
  std::vector<int> labels;
  std::vector<double> casimir;

  explicit ModeSpace(const GroupId& g) : G(g) {
    auto t = irreps(G);
    if (!G.is_abelian()) throw UnsupportedError("two-point functions for nonabelian groups need matrix coefficients");
    if (G.kind != GroupKind::CyclicZn && G.kind != GroupKind::CircleU1)
      throw UnsupportedError("two-point functions: Z_n or truncated U(1) only");
    for (const auto& e : t.entries) {
      labels.push_back(e.label);
      casimir.push_back(e.casimir);
    }
  }
  int index(int label) const {
    if (G.kind == GroupKind::CyclicZn) label = ((label % G.order()) + G.order()) % G.order();
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : int(it - labels.begin());
  }
  int size() const { return int(labels.size()); }
};

}  // namespace

TwoPointResult two_point(const TwoPointSpec& s) {
  if (!(s.beta0 > 0)) throw DomainError("two_point: beta0 must be positive");
  if (!(s.tau <= s.tau2)) throw ContractError("two_point: tau must not exceed tau2");
  ModeSpace M(s.group);
  int ip = M.index(s.pi), ip2 = M.index(s.pi2);
  if (ip < 0 || ip2 < 0) throw ContractError("two_point: irrep label outside the table");
  double d = s.tau2 - s.tau;
  TwoPointResult r;
  r.thermo = s.pi == s.pi2 ? std::exp(-0.5 * s.beta0 * M.casimir[ip] * d) : 0.0;
  if (std::isinf(s.L)) {
    r.fusion = r.transfer = r.thermo;
    r.partition = INFINITY;
    return r;
  }
  if (s.tau2 > s.L) throw ContractError("two_point: tau2 beyond L");

  // Fusion series over pairs (a, b) with pi in a (x) b.
  auto t = irreps(s.group);
  double num = 0.0, Z = 0.0;
  if (s.pi == s.pi2) {
    for (std::size_t a = 0; a < t.entries.size(); ++a)
      for (std::size_t b = 0; b < t.entries.size(); ++b) {
        int N = fusion_multiplicity(t, s.pi, t.entries[a].label, t.entries[b].label);
        if (N == 0) continue;
        double dd = double(t.entries[a].dim) * t.entries[b].dim / (double(t.entries[ip].dim) * t.entries[ip].dim);
        num += dd * N * std::exp(-0.5 * s.beta0 * (t.entries[a].casimir * d + t.entries[b].casimir * (s.L - d)));
        ++r.terms;
      }
  }
  for (double c : M.casimir) Z += std::exp(-0.5 * s.beta0 * c * s.L);
  r.fusion = num / Z;

  // Transfer trace Tr(T(tau) M_pi^* T(d) M_pi2 T(L - tau2)) / Tr T(L).
  int n = M.size();
  auto T = [&](double len) {
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = std::exp(-0.5 * s.beta0 * M.casimir[i] * len);
    return m;
  };
  auto shift = [&](int label) {
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      int j = M.index(M.labels[i] + label);
      if (j >= 0) m(j, i) = 1.0;
    }
    return m;
  };
  Mat TL = T(s.L);
  r.partition = TL.trace().real();
  Mat prod = T(s.tau) * shift(s.pi).adjoint() * T(d) * shift(s.pi2) * T(s.L - s.tau2);
  r.transfer = prod.trace().real() / r.partition;
  return r;
}

double rotation_invariance_residual(const TwoPointSpec& spec, int shifts) {
  if (std::isinf(spec.L)) return 0.0;
  double room = spec.L - spec.tau2;
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < shifts; ++i) {
    TwoPointSpec s = spec;
    double off = shifts > 1 ? room * i / (shifts - 1) : 0.0;
    s.tau += off;
    s.tau2 += off;
    double v = two_point(s).transfer;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

CovarianceKind parse_covariance_kind(const std::string& s) {
  if (s == "wiener") return CovarianceKind::Wiener;
  if (s == "ou") return CovarianceKind::OrnsteinUhlenbeck;
  if (s == "ising1d" || s == "ising") return CovarianceKind::Ising1d;
  throw ConfigError("unknown covariance kind '" + s + "' (wiener | ou | ising1d)");
}

double closed_form_covariance(CovarianceKind kind, double beta0, double L, double tau, double tau2) {
  double d = tau2 - tau;
  switch (kind) {
    case CovarianceKind::Wiener: return beta0 * std::min(tau, tau2);
    case CovarianceKind::OrnsteinUhlenbeck:
      return (std::exp(-2.0 * beta0 * d) + std::exp(-2.0 * beta0 * (L - d))) / (2.0 * -std::expm1(-2.0 * beta0 * L));
    case CovarianceKind::Ising1d:
      return (std::exp(-beta0 * d) + std::exp(-beta0 * (L - d))) / -std::expm1(-2.0 * beta0 * L);
  }
  return 0.0;
}

double ising_transfer_covariance(double beta0, double L, double tau, double tau2) {
  double d = tau2 - tau;
  return (std::exp(-beta0 * d) + std::exp(-beta0 * (L - d))) / (1.0 + std::exp(-beta0 * L));
}

std::vector<SupportProxyRow> support_proxy(double beta0, int level_min, int level_max) {
  // E[phi^2] = pi^2/3 + sum_{n != 0} e^{-t n^2 / 2} 2 (-1)^n / n^2 for phi in (-pi, pi]
  std::vector<SupportProxyRow> rows;
  for (int N = level_min; N <= level_max; ++N) {
    double t = std::ldexp(beta0, -N);
    long nmax = long(std::sqrt(2.0 * 45.0 / t)) + 2;
    double s = kPi * kPi / 3.0;
    for (long n = 1; n <= nmax; ++n) s += 2.0 * 2.0 * ((n % 2) ? -1.0 : 1.0) * std::exp(-0.5 * t * n * n) / (double(n) * n);
    rows.push_back({N, s, kPi * kPi / 3.0});
  }
  return rows;
}

}  // namespace hlgt
