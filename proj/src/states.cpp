#include "hlgt/states.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hlgt/heat_kernel.hpp"

namespace hlgt {

InhomogeneousTable InhomogeneousTable::from_functions(int max_level, const std::function<double(const Dyadic&)>& bl,
                                                      const std::function<double(const Dyadic&)>& br) {
  InhomogeneousTable t;
  t.max_level = max_level;
  std::int64_t n = std::int64_t(1) << max_level;
  for (std::int64_t k = 0; k < n; ++k) t.left[Dyadic::make(k, max_level)] = bl(Dyadic::make(k, max_level));
  for (std::int64_t k = 1; k <= n; ++k) t.right[Dyadic::make(k, max_level)] = br(Dyadic::make(k, max_level));
  return t;
}

double InhomogeneousTable::beta(const Edge& e) const {
  const auto& m = e.orient == Orient::Left ? left : right;
  const Dyadic& key = e.orient == Orient::Left ? e.lo : e.hi;
  auto it = m.find(key);
  if (it == m.end())
    throw ContractError(std::string("inhomogeneous table has no beta_{") + key.to_string() + "," +
                        orient_char(e.orient) + "} (max level " + std::to_string(max_level) + ")");
  return it->second;
}

StateFamily StateFamily::heat(const GroupId& G, double beta) {
  if (!(beta > 0)) throw DomainError("beta must be positive");
  StateFamily f;
  f.kind = FamilyKind::HeatKernel;
  f.group = G;
  f.beta = beta;
  return f;
}

StateFamily StateFamily::vacuum(const GroupId& G) {
  StateFamily f;
  f.kind = FamilyKind::Vacuum;
  f.group = G;
  return f;
}

StateFamily StateFamily::dual(const GroupId& G, double beta0) {
  if (!(beta0 > 0)) throw DomainError("beta0 must be positive");
  StateFamily f;
  f.kind = FamilyKind::DualHeatKernel;
  f.group = G;
  f.beta0 = beta0;
  return f;
}

StateFamily StateFamily::inhomogeneous(const GroupId& G, InhomogeneousTable t) {
  StateFamily f;
  f.kind = FamilyKind::Inhomogeneous;
  f.group = G;
  f.table = std::move(t);
  return f;
}

double StateFamily::edge_beta(const Edge& e, double L) const {
  if (beta_rule) return beta_rule(e, L);
  switch (kind) {
    case FamilyKind::HeatKernel: return beta;
    case FamilyKind::Inhomogeneous: return table.beta(e);
    case FamilyKind::DualHeatKernel: return beta0 * (e.hi - e.lo).to_double() * L;
    case FamilyKind::Vacuum: return 0.0;
  }
  return 0.0;
}

std::string StateFamily::name() const {
  switch (kind) {
    case FamilyKind::HeatKernel: return "heat";
    case FamilyKind::Inhomogeneous: return "inhom";
    case FamilyKind::DualHeatKernel: return "dual";
    case FamilyKind::Vacuum: return "vacuum";
  }
  return "?";
}

double DensityKernel::entry(const std::vector<int>& k, const std::vector<int>& g, const FiniteGroup& F) const {
  double v = 1.0;
  for (std::size_t e = 0; e < g.size(); ++e) {
    if (family.multiplicative()) {
      if (k[e] != g[e]) return 0.0;
      v *= factor[e][g[e]] / F.n;
    } else {
      v *= factor[e][F.mul(k[e], F.inv(g[e]))] / F.n;
    }
  }
  return v;
}

DensityKernel density_at_level(const StateFamily& fam, const OrientedLattice& lat) {
  DensityKernel d{fam, lat, {}, {}};
  for (const auto& e : lat.edges) d.betas.push_back(fam.edge_beta(e, lat.L));
  if (fam.group.is_finite()) {
    int n = fam.group.order();
    for (double b : d.betas) {
      std::vector<double> f(n, 1.0);
      if (fam.kind != FamilyKind::Vacuum) {
        f = heat_kernel_table(fam.group, b);
        if (!fam.multiplicative()) {
          double r1 = f[0];
          for (auto& x : f) x /= r1;
        }
      }
      d.factor.push_back(std::move(f));
    }
  }
  return d;
}

Mat density_matrix(const DensityKernel& d) {
  if (!d.family.group.is_finite()) throw UnsupportedError("dense density needs a finite backend");
  check_guardrail(d.family.group.order(), d.lattice.size());
  ConfigSpace S(d.family.group, d.lattice.size());
  Mat T(S.dim, S.dim);
  for (long k = 0; k < S.dim; ++k)
    for (long g = 0; g < S.dim; ++g) T(k, g) = d.entry(S.decode(k), S.decode(g), S.G);
  return T;
}

cplx evaluate(const StateFamily& fam, const OrientedLattice& lat, const Mat& a) {
  Mat T = density_matrix(density_at_level(fam, lat));
  if (a.rows() != T.rows() || a.cols() != T.cols()) throw ContractError("evaluate: operator does not match lattice");
  return (T * a).trace();
}

cplx evaluate(const StateFamily& fam, const OrientedLattice& lat, const ConvolutionKernel& F) {
  if (F.edges != lat.size()) throw ContractError("evaluate: kernel does not match lattice");
  return evaluate(fam, lat, kernel_to_matrix(F));
}

cplx evaluate_multiplication(const StateFamily& fam, const OrientedLattice& lat,
                             const std::function<cplx(const std::vector<GroupValue>&)>& f) {
  const GroupId& G = fam.group;
  auto d = density_at_level(fam, lat);
  int E = lat.size();
  if (G.is_finite()) {
    ConfigSpace S(G, E);
    cplx acc = 0.0;
    std::vector<GroupValue> vals(E);
    for (long i = 0; i < S.dim; ++i) {
      auto g = S.decode(i);
      for (int e = 0; e < E; ++e) vals[e] = GroupValue::integer(g[e]);
      acc += d.entry(g, g, S.G) * f(vals);
    }
    return acc;
  }
  if (G.kind != GroupKind::CircleU1) throw UnsupportedError("evaluate_multiplication: finite or U(1) backends only");
  if (E > 2) throw ResourceError("evaluate_multiplication on U(1) supports at most 2 edges");
  int nodes = 256;
  std::vector<std::vector<double>> w(E, std::vector<double>(nodes, 1.0));
  std::vector<GroupValue> grid(nodes);
  for (int i = 0; i < nodes; ++i) grid[i] = GroupValue::angle(-kPi + 2.0 * kPi * (i + 1) / nodes);
  if (fam.multiplicative())
    for (int e = 0; e < E; ++e)
      for (int i = 0; i < nodes; ++i) w[e][i] = heat_kernel_eval({G, d.betas[e]}, grid[i]);
  cplx acc = 0.0;
  long total = 1;
  for (int e = 0; e < E; ++e) total *= nodes;
  std::vector<GroupValue> vals(E);
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    double weight = 1.0;
    for (int e = E - 1; e >= 0; --e) {
      int i = int(r % nodes);
      r /= nodes;
      vals[e] = grid[i];
      weight *= w[e][i];
    }
    acc += weight * f(vals);
  }
  return acc / double(total);
}

cplx evaluate_dual_Z(const std::vector<double>& betas, const ZKernel& F, long M) {
  int E = int(betas.size());
  std::vector<std::vector<double>> rho(E);
  for (int e = 0; e < E; ++e) {
    auto half = dual_heat_kernel_Z_range(betas[e], M);
    rho[e].resize(2 * M + 1);
    for (long m = -M; m <= M; ++m) rho[e][m + M] = half[std::labs(m)];
  }
  std::vector<long> zero(E, 0), m(E, -M);
  cplx acc = 0.0;
  while (true) {
    double w = 1.0;
    for (int e = 0; e < E; ++e) w *= rho[e][m[e] + M];
    acc += w * F(zero, m);
    int e = E - 1;
    while (e >= 0 && m[e] == M) m[e--] = -M;
    if (e < 0) break;
    ++m[e];
  }
  return acc;
}

CoherenceReport coherence_residual(const StateFamily& fam, const OrientedLattice& coarse, const OrientedLattice& fine,
                                   std::uint64_t seed) {
  if (!fam.group.is_finite()) throw UnsupportedError("coherence_residual: finite backend required");
  auto w = is_refinement(coarse, fine);
  if (!w) throw ContractError("coherence_residual: coarse lattice does not refine to fine lattice");
  ConfigSpace C(fam.group, coarse.size()), Fs(fam.group, fine.size());
  if (double(Fs.dim) * double(C.dim) > 5e8) throw ResourceError("coherence_residual: fine level too large");
  auto dc = density_at_level(fam, coarse), df = density_at_level(fam, fine);
  const FiniteGroup& F = Fs.G;
  std::vector<bool> is_carrier(fine.size(), false);
  for (int c = 0; c < w->coarse_edges; ++c) is_carrier[w->carrier(c)] = true;

  // R[y, x] = sum_{g': p(g') = x} T_fine[k'(g', y), g'], the coefficient of a[x, y]
  // in omega_fine(alpha(a)).
  Mat R = Mat::Zero(C.dim, C.dim);
  std::vector<std::vector<int>> coarse_cfg(C.dim);
  for (long yi = 0; yi < C.dim; ++yi) coarse_cfg[yi] = C.decode(yi);
  std::vector<int> p, B;
  for (long gi = 0; gi < Fs.dim; ++gi) {
    auto g = Fs.decode(gi);
    witness_project(F, *w, g, p, B);
    double rest = 1.0;
    for (int e = 0; e < fine.size(); ++e)
      if (!is_carrier[e]) rest *= (df.family.multiplicative() ? df.factor[e][g[e]] : df.factor[e][0]) / F.n;
    if (rest == 0.0) continue;
    long xi = C.encode(p);
    for (long yi = 0; yi < C.dim; ++yi) {
      const auto& y = coarse_cfg[yi];
      double v = rest;
      for (int c = 0; c < w->coarse_edges && v != 0.0; ++c) {
        int e = w->carrier(c);
        int k = F.mul(y[c], F.inv(B[c]));
        if (df.family.multiplicative())
          v *= (k == g[e]) ? df.factor[e][g[e]] / F.n : 0.0;
        else
          v *= df.factor[e][F.mul(k, F.inv(g[e]))] / F.n;
      }
      R(yi, xi) += v;
    }
  }
  Mat Tc(C.dim, C.dim);
  for (long yi = 0; yi < C.dim; ++yi)
    for (long xi = 0; xi < C.dim; ++xi) Tc(yi, xi) = dc.entry(coarse_cfg[yi], coarse_cfg[xi], C.G);

  CoherenceReport rep;
  if (C.dim <= 256) {
    rep.residual = max_abs(R - Tc);
    rep.spanning_set = "matrix-units";
    rep.spanning_size = C.dim * C.dim;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  rep.spanning_set = "random-200";
  rep.spanning_size = 200;
  for (int s = 0; s < 200; ++s) {
    Mat a(C.dim, C.dim);
    for (long i = 0; i < a.size(); ++i) a.data()[i] = cplx(nd(rng), nd(rng));
    rep.residual = std::max(rep.residual, std::abs(((R - Tc) * a).trace()));
  }
  return rep;
}

double coherence_residual_u1(const StateFamily& fam, const OrientedLattice& coarse, const OrientedLattice& fine) {
  const GroupId& G = fam.group;
  if (G.kind != GroupKind::CircleU1) throw UnsupportedError("coherence_residual_u1: U(1) backend required");
  if (fam.multiplicative()) throw UnsupportedError("coherence_residual_u1: convolution-type families only");
  auto w = is_refinement(coarse, fine);
  if (!w) throw ContractError("coherence_residual_u1: not a refinement");
  const int K = G.cutoff, modes = 2 * K + 1;
  double cdim_d = std::pow(double(modes), coarse.size());
  if (cdim_d > 3e7) throw ResourceError("coherence_residual_u1: too many coarse Fourier modes");

  // lambda(rho_beta)/rho_beta(1) is diagonal in the Fourier basis with weights
  // e^{-beta n^2 / 2}/Z. The diagonal of alpha(E_mm) fixes the carrier modes and
  // leaves every other fine mode free, so the fine sum factorizes edge by edge.
  auto weights = [&](double beta) {
    std::vector<double> v(modes, 0.0);
    if (fam.kind == FamilyKind::Vacuum) {
      v[K] = 1.0;
      return v;
    }
    double z = 0.0;
    for (int n = -K; n <= K; ++n) z += v[n + K] = std::exp(-0.5 * beta * G.casimir_scale * n * n);
    for (auto& x : v) x /= z;
    return v;
  };
  auto dc = density_at_level(fam, coarse), df = density_at_level(fam, fine);
  std::vector<std::vector<double>> wc, wf;
  for (double b : dc.betas) wc.push_back(weights(b));
  for (double b : df.betas) wf.push_back(weights(b));

  std::vector<bool> is_carrier(fine.size(), false);
  for (int c = 0; c < coarse.size(); ++c) is_carrier[w->carrier(c)] = true;
  double free_mass = 1.0;
  for (int e = 0; e < fine.size(); ++e)
    if (!is_carrier[e]) {
      double s = 0.0;
      for (double x : wf[e]) s += x;
      free_mass *= s;
    }

  long cdim = long(cdim_d);
  std::vector<int> m(coarse.size(), 0);
  double worst = 0.0;
  for (long ci = 0; ci < cdim; ++ci) {
    long r = ci;
    double target = 1.0, got = free_mass;
    for (int c = coarse.size() - 1; c >= 0; --c) {
      int mode = int(r % modes);
      r /= modes;
      target *= wc[c][mode];
      got *= wf[w->carrier(c)][mode];
    }
    worst = std::max(worst, std::abs(got - target));
  }
  return worst;
}

double coherence_residual_dual_Z(const StateFamily& fam, const OrientedLattice& coarse, const OrientedLattice& fine,
                                 long M) {
  auto w = is_refinement(coarse, fine);
  if (!w) throw ContractError("coherence_residual_dual_Z: not a refinement");
  if (std::pow(2.0 * M + 1, fine.size()) > 3e7) throw ResourceError("coherence_residual_dual_Z: fine level too large");
  auto dc = density_at_level(fam, coarse), df = density_at_level(fam, fine);
  const long X = 4, xw = 2 * X + 1;
  std::vector<std::vector<double>> rho(fine.size());
  for (int e = 0; e < fine.size(); ++e) {
    auto half = dual_heat_kernel_Z_range(df.betas[e], M);
    for (long m = -M; m <= M; ++m) rho[e].push_back(half[std::labs(m)]);
  }
  long cdim = 1;
  for (int c = 0; c < coarse.size(); ++c) cdim *= xw;
  std::vector<double> acc(cdim, 0.0);
  std::vector<long> m(fine.size(), -M);
  while (true) {
    long ci = 0;
    bool inside = true;
    for (int c = 0; c < coarse.size() && inside; ++c) {
      long p = 0;  // holonomy along the path; Z is abelian and written additively
      for (const auto& st : w->paths[c]) p += st.sign * m[st.fine];
      inside = std::labs(p) <= X;
      ci = ci * xw + (p + X);
    }
    if (inside) {
      double v = 1.0;
      for (int e = 0; e < fine.size(); ++e) v *= rho[e][m[e] + M];
      acc[ci] += v;
    }
    int e = fine.size() - 1;
    while (e >= 0 && m[e] == M) m[e--] = -M;
    if (e < 0) break;
    ++m[e];
  }
  double worst = 0.0;
  for (long ci = 0; ci < cdim; ++ci) {
    long r = ci;
    double target = 1.0;
    for (int c = coarse.size() - 1; c >= 0; --c) {
      target *= dual_heat_kernel_Z(dc.betas[c], r % xw - X);
      r /= xw;
    }
    worst = std::max(worst, std::abs(acc[ci] - target));
  }
  return worst;
}

namespace {

// Single-edge kernel F(h, g) of the density factor.
std::function<double(int, int)> edge_kernel(const StateFamily& fam, double beta) {
  const GroupId& G = fam.group;
  int n = G.order();
  std::vector<double> f(n, 1.0);
  if (fam.kind != FamilyKind::Vacuum) f = heat_kernel_table(G, beta);
  if (fam.multiplicative()) return [f, n](int h, int g) { return h == 0 ? f[g] : 0.0; };  // delta_1(h) rho(g)/|G|
  double r1 = f[0];
  return [f, r1](int h, int) { return f[h] / r1; };
}

}  // namespace

IntegralIdentityResiduals integral_identity_residuals(const StateFamily& fam) {
  if (!fam.group.is_finite()) throw UnsupportedError("integral identities: finite backend required");
  FiniteGroup F(fam.group);
  OrientedLattice coarse = cofinal_lattice(0), fine = cofinal_lattice(1);
  auto Fc = edge_kernel(fam, fam.edge_beta(coarse.edges[0], coarse.L));
  auto F1 = edge_kernel(fam, fam.edge_beta(fine.edges[0], fine.L));  // carrier
  auto F2 = edge_kernel(fam, fam.edge_beta(fine.edges[1], fine.L));
  IntegralIdentityResiduals r;
  for (int h = 0; h < F.n; ++h)
    for (int g = 0; g < F.n; ++g) {
      double comp = 0.0, del = 0.0;
      for (int g1 = 0; g1 < F.n; ++g1) {
        comp += F1(h, F.mul(g, F.inv(g1))) * F2(0, g1);
        del += F1(h, g) * F2(0, g1);
      }
      r.composition = std::max(r.composition, std::abs(comp / F.n - Fc(h, g)));
      r.deletion = std::max(r.deletion, std::abs(del / F.n - F1(h, g)));
    }
  return r;
}

double inversion_residual(const GroupId& G, const std::function<cplx(int h, int g)>& Fk) {
  FiniteGroup F(G);
  double worst = 0.0;
  for (int h = 0; h < F.n; ++h)
    for (int g = 0; g < F.n; ++g) {
      int gi = F.inv(g);
      int conj = F.mul(F.mul(gi, h), g);  // alpha_{g^{-1}}(h)
      worst = std::max(worst, std::abs(Fk(F.inv(conj), gi) - Fk(h, g)));
    }
  return worst;
}

double inversion_residual(const StateFamily& fam, const OrientedLattice& lat, int edge) {
  auto k = edge_kernel(fam, fam.edge_beta(lat.edges.at(edge), lat.L));
  return inversion_residual(fam.group, [&](int h, int g) { return cplx(k(h, g)); });
}

double gauge_invariance_residual(const StateFamily& fam, const OrientedLattice& lat, int n_samples,
                                 std::uint64_t seed, bool periodic) {
  Mat T = density_matrix(density_at_level(fam, lat));
  std::mt19937_64 rng(seed);
  int n = fam.group.order();
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::size_t nv = periodic ? lat.size() : lat.size() + 1;
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::vector<int> v(nv);
    for (auto& x : v) x = pick(rng);
    Mat U = gauge_unitary(fam.group, lat, v, periodic);
    // omega(Ad_U(E_xy)) - omega(E_xy) over all matrix units
    worst = std::max(worst, max_abs(U.adjoint() * T * U - T));
  }
  return worst;
}

DualGaugeResult dual_gauge_check(double beta0, const OrientedLattice& lat, long M, std::uint64_t seed) {
  auto fam = StateFamily::dual(GroupId::integers(int(M)), beta0);
  std::vector<double> betas;
  for (const auto& e : lat.edges) betas.push_back(fam.edge_beta(e, lat.L));
  int E = lat.size();
  DualGaugeResult r;

  // Configuration shifts m_i -> m_i - k_{i-1} + k_i. Witness: projection onto the zero
  // configuration with k jumping at the first interior vertex (or at the end for one edge).
  ZKernel proj = [](const std::vector<long>& n, const std::vector<long>& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
      if (n[i] != 0 || m[i] != 0) return cplx(0.0);
    return cplx(1.0);
  };
  std::vector<long> k(E + 1, 0);
  k[1] = 1;
  ZKernel shifted = [&](const std::vector<long>& n, const std::vector<long>& m) {
    std::vector<long> mm(m);
    for (int i = 0; i < E; ++i) mm[i] = m[i] - k[i] + k[i + 1];
    return proj(n, mm);
  };
  r.z_type = std::abs(evaluate_dual_Z(betas, shifted, M) - evaluate_dual_Z(betas, proj, M));

  // Momentum phases (g_{i-1}^{-1} g_last)^{n_i} on random kernels.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int s = 0; s < 20; ++s) {
    std::vector<double> th(E), ph(E), gv(E + 1);
    for (auto& x : th) x = ang(rng);
    for (auto& x : ph) x = ang(rng);
    for (auto& x : gv) x = ang(rng);
    ZKernel Fa = [&](const std::vector<long>& n, const std::vector<long>& m) {
      cplx v = 1.0;
      for (int i = 0; i < E; ++i)
        v *= std::exp(-0.1 * double(m[i] * m[i])) * (1.0 + 0.5 * std::polar(1.0, th[i] * m[i] + ph[i] * n[i]));
      return v;
    };
    ZKernel Fg = [&](const std::vector<long>& n, const std::vector<long>& m) {
      cplx phase = 1.0;
      for (int i = 0; i < E; ++i) phase *= std::polar(1.0, double(n[i]) * (gv[E] - gv[i]));
      return phase * Fa(n, m);
    };
    r.u1_type = std::max(r.u1_type, std::abs(evaluate_dual_Z(betas, Fg, M) - evaluate_dual_Z(betas, Fa, M)));
  }
  return r;
}

}  // namespace hlgt
