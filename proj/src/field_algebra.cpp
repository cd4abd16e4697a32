#include "hlgt/field_algebra.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <cmath>

namespace hlgt {

ConfigSpace::ConfigSpace(const GroupId& g, int e) : G(g), edges(e), dim(1) {
  for (int i = 0; i < edges; ++i) dim *= G.n;
}

std::vector<int> ConfigSpace::decode(long idx) const {
  std::vector<int> c(edges);
  for (int e = edges - 1; e >= 0; --e) {
    c[e] = int(idx % G.n);
    idx /= G.n;
  }
  return c;
}

long ConfigSpace::encode(const std::vector<int>& cfg) const {
  long idx = 0;
  for (int v : cfg) idx = idx * G.n + v;
  return idx;
}

void check_guardrail(int order, int edges) {
  double size = std::pow(double(order), 2.0 * edges);
  if (size > double(kDenseGuardrail))
    throw ResourceError("dense realization needs |G|^{2E} = " + std::to_string(long(size)) +
                        " entries, above the guardrail " + std::to_string(kDenseGuardrail));
}

ConvolutionKernel ConvolutionKernel::from_function(
    const GroupId& G, int edges, const std::function<cplx(const std::vector<int>&, const std::vector<int>&)>& F) {
  check_guardrail(G.order(), edges);
  ConfigSpace S(G, edges);
  ConvolutionKernel k{G, edges, Mat(S.dim, S.dim)};
  for (long h = 0; h < S.dim; ++h)
    for (long g = 0; g < S.dim; ++g) k.data(h, g) = F(S.decode(h), S.decode(g));
  return k;
}

Mat kernel_to_matrix(const ConvolutionKernel& F) {
  check_guardrail(F.group.order(), F.edges);
  ConfigSpace S(F.group, F.edges);
  Mat m(S.dim, S.dim);
  double norm = double(S.dim);
  for (long gi = 0; gi < S.dim; ++gi) {
    auto g = S.decode(gi);
    for (long ki = 0; ki < S.dim; ++ki) {
      auto k = S.decode(ki);
      std::vector<int> h(F.edges);
      for (int e = 0; e < F.edges; ++e) h[e] = S.G.mul(g[e], S.G.inv(k[e]));
      m(gi, ki) = F.data(S.encode(h), gi) / norm;
    }
  }
  return m;
}

ConvolutionKernel matrix_to_kernel(const GroupId& G, int edges, const Mat& m) {
  ConfigSpace S(G, edges);
  if (m.rows() != S.dim || m.cols() != S.dim) throw ContractError("matrix_to_kernel: dimension mismatch");
  ConvolutionKernel k{G, edges, Mat(S.dim, S.dim)};
  for (long hi = 0; hi < S.dim; ++hi) {
    auto h = S.decode(hi);
    for (long gi = 0; gi < S.dim; ++gi) {
      auto g = S.decode(gi);
      std::vector<int> k_(edges);
      for (int e = 0; e < edges; ++e) k_[e] = S.G.mul(S.G.inv(h[e]), g[e]);
      k.data(hi, gi) = double(S.dim) * m(gi, S.encode(k_));
    }
  }
  return k;
}

ConvolutionKernel kernel_adjoint(const ConvolutionKernel& F) {
  ConfigSpace S(F.group, F.edges);
  ConvolutionKernel out{F.group, F.edges, Mat(S.dim, S.dim)};
  for (long hi = 0; hi < S.dim; ++hi) {
    auto h = S.decode(hi);
    std::vector<int> hinv(F.edges);
    for (int e = 0; e < F.edges; ++e) hinv[e] = S.G.inv(h[e]);
    for (long gi = 0; gi < S.dim; ++gi) {
      auto g = S.decode(gi);
      std::vector<int> hg(F.edges);
      for (int e = 0; e < F.edges; ++e) hg[e] = S.G.mul(hinv[e], g[e]);
      out.data(hi, gi) = std::conj(F.data(S.encode(hinv), S.encode(hg)));
    }
  }
  return out;
}

Mat multiplication_op(const GroupId& G, const std::function<cplx(int)>& f) {
  int n = G.order();
  Mat m = Mat::Zero(n, n);
  for (int g = 0; g < n; ++g) m(g, g) = f(g);
  return m;
}

Mat permutation_op(long dim, const std::function<long(long)>& image) {
  Mat m = Mat::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) m(image(i), i) = 1.0;
  return m;
}

Mat left_translation(const GroupId& G, int h) {
  FiniteGroup F(G);
  // (lambda_h psi)(g) = psi(h^{-1} g): e_k -> e_{h k}
  return permutation_op(F.n, [&](long k) { return long(F.mul(h, int(k))); });
}

RefineUnitaries refine_unitaries(const GroupId& G) {
  FiniteGroup F(G);
  ConfigSpace S(G, 2);
  RefineUnitaries u;
  // (U psi)(x) = psi(s(x)) with s a bijection  <=>  U e_y = e_{s^{-1}(y)}
  auto from_substitution = [&](auto s) {
    Mat m = Mat::Zero(S.dim, S.dim);
    for (long i = 0; i < S.dim; ++i) m(i, s(i)) = 1.0;
    return m;
  };
  u.U_L = from_substitution([&](long i) {
    auto c = S.decode(i);
    return S.encode({F.mul(c[0], c[1]), c[1]});
  });
  u.V_R = from_substitution([&](long i) {
    auto c = S.decode(i);
    return S.encode({c[0], F.mul(c[1], c[0])});
  });
  u.flip = from_substitution([&](long i) {
    auto c = S.decode(i);
    return S.encode({c[1], c[0]});
  });
  u.U_iota = Mat::Zero(F.n, F.n);
  for (int g = 0; g < F.n; ++g) u.U_iota(g, F.inv(g)) = 1.0;
  return u;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_all(const std::vector<Mat>& factors) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Mat identity_op(const GroupId& G, int edges) {
  ConfigSpace S(G, edges);
  return Mat::Identity(S.dim, S.dim);
}

Mat embed_single(const GroupId& G, int edges, int e, const Mat& a) {
  std::vector<Mat> f(edges, Mat::Identity(G.order(), G.order()));
  f[e] = a;
  return kron_all(f);
}

void witness_project(const FiniteGroup& F, const Witness& w, const std::vector<int>& g, std::vector<int>& p,
                     std::vector<int>& B) {
  p.resize(w.coarse_edges);
  B.resize(w.coarse_edges);
  for (int c = 0; c < w.coarse_edges; ++c) {
    const auto& path = w.paths[c];
    int b = 0;
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      int x = g[path[s].fine];
      b = F.mul(path[s].sign > 0 ? x : F.inv(x), b);
    }
    B[c] = b;
    p[c] = F.mul(g[path.back().fine], b);
  }
}

Mat alpha_refine(const GroupId& G, const Witness& w, const Mat& a) {
  check_guardrail(G.order(), w.fine_edges);
  ConfigSpace C(G, w.coarse_edges), Fs(G, w.fine_edges);
  if (a.rows() != C.dim || a.cols() != C.dim) throw ContractError("alpha_refine: operator does not match coarse lattice");
  const FiniteGroup& F = Fs.G;
  Mat out = Mat::Zero(Fs.dim, Fs.dim);
  std::vector<int> B(w.coarse_edges), p(w.coarse_edges);
  for (long gi = 0; gi < Fs.dim; ++gi) {
    auto g = Fs.decode(gi);
    witness_project(F, w, g, p, B);
    long pi = C.encode(p);
    for (long yi = 0; yi < C.dim; ++yi) {
      auto y = C.decode(yi);
      auto k = g;
      for (int c = 0; c < w.coarse_edges; ++c) k[w.carrier(c)] = F.mul(y[c], F.inv(B[c]));
      out(gi, Fs.encode(k)) = a(pi, yi);
    }
  }
  return out;
}

Mat alpha_refine(const GroupId& G, const OrientedLattice& coarse, const OrientedLattice& fine, const Mat& a) {
  auto w = is_refinement(coarse, fine);
  if (!w) throw ContractError("alpha_refine: " + coarse.pattern() + " does not refine to " + fine.pattern());
  return alpha_refine(G, *w, a);
}

Mat alpha_invert(const GroupId& G, int edges, int e, const Mat& a) {
  Mat U = embed_single(G, edges, e, refine_unitaries(G).U_iota);
  return U * a * U.adjoint();
}

Witness trivial_witness(const OrientedLattice& coarse, const OrientedLattice& fine) {
  Witness w;
  w.coarse_edges = coarse.size();
  w.fine_edges = fine.size();
  for (const auto& ce : coarse.edges) {
    int pick = -1;
    for (int f = 0; f < fine.size(); ++f) {
      const auto& fe = fine.edges[f];
      if (ce.orient == Orient::Left && fe.lo == ce.lo) pick = f;
      if (ce.orient == Orient::Right && fe.hi == ce.hi) pick = f;
    }
    if (pick < 0) throw ContractError("trivial_witness: fine lattice does not refine the partition");
    w.paths.push_back({{pick, 1}});
  }
  return w;
}

Mat alpha_triv(const GroupId& G, const OrientedLattice& coarse, const OrientedLattice& fine, const Mat& a) {
  return alpha_refine(G, trivial_witness(coarse, fine), a);
}

namespace {

std::vector<std::pair<int, int>> edge_endpoints(const OrientedLattice& lat, bool periodic) {
  // (target vertex, source vertex) per edge
  int nv = periodic ? lat.size() : lat.size() + 1;
  std::vector<std::pair<int, int>> out;
  for (int e = 0; e < lat.size(); ++e) {
    int lo = e, hi = (e + 1) % nv;
    out.push_back(lat.edges[e].orient == Orient::Left ? std::pair{lo, hi} : std::pair{hi, lo});
  }
  return out;
}

}  // namespace

Mat gauge_unitary(const GroupId& G, const OrientedLattice& lat, const std::vector<int>& vertex, bool periodic) {
  check_guardrail(G.order(), lat.size());
  ConfigSpace S(G, lat.size());
  std::size_t nv = periodic ? lat.size() : lat.size() + 1;
  if (vertex.size() != nv) throw ContractError("gauge tuple has wrong vertex count");
  auto ends = edge_endpoints(lat, periodic);
  return permutation_op(S.dim, [&](long i) {
    auto g = S.decode(i);
    for (int e = 0; e < lat.size(); ++e)
      g[e] = S.G.mul(S.G.mul(vertex[ends[e].first], g[e]), S.G.inv(vertex[ends[e].second]));
    return S.encode(g);
  });
}

Mat gauge_act(const GroupId& G, const OrientedLattice& lat, const std::vector<int>& vertex, const Mat& a,
              bool periodic) {
  Mat U = gauge_unitary(G, lat, vertex, periodic);
  return U * a * U.adjoint();
}

std::vector<int> restrict_gauge_tuple(const OrientedLattice& coarse, const OrientedLattice& fine,
                                      const std::vector<int>& fine_vertex) {
  auto fp = fine.points();
  std::vector<int> out;
  for (const auto& p : coarse.points()) {
    auto it = std::find(fp.begin(), fp.end(), p);
    if (it == fp.end()) throw ContractError("restrict_gauge_tuple: partitions not nested");
    out.push_back(fine_vertex.at(it - fp.begin()));
  }
  return out;
}

namespace {

// Fine-configuration keys (holonomy per coarse edge, then the non-carrier edges)
// and the inverse lookup; alpha acts on basis states through these.
struct WitnessKeys {
  std::vector<std::vector<int>> key;
  std::vector<std::vector<int>> rest;
  std::vector<long> coarse;  // encoded holonomy tuple
  std::map<std::vector<int>, long> index;
};

WitnessKeys witness_keys(const GroupId& G, const Witness& w) {
  ConfigSpace S(G, w.fine_edges);
  ConfigSpace C(G, w.coarse_edges);
  std::vector<bool> carrier(w.fine_edges, false);
  for (int c = 0; c < w.coarse_edges; ++c) carrier[w.carrier(c)] = true;
  WitnessKeys k;
  k.key.resize(S.dim);
  k.rest.resize(S.dim);
  k.coarse.resize(S.dim);
  for (long i = 0; i < S.dim; ++i) {
    auto g = S.decode(i);
    std::vector<int> p, B;
    witness_project(S.G, w, g, p, B);
    k.coarse[i] = C.encode(p);
    for (int e = 0; e < w.fine_edges; ++e)
      if (!carrier[e]) k.rest[i].push_back(g[e]);
    k.key[i] = p;
    k.key[i].insert(k.key[i].end(), k.rest[i].begin(), k.rest[i].end());
    k.index[k.key[i]] = i;
  }
  return k;
}

// Image of a basis permutation of a small unitary; throws if it is not one.
Permutation as_permutation(const Mat& m) {
  Permutation p(m.cols(), -1);
  for (long j = 0; j < m.cols(); ++j)
    for (long i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j) - 1.0) < 1e-12)
        p[j] = i;
      else if (std::abs(m(i, j)) > 1e-12)
        throw ContractError("as_permutation: not a permutation matrix");
    }
  for (long v : p)
    if (v < 0) throw ContractError("as_permutation: not a permutation matrix");
  return p;
}

// Layer of disentanglers for splitting the flagged edges of `cur` outward,
// acting on the configurations of the split lattice.
Permutation disentangler_layer(const GroupId& G, const OrientedLattice& cur, const std::vector<bool>& split) {
  auto ru = refine_unitaries(G);
  Permutation pl = as_permutation(ru.U_L), pr = as_permutation(ru.V_R);
  int n = G.order(), fine = 0;
  for (int e = 0; e < cur.size(); ++e) fine += split[e] ? 2 : 1;
  ConfigSpace S(G, fine);
  Permutation out(S.dim);
  for (long i = 0; i < S.dim; ++i) {
    auto g = S.decode(i);
    int pos = 0;
    for (int e = 0; e < cur.size(); ++e) {
      if (!split[e]) {
        ++pos;
        continue;
      }
      const Permutation& p = cur.edges[e].orient == Orient::Left ? pl : pr;
      long img = p[long(g[pos]) * n + g[pos + 1]];
      g[pos] = int(img / n);
      g[pos + 1] = int(img % n);
      pos += 2;
    }
    out[i] = S.encode(g);
  }
  return out;
}

OrientedLattice split_edges(const OrientedLattice& cur, const std::vector<bool>& split) {
  std::vector<Dyadic> pts;
  for (int e = 0; e < cur.size(); ++e)
    if (split[e]) pts.push_back((cur.edges[e].lo + cur.edges[e].hi).scaled_pow2(-1));
  return refine_to(cur, pts, SplitPolicy::Outward);
}

// (a o b)[x] = a[b[x]], the permutation of the operator product U_a U_b.
Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation c(b.size());
  for (std::size_t x = 0; x < b.size(); ++x) c[x] = a[b[x]];
  return c;
}

Permutation eta_permutation_to(const GroupId& G, const OrientedLattice& lat) {
  OrientedLattice cur = cofinal_lattice(0, Orient::Left, lat.L);
  Permutation U = identity_permutation(G.order());
  auto target = lat.points();
  while (cur.size() < lat.size()) {
    std::vector<bool> split(cur.size(), false);
    bool any = false;
    for (int e = 0; e < cur.size(); ++e) {
      for (const auto& p : target)
        if (cur.edges[e].lo < p && p < cur.edges[e].hi) split[e] = true;
      any = any || split[e];
    }
    if (!any) break;
    OrientedLattice next = split_edges(cur, split);
    U = compose(alpha_permutation(G, trivial_witness(cur, next), U), disentangler_layer(G, cur, split));
    cur = next;
  }
  if (!(cur == lat))
    throw ContractError("eta_unitary_lattice: " + lat.pattern() + " is not reached by outward bisection");
  return U;
}

// max over coarse matrix units a of |V alpha_a(a) V^* - alpha_b(U a U^*)|, all
// operators being 0/1 matrices so each side is a set of nonzero positions.
double permutation_intertwining_residual(const GroupId& G, const Permutation& U, const Permutation& V,
                                         const Witness& wa, const Witness& wb) {
  WitnessKeys ka = witness_keys(G, wa), kb = witness_keys(G, wb);
  long coarse = long(U.size());
  std::vector<std::vector<long>> by_a(coarse), by_b(coarse);
  for (long x = 0; x < long(V.size()); ++x) {
    by_a[ka.coarse[x]].push_back(x);
    by_b[kb.coarse[x]].push_back(x);
  }
  for (long i = 0; i < coarse; ++i)
    for (long j = 0; j < coarse; ++j) {
      std::set<std::pair<long, long>> lhs, rhs;
      for (long g : by_a[i])
        for (long k : by_a[j])
          if (ka.rest[g] == ka.rest[k]) lhs.insert({V[g], V[k]});
      for (long g : by_b[U[i]])
        for (long k : by_b[U[j]])
          if (kb.rest[g] == kb.rest[k]) rhs.insert({g, k});
      if (lhs != rhs) return 1.0;
    }
  return 0.0;
}

}  // namespace

Permutation identity_permutation(long dim) {
  Permutation p(dim);
  for (long i = 0; i < dim; ++i) p[i] = i;
  return p;
}

Mat permutation_matrix(const Permutation& p) {
  return permutation_op(long(p.size()), [&](long i) { return p[i]; });
}

Permutation alpha_permutation(const GroupId& G, const Witness& w, const Permutation& s) {
  WitnessKeys k = witness_keys(G, w);
  ConfigSpace C(G, w.coarse_edges);
  if (long(s.size()) != C.dim) throw ContractError("alpha_permutation: size does not match the coarse lattice");
  Permutation out(k.key.size());
  for (long x = 0; x < long(k.key.size()); ++x) {
    std::vector<int> key = C.decode(s[k.coarse[x]]);
    key.insert(key.end(), k.rest[x].begin(), k.rest[x].end());
    out[x] = k.index.at(key);
  }
  return out;
}

Permutation eta_permutation(const GroupId& G, int N) { return eta_permutation_to(G, cofinal_lattice(N)); }

Mat eta_unitary(const GroupId& G, int N) {
  check_guardrail(G.order(), 1 << N);
  return permutation_matrix(eta_permutation(G, N));
}

Mat eta_unitary_lattice(const GroupId& G, const OrientedLattice& lat) {
  check_guardrail(G.order(), lat.size());
  return permutation_matrix(eta_permutation_to(G, lat));
}

Permutation conjugating_permutation(const GroupId& G, const Witness& wa, const Witness& wb,
                                    const std::vector<bool>& invert_rest) {
  if (wa.coarse_edges != wb.coarse_edges || wa.fine_edges != wb.fine_edges)
    throw ContractError("conjugating_layer: witnesses of different shape");
  FiniteGroup F(G);
  WitnessKeys ka = witness_keys(G, wa), kb = witness_keys(G, wb);
  Permutation p(ka.key.size());
  for (long i = 0; i < long(p.size()); ++i) {
    std::vector<int> key = ka.key[i];
    for (std::size_t r = 0; r < invert_rest.size(); ++r)
      if (invert_rest[r]) key[wa.coarse_edges + r] = F.inv(key[wa.coarse_edges + r]);
    p[i] = kb.index.at(key);
  }
  return p;
}

Mat conjugating_layer(const GroupId& G, const Witness& wa, const Witness& wb, const std::vector<bool>& invert_rest) {
  check_guardrail(G.order(), wa.fine_edges);
  return permutation_matrix(conjugating_permutation(G, wa, wb, invert_rest));
}

std::vector<bool> reversed_deleted_edges(const OrientedLattice& fa, const Witness& wa, const OrientedLattice& fb,
                                         const Witness& wb) {
  auto deleted = [](const OrientedLattice& f, const Witness& w) {
    std::vector<bool> carrier(w.fine_edges, false);
    for (int c = 0; c < w.coarse_edges; ++c) carrier[w.carrier(c)] = true;
    std::vector<Orient> o;
    for (int e = 0; e < w.fine_edges; ++e)
      if (!carrier[e]) o.push_back(f.edges[e].orient);
    return o;
  };
  auto oa = deleted(fa, wa), ob = deleted(fb, wb);
  if (oa.size() != ob.size()) throw ContractError("reversed_deleted_edges: different numbers of deleted edges");
  std::vector<bool> r(oa.size());
  for (std::size_t i = 0; i < oa.size(); ++i) r[i] = oa[i] != ob[i];
  return r;
}

Permutation zeta_permutation(const GroupId& G, int N) {
  Permutation U = identity_permutation(G.order());
  for (int k = 0; k < N; ++k) {
    // Below a Left coarse edge this is 1 (x) U_iota; Right coarse edges carry their
    // parent on the right child and need a different pair unitary.
    OrientedLattice ca = cofinal_lattice(k), fa = cofinal_lattice(k + 1);
    OrientedLattice cb = uniform_lattice(k), fb = uniform_lattice(k + 1);
    Witness wa = *is_refinement(ca, fa), wb = *is_refinement(cb, fb);
    Permutation layer = conjugating_permutation(G, wa, wb, reversed_deleted_edges(fa, wa, fb, wb));
    U = compose(alpha_permutation(G, wb, U), layer);
  }
  return U;
}

Mat zeta_unitary(const GroupId& G, int N) {
  check_guardrail(G.order(), 1 << N);
  return permutation_matrix(zeta_permutation(G, N));
}

double eta_intertwining_residual(const GroupId& G, int N) {
  OrientedLattice c = cofinal_lattice(N), f = cofinal_lattice(N + 1);
  return permutation_intertwining_residual(G, eta_permutation(G, N), eta_permutation(G, N + 1), *is_refinement(c, f),
                                           trivial_witness(c, f));
}

double zeta_intertwining_residual(const GroupId& G, int N) {
  return permutation_intertwining_residual(G, zeta_permutation(G, N), zeta_permutation(G, N + 1),
                                           *is_refinement(cofinal_lattice(N), cofinal_lattice(N + 1)),
                                           *is_refinement(uniform_lattice(N), uniform_lattice(N + 1)));
}

Mat fourier_matrix(const GroupId& G) {
  if (!G.is_finite() || !G.is_abelian()) throw UnsupportedError("full Fourier matrix needs a finite abelian backend");
  int n = G.order();
  Mat F(n, n);
  for (int k = 0; k < n; ++k)
    for (int g = 0; g < n; ++g) F(k, g) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * kPi * k * g / n);
  return F;
}

Mat refine_isometry(const GroupId& G) {
  FiniteGroup F(G);
  ConfigSpace S(G, 2);
  Mat R = Mat::Zero(S.dim, F.n);
  for (long i = 0; i < S.dim; ++i) {
    auto c = S.decode(i);
    R(i, F.mul(c[0], c[1])) = 1.0 / std::sqrt(double(F.n));
  }
  return R;
}

Mat dual_refine_isometry(const GroupId& G) {
  Mat F = fourier_matrix(G);
  return kron(F, F) * refine_isometry(G) * F.adjoint();
}

LatticeOperator jones_act(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a) {
  ConfigSpace S(G, a.lattice.size());
  if (a.op.rows() != S.dim) throw ContractError("jones_act: operator does not match lattice");
  if (!is_adapted(f, a.lattice))
    throw ContractError("jones_act: lattice not adapted; refine to tree " + adapted_tree(f, a.lattice.tree()).to_string());
  // f is increasing, so spatial order and hence the tensor-factor order is kept.
  return {thompson_map_lattice(f, a.lattice), a.op};
}

LatticeOperator jones_act_refining(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                   SplitPolicy policy) {
  OrientedLattice fine = refine_to(a.lattice, f.domain().points(), policy);
  return jones_act(G, f, {fine, alpha_refine(G, a.lattice, fine, a.op)});
}

LatticeOperator jones_act_tensor(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                 SplitPolicy policy) {
  OrientedLattice fine = refine_to(a.lattice, f.domain().points(), policy);
  return {thompson_map_lattice(f, fine), alpha_triv(G, a.lattice, fine, a.op)};
}

double limit_difference(const GroupId& G, const LatticeOperator& a, const LatticeOperator& b) {
  OrientedLattice c = common_refinement(a.lattice, b.lattice);
  return max_abs(alpha_refine(G, a.lattice, c, a.op) - alpha_refine(G, b.lattice, c, b.op));
}

double jones_group_law_residual(const GroupId& G, const ThompsonElement& f1, const ThompsonElement& f2,
                                const LatticeOperator& a, SplitPolicy policy) {
  LatticeOperator once = jones_act_refining(G, f1 * f2, a, policy);
  LatticeOperator twice = jones_act_refining(G, f1, jones_act_refining(G, f2, a, policy), policy);
  return limit_difference(G, once, twice);
}

double jones_refinement_residual(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                 const OrientedLattice& fine, SplitPolicy policy) {
  if (!is_refinement(a.lattice, fine)) throw ContractError("jones_refinement_residual: not a refinement");
  LatticeOperator direct = jones_act_refining(G, f, a, policy);
  LatticeOperator refined = jones_act_refining(G, f, {fine, alpha_refine(G, a.lattice, fine, a.op)}, policy);
  return limit_difference(G, direct, refined);
}

NonEquivarianceWitness non_equivariance_witness(const GroupId& G, const Mat& a, const Mat& b) {
  OrientedLattice g1 = cofinal_lattice(1);
  Mat U1 = eta_unitary(G, 1);
  Mat ab = kron(a, b);
  auto f = ThompsonElement::x0();
  LatticeOperator moved = jones_act_refining(G, f, {g1, U1.adjoint() * ab * U1}, SplitPolicy::Uniform);
  Mat Ug = eta_unitary_lattice(G, moved.lattice);
  LatticeOperator tensor_side = jones_act_tensor(G, f, {g1, ab}, SplitPolicy::Uniform);
  NonEquivarianceWitness w;
  w.lattice = moved.lattice;
  w.via_field_algebra = Ug * moved.op * Ug.adjoint();
  w.via_tensor_product = tensor_side.op;
  w.max_entry_difference = max_abs(w.via_field_algebra - w.via_tensor_product);
  return w;
}

}  // namespace hlgt
