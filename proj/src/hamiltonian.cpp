#include "hlgt/hamiltonian.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "hlgt/field_algebra.hpp"
#include "hlgt/heat_kernel.hpp"

namespace hlgt {

double CouplingSchedule::g(int N) const { return std::ldexp(g0, -N); }
double CouplingSchedule::a(int N) const { return std::ldexp(L, -N); }
double CouplingSchedule::prefactor(int N) const { return g(N) * g(N) / (2.0 * a(N)); }

namespace {

std::vector<double> fourier_casimirs(const GroupId& G) {
  auto t = irreps(G);
  std::vector<double> c;
  if (G.kind == GroupKind::CyclicZn) {
    for (int k = 0; k < G.order(); ++k) c.push_back(t.entries[t.index_of(k)].casimir);
  } else if (G.kind == GroupKind::CircleU1) {
    for (int n = -G.cutoff; n <= G.cutoff; ++n) c.push_back(t.entries[t.index_of(n)].casimir);
  } else {
    throw UnsupportedError("Kogut-Susskind matrix needs Z_n or truncated U(1)");
  }
  return c;
}

double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Mat neg_laplacian(const GroupId& G, KSBasis basis) {
  auto c = fourier_casimirs(G);
  Mat D = Mat::Zero(c.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) D(i, i) = c[i];
  if (basis == KSBasis::Fourier) return D;
  if (!G.is_finite()) throw UnsupportedError("configuration basis needs a finite backend");
  Mat F = fourier_matrix(G);
  return F.adjoint() * D * F;
}

Mat ks_strong_matrix_edges(const GroupId& G, int edges, double prefactor, KSBasis basis) {
  Mat D = neg_laplacian(G, basis);
  long d = D.rows();
  long dim = 1;
  for (int e = 0; e < edges; ++e) dim *= d;
  if (double(dim) * double(dim) > double(kDenseGuardrail))
    throw ResourceError("Hamiltonian of dimension " + std::to_string(dim) + " exceeds the dense guardrail");
  Mat H = Mat::Zero(dim, dim);
  for (int e = 0; e < edges; ++e) {
    std::vector<Mat> f(edges, Mat::Identity(d, d));
    f[e] = D;
    H += kron_all(f);
  }
  return prefactor * H;
}

Mat ks_strong_matrix(const GroupId& G, int N, const CouplingSchedule& s, KSBasis basis) {
  return ks_strong_matrix_edges(G, 1 << N, s.prefactor(N), basis);
}

double wilson_loop_energy(const GroupId& G, int label, double L, double gb) {
  auto t = irreps(G);
  return 0.5 * t.entries[t.index_of(label)].casimir * L * gb * gb;
}

WilsonEigenCheck wilson_loop_eigencheck(const GroupId& G, int label, int N, double L, double gb) {
  if (!G.is_finite()) throw UnsupportedError("wilson_loop_eigencheck: finite backend required");
  auto s = CouplingSchedule::from_bare(gb, L);
  int E = 1 << N;
  Mat H = ks_strong_matrix_edges(G, E, s.prefactor(N), KSBasis::Configuration);
  ConfigSpace S(G, E);
  auto t = irreps(G);
  std::size_t pi = t.index_of(label);
  Vec psi(S.dim), omega = Vec::Constant(S.dim, 1.0 / std::sqrt(double(S.dim)));
  for (long i = 0; i < S.dim; ++i) {
    auto g = S.decode(i);
    int hol = 0;  // g_0 g_1 ... g_{E-1}
    for (int e = 0; e < E; ++e) hol = S.G.mul(hol, g[e]);
    psi(i) = t.character(pi, GroupValue::integer(hol)) / std::sqrt(double(S.dim));
  }
  WilsonEigenCheck r;
  r.expected = wilson_loop_energy(G, label, L, gb);
  Vec Hpsi = H * psi;
  r.rayleigh = psi.dot(Hpsi).real();
  r.eigen_residual = (Hpsi - r.expected * psi).norm();
  r.vacuum_residual = (H * omega).norm();
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  r.ground_energy = es.eigenvalues()(0);
  return r;
}

double spectral_gap(const GroupId& G, int N, const CouplingSchedule& s) {
  auto c = fourier_casimirs(G);
  double m = INFINITY;
  for (double x : c)
    if (x > 0) m = std::min(m, x);
  return s.prefactor(N) * m;
}

double gibbs_is_heat_kernel_residual(const GroupId& G, int N, double beta_N, const CouplingSchedule& s) {
  if (!G.is_finite()) throw UnsupportedError("gibbs residual: finite backend required");
  int E = 1 << N;
  Mat H = ks_strong_matrix_edges(G, E, s.prefactor(N), KSBasis::Configuration);
  Mat gibbs = (-beta_N * H).exp();
  ConfigSpace S(G, E);
  Mat T(S.dim, S.dim);
  if (beta_N == 0.0) {
    T = Mat::Identity(S.dim, S.dim);
  } else {
    double t = beta_N * s.g(N) * s.g(N) / s.a(N);
    auto rho = heat_kernel_table(G, t);
    for (long k = 0; k < S.dim; ++k) {
      auto kc = S.decode(k);
      for (long g = 0; g < S.dim; ++g) {
        auto gc = S.decode(g);
        double v = 1.0;
        for (int e = 0; e < E; ++e) v *= rho[S.G.mul(kc[e], S.G.inv(gc[e]))] / S.G.n;
        T(k, g) = v;
      }
    }
  }
  return max_abs(T - gibbs);
}

double refinement_coherence_residual(const GroupId& G, int N, const CouplingSchedule& s) {
  Mat Hc = ks_strong_matrix(G, N, s, KSBasis::Configuration);
  Mat Hf = ks_strong_matrix(G, N + 1, s, KSBasis::Configuration);
  Mat R1 = refine_isometry(G);
  Mat R = R1;
  for (int e = 1; e < (1 << N); ++e) R = kron(R, R1);
  return max_abs(Hf * R - R * Hc);
}

double gauge_commutator_residual(const GroupId& G, const OrientedLattice& lat, double prefactor, int n_samples,
                                 std::uint64_t seed) {
  Mat H = ks_strong_matrix_edges(G, lat.size(), prefactor, KSBasis::Configuration);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, G.order() - 1);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::vector<int> v(lat.size());
    for (auto& x : v) x = pick(rng);
    Mat U = gauge_unitary(G, lat, v, true);
    worst = std::max(worst, max_abs(H * U - U * H));
  }
  return worst;
}

Mat o2_rotor_matrix(int K, double beta, double gtilde) {
  if (K < 4) throw ConfigError("rotor cutoff K must be at least 4");
  if (!(gtilde > 0)) throw DomainError("gtilde must be positive");
  int d = 2 * K + 1;
  Mat H = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double n = i - K;
    H(i, i) = 0.5 * beta * n * n;
    if (i + 1 < d) H(i, i + 1) = H(i + 1, i) = -beta / gtilde;
  }
  return H;
}

double trotter_residual(int K, double beta, double gtilde, int n, PotentialForm form) {
  if (n < 1) throw ConfigError("Trotter steps must be positive");
  Mat H = o2_rotor_matrix(K, beta, gtilde);
  int d = 2 * K + 1;
  Mat target = (-H).exp();

  // Weight of the truncated e^{-H} at the mode boundary signals an insufficient cutoff.
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  Vec ground = es.eigenvectors().col(0);
  double edge = std::max(std::abs(ground(0)), std::abs(ground(d - 1)));
  if (edge > 1e-10)
    throw CutoffError("rotor cutoff K = " + std::to_string(K) + " too small: boundary weight " + std::to_string(edge));

  Mat kin = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double m = i - K;
    kin(i, i) = std::exp(-0.5 * beta * m * m / n);
  }
  Mat pot(d, d);
  if (form == PotentialForm::Cosine) {
    Mat C = Mat::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) C(i, i + 1) = C(i + 1, i) = 0.5;
    pot = (2.0 * beta / (gtilde * n) * C).exp();
  } else {
    double t = gtilde * n / beta, norm = 0.0;
    for (int m = -4 * K; m <= 4 * K; ++m) norm += std::exp(-0.5 * t * m * m);
    double scale = std::exp(2.0 * beta / (gtilde * n)) / norm;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) pot(i, j) = scale * std::exp(-0.5 * t * (i - j) * (i - j));
  }
  Mat step = kin * pot, prod = Mat::Identity(d, d);
  for (int s = 0; s < n; ++s) prod = prod * step;
  return op_norm(prod - target);
}

}  // namespace hlgt
