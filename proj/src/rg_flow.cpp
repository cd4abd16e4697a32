#include "hlgt/rg_flow.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "hlgt/field_algebra.hpp"
#include "hlgt/hamiltonian.hpp"
#include "hlgt/heat_kernel.hpp"

namespace hlgt {

std::vector<double> flow_beta(const std::vector<double>& beta_fine, int N_fine, int N_coarse) {
  if (N_coarse > N_fine || N_coarse < 0) throw ContractError("flow_beta: target level must not exceed source level");
  if (beta_fine.size() != (std::size_t(1) << N_fine)) throw ContractError("flow_beta: table size is not 2^N");
  std::size_t block = std::size_t(1) << (N_fine - N_coarse);
  std::vector<double> out(std::size_t(1) << N_coarse, 0.0);
  for (std::size_t i = 0; i < beta_fine.size(); ++i) out[i / block] += beta_fine[i];
  return out;
}

std::string to_string(FlowClass c) {
  switch (c) {
    case FlowClass::Fixed: return "fixed";
    case FlowClass::ToZero: return "to_zero";
    case FlowClass::ToInfinity: return "to_infinity";
  }
  return "?";
}

FlowRecord classify_flow(double nu, double beta0, int M_max) {
  if (!(beta0 > 0)) throw DomainError("beta0 must be positive");
  FlowRecord r;
  r.nu = nu;
  r.beta0 = beta0;
  r.classification = nu > 1 ? FlowClass::ToZero : nu < 1 ? FlowClass::ToInfinity : FlowClass::Fixed;
  for (int M = 0; M <= M_max; ++M) {
    // 2^M leaves of size 2^{-M}, each carrying beta0 2^{-M nu}, collapse onto one leaf.
    double b = std::ldexp(beta0 * std::exp2(-double(M) * nu), M);
    r.steps.push_back({M, b, std::abs(b - beta0)});
  }
  for (std::size_t i = 1; i < r.steps.size(); ++i) {
    double prev = r.steps[i - 1].beta, cur = r.steps[i].beta;
    bool ok = r.classification == FlowClass::Fixed ? cur == prev
              : r.classification == FlowClass::ToZero ? cur < prev
                                                      : cur > prev;
    r.monotone = r.monotone && ok;
  }
  return r;
}

double ising_transform(double beta) {
  if (!(beta > 0)) throw DomainError("ising_transform: beta must be positive");
  // tanh(b) - 1 = -2 e^{-2b} / (1 + e^{-2b})
  double e = std::exp(-2.0 * beta);
  return -0.5 * std::log1p(-2.0 * e / (1.0 + e));
}

double ising_inverse(double beta_ising) {
  if (!(beta_ising > 0)) throw DomainError("ising_inverse: argument must be positive");
  // atanh t = 1/2 ln((1 + t) / (1 - t)), with 1 - t taken from expm1 near t = 1
  double t = std::exp(-2.0 * beta_ising);
  return 0.5 * (std::log1p(t) - std::log(-std::expm1(-2.0 * beta_ising)));
}

double half_log_cosh(double x) {
  x = std::abs(x);
  if (x < 1.0) {
    double s = std::sinh(0.5 * x);
    return 0.5 * std::log1p(2.0 * s * s);
  }
  return 0.5 * (x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0));
}

double ising_conjugacy_residual(const std::vector<double>& betas) {
  double worst = 0.0;
  for (double b : betas)
    worst = std::max(worst, std::abs(ising_transform(2.0 * b) - half_log_cosh(2.0 * ising_transform(b))));
  return worst;
}

double plaquette_flow_residual(const GroupId& G, double beta1, double beta2) {
  double worst = 0.0;
  if (G.is_finite()) {
    FiniteGroup F(G);
    auto r1 = heat_kernel_table(G, beta1), r2 = heat_kernel_table(G, beta2), r12 = heat_kernel_table(G, beta1 + beta2);
    for (int a = 0; a < F.n; ++a)
      for (int b = 0; b < F.n; ++b) {
        double acc = 0.0;
        for (int h = 0; h < F.n; ++h) acc += r1[F.mul(a, h)] * r2[F.mul(F.inv(h), b)];
        worst = std::max(worst, std::abs(acc / F.n - r12[F.mul(a, b)]));
      }
    return worst;
  }
  if (G.kind != GroupKind::CircleU1) throw UnsupportedError("plaquette flow: Z_n or truncated U(1) only");
  // Both factors are trigonometric polynomials of degree K; more than 2K nodes
  // integrate their product exactly.
  int nodes = 4 * G.cutoff + 8;
  const int samples = 16;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      double a = -kPi + 2.0 * kPi * (i + 0.5) / samples, b = -kPi + 2.0 * kPi * (j + 0.37) / samples;
      double acc = 0.0;
      for (int k = 0; k < nodes; ++k) {
        double h = 2.0 * kPi * k / nodes;
        acc += heat_kernel_eval({G, beta1}, GroupValue::angle(a + h)) *
               heat_kernel_eval({G, beta2}, GroupValue::angle(b - h));
      }
      double target = heat_kernel_eval({G, beta1 + beta2}, GroupValue::angle(a + b));
      worst = std::max(worst, std::abs(acc / nodes - target));
    }
  return worst;
}

double strong_coupling_factorization_check(const GroupId& G, double prefactor, double beta_N,
                                           const std::vector<double>& edge_betas) {
  int E = int(edge_betas.size());
  Mat H = ks_strong_matrix_edges(G, E, prefactor, KSBasis::Fourier);
  Mat full = (-beta_N * H).exp();
  Mat D = neg_laplacian(G, KSBasis::Fourier);
  std::vector<Mat> f;
  for (double b : edge_betas) f.push_back((-b * prefactor * D).exp());
  return max_abs(full - kron_all(f));
}

}  // namespace hlgt
