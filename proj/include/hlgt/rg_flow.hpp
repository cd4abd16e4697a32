#pragma once

#include <string>
#include <vector>

#include "hlgt/group.hpp"

namespace hlgt {

// Coarse-graining of per-leaf betas on complete trees: a coarse leaf collects
// the betas of its 2^{N'-N} descendants (heat kernels compose additively).
std::vector<double> flow_beta(const std::vector<double>& beta_fine, int N_fine, int N_coarse);

struct FlowStep {
  int M = 0;
  double beta = 0.0;
  double fixed_point_distance = 0.0;  // |beta^(M) - beta^(0)|
};

enum class FlowClass { Fixed, ToZero, ToInfinity };
std::string to_string(FlowClass c);

struct FlowRecord {
  double nu = 1.0;
  double beta0 = 1.0;
  FlowClass classification = FlowClass::Fixed;
  bool monotone = true;
  std::vector<FlowStep> steps;
};

// Power-law initial data beta_sigma = beta0 |I_sigma|^nu on the unit interval;
// beta^(M) = 2^{(1-nu) M} beta0.
FlowRecord classify_flow(double nu, double beta0, int M_max);

// beta_Ising = -1/2 ln tanh(beta), evaluated without cancellation at both ends.
double ising_transform(double beta);
double ising_inverse(double beta_ising);
// 1/2 ln cosh(x)
double half_log_cosh(double x);
// max over the grid of |T(2 beta) - 1/2 ln cosh(2 T(beta))|
double ising_conjugacy_residual(const std::vector<double>& betas);

// Integrate the shared edge of two plaquettes:
// sup |int dh rho_b1(a h) rho_b2(h^{-1} b) - rho_{b1+b2}(a b)| over sampled (a, b).
double plaquette_flow_residual(const GroupId& G, double beta1, double beta2);

// ||exp(-beta_N pf sum_e (-Delta_e)) - (x)_e exp(-beta_e pf (-Delta))||_max.
double strong_coupling_factorization_check(const GroupId& G, double prefactor, double beta_N,
                                           const std::vector<double>& edge_betas);

}  // namespace hlgt
