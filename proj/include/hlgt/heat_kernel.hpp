#pragma once

#include <vector>

#include "hlgt/group.hpp"

namespace hlgt {

struct HeatKernelSpec {
  GroupId group;
  double beta = 1.0;
  double tol = 1e-17;  // relative truncation tolerance of the character series
};

struct SeriesValue {
  double value = 0.0;
  int cutoff_used = 0;     // number of irreps summed
  double est_error = 0.0;  // bound on the discarded tail
  bool small_beta_warning = false;
};

// rho_beta(g) = sum_pi d_pi e^{-beta c_pi / 2} chi_pi(g)
SeriesValue heat_kernel_series(const HeatKernelSpec& spec, const GroupValue& g);
double heat_kernel_eval(const HeatKernelSpec& spec, const GroupValue& g);
// Convenience for finite backends: values on elements 0..n-1.
std::vector<double> heat_kernel_table(const GroupId& G, double beta);

// rho^Z_beta(m) = e^{-beta} I_m(beta)
double dual_heat_kernel_Z(double beta, long m);
// Values for m = 0..M in one pass.
std::vector<double> dual_heat_kernel_Z_range(double beta, long M);

// sup over a test grid of |(rho_a * rho_b)(g) - rho_{a+b}(g)|
double convolution_check(const GroupId& G, double a, double b);

// Z(beta) = rho_beta(1) = sum_pi d_pi^2 e^{-beta c_pi / 2}
double heat_kernel_trace(const GroupId& G, double beta);

// sum_{n=1}^{cutoff} n^2 e^{-beta c_n(q)/2}
double suq2_partition(double q, double beta, int cutoff, double tol = 1e-13);
// q -> 1 limit with c_n = n^2/4 = j(j+1) + 1/4, n = 2j+1; the SU(2) sum
// with the same Casimir shift.
double su2_casimir_matched_partition(double beta, int cutoff);

}  // namespace hlgt
