#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

struct HellingerStep {
  double quadrature = 0.0;  // int sqrt(rho_b(h g) rho_b(g)) dg
  double bound = 0.0;       // sqrt(rho_{2b}(h)), the Cauchy-Schwarz value
};
HellingerStep hellinger_step(const GroupId& G, double beta, const GroupValue& h);

enum class Verdict { Nonsingular, Singular, Inconclusive };
std::string to_string(Verdict v);

struct AffinityProduct {
  std::vector<int> levels;
  std::vector<double> factors;   // per-level factor in (0, 1]
  std::vector<double> products;  // running product
  std::vector<double> log_products;
  double log_slope = 0.0;        // mean d(ln product)/d(level) over the last 10 levels
  Verdict verdict = Verdict::Inconclusive;
};
// Singular: product < 1e-6 and slope < -0.05. Nonsingular: product > 0.1 and slope > -1e-3.
Verdict classify_product(const AffinityProduct& p);

// Dual-family product prod_N step(2^{-N} beta)^s for levels 0..max_level.
// `homogeneous` keeps beta fixed at every level instead.
AffinityProduct hellinger_product(const GroupId& G, double beta, const GroupValue& h, int s, int max_level,
                                  bool homogeneous = false);
// Z_2 with rho(+-1) = 1 +- e^{-beta/2}: factor (1 - e^{-2^{-N} beta})^{s/2}.
double hellinger_z2_closed_form(double beta, int s, int level);
// Gaussian line: level factor e^{-2^N |x|^2 / (8 beta)}.
double hellinger_gaussian_closed_form(double beta, double x2, int level);
// The same by quadrature of sqrt(rho_t(x + g) rho_t(g)) on R, t = 2^{-N} beta.
double hellinger_gaussian_quadrature(double beta, double x, int level);

// m_beta(n) = e^{-beta n^2 / 2} / sum_m e^{-beta m^2 / 2} on the dual of U(1).
// A(k) = sum_n sqrt(m_beta(n) m_beta(n + k)), via Jacobi theta sums.
double z_affinity(double beta, long k);
// ln A(k), accurate when A is within rounding of 1 (small beta).
double log_z_affinity(double beta, long k);
// theta(beta, a) = sum_n e^{-beta (n + a)^2 / 2}, direct or by Poisson summation.
double theta_sum(double beta, double a);

// beta_d for a dyadic point d first appearing at level l (d = 0 has level 0).
using DyadicBeta = std::function<double(const Dyadic&)>;
// beta^tau_d = 2^{-tau l}
DyadicBeta geometric_beta(double tau);
// Product over dyadics of level <= max_level of A_d(k); all coordinates shifted by k.
AffinityProduct kakutani_affinity_Z(const DyadicBeta& beta, long k, int max_level);

struct L1Report {
  std::vector<double> level_sums;  // sum of beta_d over dyadics first appearing at each level
  double partial_sum = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};
// Summable if the level contributions decay geometrically, divergent if they do not decrease.
L1Report l1_verdict(const DyadicBeta& beta, int max_level);

}  // namespace hlgt
