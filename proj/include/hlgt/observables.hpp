#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

// Holonomy based at 0: h_tau = g_1 g_2 ... g_m over the edges ending at or before tau.
GroupValue holonomy(const GroupId& G, const std::vector<GroupValue>& config, const DyadicTree& t, const Dyadic& tau);
// h at every partition point sigma_1..sigma_n.
std::vector<GroupValue> holonomy_path(const GroupId& G, const std::vector<GroupValue>& config);
// (h_1, h_1^{-1} h_2, ..., h_{n-1}^{-1} h_n)
std::vector<GroupValue> holonomy_inverse(const GroupId& G, const std::vector<GroupValue>& path);
// Coarse configuration from a fine one: ordered products over the subintervals.
std::vector<GroupValue> project_config(const GroupId& G, const std::vector<GroupValue>& fine, const DyadicTree& fine_tree,
                                       const DyadicTree& coarse_tree);

struct DualityReport {
  long checked = 0;
  long mismatches = 0;  // residual; 0 expected
};
// hol(L_g h) = hol(g) hol(h) at every partition point of level N. Exhaustive when
// small, otherwise `samples` random pairs.
DualityReport duality_check(const GroupId& G, int N, long samples = 20000, std::uint64_t seed = 1);

struct InvarianceReport {
  bool loop_invariant = false;        // invariant under based gauge tuples
  bool factors_through_holonomy = false;
  bool fully_invariant = false;       // invariant under all gauge tuples
};
// Periodic lattice with E edges, edge i running from vertex i to i+1 mod E and
// g_i -> k_i g_i k_{i+1}^{-1}.
InvarianceReport invariant_function_check(const GroupId& G, int E, const std::function<cplx(const std::vector<int>&)>& f);

struct TwoPointSpec {
  GroupId group;
  double beta0 = 1.0;
  double L = 1.0;  // INFINITY selects the thermodynamic limit
  int pi = 1, pi2 = 1;
  double tau = 0.0, tau2 = 0.5;
};

struct TwoPointResult {
  double fusion = 0.0;     // normalized fusion series
  double transfer = 0.0;   // operator trace on truncated Fourier space
  double partition = 0.0;  // trace of the full transfer operator
  double thermo = 0.0;     // L -> infinity formula
  int terms = 0;
};
TwoPointResult two_point(const TwoPointSpec& spec);
// max - min of the transfer value over `shifts` rigid translations of (tau, tau2).
double rotation_invariance_residual(const TwoPointSpec& spec, int shifts = 10);

enum class CovarianceKind { Wiener, OrnsteinUhlenbeck, Ising1d };
CovarianceKind parse_covariance_kind(const std::string& s);
double closed_form_covariance(CovarianceKind kind, double beta0, double L, double tau, double tau2);
// Z_2 transfer form with c_sgn = 2, which reduces to 1 at coinciding points.
double ising_transfer_covariance(double beta0, double L, double tau, double tau2);

struct SupportProxyRow {
  int level;
  double dual_msq;     // E[phi^2] for one step under rho_{beta0 2^{-N}} on U(1)
  double uniform_msq;  // pi^2 / 3
};
std::vector<SupportProxyRow> support_proxy(double beta0, int level_min, int level_max);

}  // namespace hlgt
