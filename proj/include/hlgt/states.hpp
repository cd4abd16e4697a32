#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/field_algebra.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

enum class FamilyKind { HeatKernel, Inhomogeneous, DualHeatKernel, Vacuum };

// beta_{d,L} for dyadics d in [0, 1) and beta_{d,R} for d in (0, 1], up to max_level.
// A Left edge [d, d') reads beta_{d,L}; a Right edge (d, d'] reads beta_{d',R}.
struct InhomogeneousTable {
  int max_level = 0;
  std::map<Dyadic, double> left, right;

  static InhomogeneousTable from_functions(int max_level, const std::function<double(const Dyadic&)>& bl,
                                           const std::function<double(const Dyadic&)>& br);
  double beta(const Edge& e) const;
};

struct StateFamily {
  FamilyKind kind = FamilyKind::HeatKernel;
  GroupId group;
  double beta = 1.0;   // HeatKernel
  double beta0 = 1.0;  // DualHeatKernel: beta_e = beta0 |I_e|
  InhomogeneousTable table;
  // Optional replacement of the per-edge beta rule, used for negative controls.
  std::function<double(const Edge&, double L)> beta_rule;

  static StateFamily heat(const GroupId& G, double beta);
  static StateFamily vacuum(const GroupId& G);
  static StateFamily dual(const GroupId& G, double beta0);
  static StateFamily inhomogeneous(const GroupId& G, InhomogeneousTable t);

  double edge_beta(const Edge& e, double L) const;
  // Density is a multiplication operator (dual family) rather than a convolution.
  bool multiplicative() const { return kind == FamilyKind::DualHeatKernel; }
  std::string name() const;
};

// Per-edge class-function factors of T = (x)_e lambda(f_e (x) 1), f_e(1) = 1, or
// for the dual family T = (x)_e M(rho_e)/|G|.
struct DensityKernel {
  StateFamily family;
  OrientedLattice lattice;
  std::vector<double> betas;                // per edge, 0 for the vacuum
  std::vector<std::vector<double>> factor;  // finite backends: factor[e][g]

  // T[k, g] with omega(a) = sum_{k,g} T[k, g] a[g, k]
  double entry(const std::vector<int>& k, const std::vector<int>& g, const FiniteGroup& F) const;
};

DensityKernel density_at_level(const StateFamily& fam, const OrientedLattice& lat);
Mat density_matrix(const DensityKernel& d);

cplx evaluate(const StateFamily& fam, const OrientedLattice& lat, const Mat& a);
cplx evaluate(const StateFamily& fam, const OrientedLattice& lat, const ConvolutionKernel& F);
// Restriction to multiplication operators M(f) on compact backends (quadrature on U(1)).
cplx evaluate_multiplication(const StateFamily& fam, const OrientedLattice& lat,
                             const std::function<cplx(const std::vector<GroupValue>&)>& f);
// Dual state on Z: omega(a) = sum_m prod_i rho^Z_{beta_i}(m_i) F_a(0, m), |m_i| <= M.
using ZKernel = std::function<cplx(const std::vector<long>& n, const std::vector<long>& m)>;
cplx evaluate_dual_Z(const std::vector<double>& betas, const ZKernel& F, long M);

struct CoherenceReport {
  double residual = 0.0;
  std::string spanning_set;  // "matrix-units" or "random-200"
  long spanning_size = 0;
};

// max over the spanning set of |omega_fine(alpha(a)) - omega_coarse(a)| (finite backends),
// computed without materializing the fine operators.
CoherenceReport coherence_residual(const StateFamily& fam, const OrientedLattice& coarse,
                                   const OrientedLattice& fine, std::uint64_t seed = 1);
// U(1) in the truncated Fourier basis |n_e| <= K; convolution-type families only.
double coherence_residual_u1(const StateFamily& fam, const OrientedLattice& coarse, const OrientedLattice& fine);
// Dual family on Z on multiplication operators delta_x, |x_c| <= 4; sums over |m| <= M.
double coherence_residual_dual_Z(const StateFamily& fam, const OrientedLattice& coarse, const OrientedLattice& fine,
                                 long M = 24);

struct IntegralIdentityResiduals {
  double composition = 0.0;  // int dg1 F(h, g g1^{-1}; 1, g1) = F(h, g)
  double deletion = 0.0;     // int dg1 F(h2, g2; 1, g1) = F(h2, g2)
};
// For a single coarse edge [0, 1) and its outward split, on a finite backend.
IntegralIdentityResiduals integral_identity_residuals(const StateFamily& fam);

// max over (h, g) of |F(alpha_{g^{-1}}(h)^{-1}, g^{-1}) - F(h, g)|, alpha_g(h) = g h g^{-1}.
double inversion_residual(const GroupId& G, const std::function<cplx(int h, int g)>& F);
double inversion_residual(const StateFamily& fam, const OrientedLattice& lat, int edge);

double gauge_invariance_residual(const StateFamily& fam, const OrientedLattice& lat, int n_samples,
                                 std::uint64_t seed = 1, bool periodic = false);

struct DualGaugeResult {
  double u1_type = 0.0;  // residual under momentum phases; vanishes
  double z_type = 0.0;   // violation witness under configuration shifts
};
DualGaugeResult dual_gauge_check(double beta0, const OrientedLattice& lat, long M = 24, std::uint64_t seed = 1);

}  // namespace hlgt
