#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

// Configuration space G^E with lexicographic basis: edge 0 (leftmost) is the
// most significant digit.
struct ConfigSpace {
  FiniteGroup G;
  int edges;
  long dim;

  ConfigSpace(const GroupId& g, int edges);
  std::vector<int> decode(long idx) const;
  long encode(const std::vector<int>& cfg) const;
};

// Throws ResourceError when |G|^{2E} exceeds the dense guardrail.
void check_guardrail(int order, int edges);

// Kernel F(h, g) on G^E x G^E, stored as data(h_idx, g_idx).
struct ConvolutionKernel {
  GroupId group;
  int edges = 1;
  Mat data;

  static ConvolutionKernel from_function(const GroupId& G, int edges,
                                         const std::function<cplx(const std::vector<int>&, const std::vector<int>&)>& F);
};

// (lambda(F) psi)(g) = |G|^{-E} sum_h F(h, g) psi(h^{-1} g)
Mat kernel_to_matrix(const ConvolutionKernel& F);
ConvolutionKernel matrix_to_kernel(const GroupId& G, int edges, const Mat& m);
// Adjoint kernel F*(h, g) = conj(F(h^{-1}, h^{-1} g)).
ConvolutionKernel kernel_adjoint(const ConvolutionKernel& F);

// Single-edge operators.
Mat multiplication_op(const GroupId& G, const std::function<cplx(int)>& f);
Mat left_translation(const GroupId& G, int h);  // (lambda_h psi)(g) = psi(h^{-1} g)
Mat permutation_op(long dim, const std::function<long(long)>& image);  // e_i -> e_{image(i)}

struct RefineUnitaries {
  Mat U_L;     // (U_L psi)(x, y) = psi(x y, y), x the left edge
  Mat V_R;     // (V_R psi)(x, y) = psi(x, y x)
  Mat U_iota;  // (U_iota phi)(g) = phi(g^{-1})
  Mat flip;    // swap of the two tensor factors
};
RefineUnitaries refine_unitaries(const GroupId& G);

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& factors);
Mat identity_op(const GroupId& G, int edges);
// Operator acting as `a` on edge `e` of an E-edge lattice.
Mat embed_single(const GroupId& G, int edges, int e, const Mat& a);

// alpha(a)[g', k'] = a[p(g'), p(k')] * delta(rest(g') = rest(k')), where p is the
// holonomy along each witness path and rest is every fine edge that is not a carrier.
Mat alpha_refine(const GroupId& G, const Witness& w, const Mat& a);
// Holonomy p_c(g) of each witness path and the part B_c before its carrier,
// so that p_c = g_{carrier} B_c.
void witness_project(const FiniteGroup& F, const Witness& w, const std::vector<int>& g, std::vector<int>& p,
                     std::vector<int>& B);
Mat alpha_refine(const GroupId& G, const OrientedLattice& coarse, const OrientedLattice& fine, const Mat& a);
// Ad of U_iota on one edge.
Mat alpha_invert(const GroupId& G, int edges, int e, const Mat& a);

// Tensor-product system: a Left edge puts its factor on the left child, a
// Right edge on the right child, identity elsewhere.
Witness trivial_witness(const OrientedLattice& coarse, const OrientedLattice& fine);
Mat alpha_triv(const GroupId& G, const OrientedLattice& coarse, const OrientedLattice& fine, const Mat& a);

// Gauge transformation g_e -> g_{target} g_e g_{source}^{-1}; `vertex` has one
// entry per partition point (periodic lattices identify the last with the first).
Mat gauge_unitary(const GroupId& G, const OrientedLattice& lat, const std::vector<int>& vertex, bool periodic = false);
Mat gauge_act(const GroupId& G, const OrientedLattice& lat, const std::vector<int>& vertex, const Mat& a,
              bool periodic = false);
// Restriction q(g) of a fine vertex tuple to the vertices of a coarser lattice.
std::vector<int> restrict_gauge_tuple(const OrientedLattice& coarse, const OrientedLattice& fine,
                                      const std::vector<int>& fine_vertex);

// Basis permutation: the operator sends e_i to e_{p[i]}. The intertwiners are
// permutations, which lets their checks run past the dense guardrail.
using Permutation = std::vector<long>;
Permutation identity_permutation(long dim);
Mat permutation_matrix(const Permutation& p);
// alpha applied to a permutation operator, again a permutation.
Permutation alpha_permutation(const GroupId& G, const Witness& w, const Permutation& s);

// One representative of the tensor-product isomorphism: U_{N+1} = alpha_triv(U_N) D_{N+1}
// with D the layer of U_L (Left edges) and V_R (Right edges).
Permutation eta_permutation(const GroupId& G, int N);
Mat eta_unitary(const GroupId& G, int N);
// U for an intermediate lattice reached from gamma_0 by outward bisections.
Mat eta_unitary_lattice(const GroupId& G, const OrientedLattice& lat);
// Permutation D with Ad_D o alpha_wa = alpha_wb, matching holonomies and deleted edges.
// Deleted edge r is read through g -> g^{-1} when invert_rest[r] is set.
Permutation conjugating_permutation(const GroupId& G, const Witness& wa, const Witness& wb,
                                    const std::vector<bool>& invert_rest = {});
Mat conjugating_layer(const GroupId& G, const Witness& wa, const Witness& wb, const std::vector<bool>& invert_rest = {});
// Flags deleted edges whose orientation differs between the two refinements.
std::vector<bool> reversed_deleted_edges(const OrientedLattice& fa, const Witness& wa, const OrientedLattice& fb,
                                         const Witness& wb);
// U_{N+1} = alpha^{all-left}(U_N) D_{N+1}, D the conjugating layer between the
// cofinal and the all-left one-step refinements.
Permutation zeta_permutation(const GroupId& G, int N);
Mat zeta_unitary(const GroupId& G, int N);

// max over matrix units a at level N of
// ||U_{N+1} alpha(a) U_{N+1}^* - alpha_triv(U_N a U_N^*)||_max
double eta_intertwining_residual(const GroupId& G, int N);
// Same for zeta with the all-left lattices as target:
// ||Z_{N+1} alpha(a) Z_{N+1}^* - alpha^{all-left}(Z_N a Z_N^*)||_max
double zeta_intertwining_residual(const GroupId& G, int N);

// Unitary DFT on Z_n and the refinement isometry R phi(g2, g1) = phi(g2 g1).
Mat fourier_matrix(const GroupId& G);
Mat refine_isometry(const GroupId& G);
// R_hat = (F (x) F) R F^*
Mat dual_refine_isometry(const GroupId& G);

// Operator together with the lattice it lives on.
struct LatticeOperator {
  OrientedLattice lattice;
  Mat op;
};

// Jones action of f on an operator over an f-adapted lattice.
LatticeOperator jones_act(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a);
// Refine to the adapted lattice first (with the given split policy), then act.
LatticeOperator jones_act_refining(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                   SplitPolicy policy = SplitPolicy::Uniform);
// Distance in the inductive limit: both sides refined to a common lattice.
double limit_difference(const GroupId& G, const LatticeOperator& a, const LatticeOperator& b);
// Same action on the tensor-product system (refinements via alpha_triv).
LatticeOperator jones_act_tensor(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                 SplitPolicy policy = SplitPolicy::Uniform);

// Limit distance between (f1 f2).a and f1.(f2.a).
double jones_group_law_residual(const GroupId& G, const ThompsonElement& f1, const ThompsonElement& f2,
                                const LatticeOperator& a, SplitPolicy policy = SplitPolicy::Uniform);
// Limit distance between f.alpha(a) and f.a for a refinement `fine` of a's lattice.
double jones_refinement_residual(const GroupId& G, const ThompsonElement& f, const LatticeOperator& a,
                                 const OrientedLattice& fine, SplitPolicy policy = SplitPolicy::Uniform);

struct NonEquivarianceWitness {
  OrientedLattice lattice;   // image lattice of gamma_1 under the generator
  Mat via_field_algebra;     // eta(f . eta^{-1}(a (x) b))
  Mat via_tensor_product;    // f . (a (x) b) on the tensor-product side
  double max_entry_difference;
};
NonEquivarianceWitness non_equivariance_witness(const GroupId& G, const Mat& a, const Mat& b);

}  // namespace hlgt
