#pragma once

#include <cstdint>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/group.hpp"

namespace hlgt {

// g_N = g0 2^{-N}, a_N = L 2^{-N}. With g0 = L gb this is g_N = a_N gb.
struct CouplingSchedule {
  double g0 = 1.0;
  double gb = 1.0;
  double L = 1.0;

  static CouplingSchedule from_bare(double gb, double L) { return {L * gb, gb, L}; }
  double g(int N) const;
  double a(int N) const;
  // g_N^2 / (2 a_N)
  double prefactor(int N) const;
};

enum class KSBasis { Fourier, Configuration };

// Single-edge -Laplacian: diagonal Casimirs in the Fourier basis, F^* diag(c) F on
// configurations (finite backends only).
Mat neg_laplacian(const GroupId& G, KSBasis basis);
// prefactor * sum_e (-Delta_e) on `edges` edges.
Mat ks_strong_matrix_edges(const GroupId& G, int edges, double prefactor, KSBasis basis = KSBasis::Fourier);
// Level N of the cofinal sequence (2^N edges).
Mat ks_strong_matrix(const GroupId& G, int N, const CouplingSchedule& s, KSBasis basis = KSBasis::Fourier);

// E_pi = c_pi L gb^2 / 2
double wilson_loop_energy(const GroupId& G, int label, double L, double gb);

struct WilsonEigenCheck {
  double expected = 0.0;
  double rayleigh = 0.0;        // <psi, H psi>
  double eigen_residual = 0.0;  // ||H psi - E psi||
  double ground_energy = 0.0;   // lowest eigenvalue from a full diagonalization
  double vacuum_residual = 0.0; // ||H Omega||
};
// Character of the loop holonomy on a periodic level-N lattice, fed through H.
WilsonEigenCheck wilson_loop_eigencheck(const GroupId& G, int label, int N, double L, double gb);

double spectral_gap(const GroupId& G, int N, const CouplingSchedule& s);

// ||lambda((x)_e rho_t) - exp(-beta_N H^(N))||_max, t = beta_N g_N^2 / a_N.
double gibbs_is_heat_kernel_residual(const GroupId& G, int N, double beta_N, const CouplingSchedule& s);
// ||H^(N+1) R - R H^(N)||_max with R the edgewise refinement isometry.
double refinement_coherence_residual(const GroupId& G, int N, const CouplingSchedule& s);
// max over sampled gauge tuples of ||[H, U_tau]||_max on a periodic lattice.
double gauge_commutator_residual(const GroupId& G, const OrientedLattice& lat, double prefactor, int n_samples,
                                 std::uint64_t seed = 1);

// beta (-Delta/2 - (2/gt) cos phi) on Fourier modes |n| <= K.
Mat o2_rotor_matrix(int K, double beta, double gtilde);

enum class PotentialForm { Cosine, Villain };
// ||(lambda(rho_{beta/n}) P)^n - e^{-H}||_2 with P the potential factor.
double trotter_residual(int K, double beta, double gtilde, int n, PotentialForm form = PotentialForm::Cosine);

}  // namespace hlgt
