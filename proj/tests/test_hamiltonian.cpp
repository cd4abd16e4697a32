#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "hlgt/dyadic.hpp"
#include "hlgt/field_algebra.hpp"
#include "hlgt/hamiltonian.hpp"

using namespace hlgt;

TEST_CASE("coupling schedule") {
  auto s = CouplingSchedule::from_bare(1.3, 2.0);
  for (int N = 0; N < 6; ++N) {
    CHECK(s.a(N) == doctest::Approx(2.0 / (1 << N)));
    CHECK(s.g(N) == doctest::Approx(2.6 / (1 << N)));
    CHECK(s.g(N) == doctest::Approx(s.a(N) * 1.3));
    CHECK(s.prefactor(N) == doctest::Approx(s.g(N) * s.g(N) / (2 * s.a(N))));
  }
}

TEST_CASE("laplacian is the second difference on Z_n") {
  for (int n : {3, 4, 7}) {
    auto G = GroupId::cyclic(n);
    Mat ref = Mat::Zero(n, n);
    for (int g = 0; g < n; ++g) {
      ref(g, g) = 2;
      ref(g, (g + 1) % n) -= 1;
      ref(g, (g + n - 1) % n) -= 1;
    }
    CHECK(max_abs(neg_laplacian(G, KSBasis::Configuration) - ref) < 1e-13);
    Eigen::SelfAdjointEigenSolver<Mat> es(neg_laplacian(G, KSBasis::Fourier));
    Eigen::SelfAdjointEigenSolver<Mat> er(ref);
    CHECK((es.eigenvalues() - er.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }
  Mat z2(2, 2);
  z2 << 2, -2, -2, 2;
  CHECK(max_abs(neg_laplacian(GroupId::cyclic(2), KSBasis::Configuration) - z2) < 1e-14);
}

TEST_CASE("strong-coupling Hamiltonian") {
  auto G = GroupId::cyclic(3);
  auto s = CouplingSchedule::from_bare(1.3, 2.0);
  CHECK_THROWS_AS(ks_strong_matrix(G, 2, s), ResourceError);
  for (int N = 0; N <= 1; ++N) {
    Mat H = ks_strong_matrix(G, N, s);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
    // c_1 = 3 on Z_3
    CHECK(es.eigenvalues()(1) == doctest::Approx(3.0 * s.prefactor(N)));
    CHECK(spectral_gap(G, N, s) == doctest::Approx(3.0 * s.prefactor(N)));
    Mat Hc = ks_strong_matrix(G, N, s, KSBasis::Configuration);
    Eigen::SelfAdjointEigenSolver<Mat> ec(Hc);
    CHECK((ec.eigenvalues() - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11);
  }
  // g_N^2 / (2 a_N) halves with each level
  CHECK(s.prefactor(1) == doctest::Approx(s.prefactor(0) / 2));
}

TEST_CASE("Wilson loops are eigenvectors") {
  for (int n : {2, 3, 4})
    for (int N : {0, 1, 2}) {
      if (std::pow(n, 1 << N) > 64) continue;
      auto G = GroupId::cyclic(n);
      auto r = wilson_loop_eigencheck(G, 1, N, 2.0, 1.3);
      double c1 = 2 * (1 - std::cos(2 * kPi / n));
      CHECK(r.expected == doctest::Approx(c1 * 2.0 * 1.69 / 2));
      CHECK(r.rayleigh == doctest::Approx(r.expected).epsilon(1e-12));
      CHECK(r.eigen_residual < 1e-11);
      CHECK(r.vacuum_residual < 1e-12);
      CHECK(std::abs(r.ground_energy) < 1e-12);
    }
}

TEST_CASE("Gibbs state, refinement and gauge symmetry") {
  auto G = GroupId::cyclic(3);
  auto s = CouplingSchedule::from_bare(1.3, 2.0);
  for (int N = 0; N <= 1; ++N) {
    CHECK(gibbs_is_heat_kernel_residual(G, N, 0.7, s) < 1e-12);
  }
  CHECK(refinement_coherence_residual(G, 0, s) < 1e-12);
  CHECK(gauge_commutator_residual(G, cofinal_lattice(1), s.prefactor(1), 10) < 1e-12);
  CHECK(gauge_commutator_residual(GroupId::cyclic(2), cofinal_lattice(2), s.prefactor(2), 10) < 1e-12);
  CHECK(refinement_coherence_residual(GroupId::cyclic(2), 1, s) < 1e-12);
  // direct check: exp of the one-edge generator is convolution by the heat kernel table
  Mat H1 = ks_strong_matrix_edges(G, 1, 1.0, KSBasis::Configuration);
  Mat E = (-0.5 * H1).exp();
  double rho[3];
  for (int g = 0; g < 3; ++g) {
    rho[g] = 0;
    for (int k = 0; k < 3; ++k) rho[g] += std::exp(-0.5 * 2 * (1 - std::cos(2 * kPi * k / 3))) * std::cos(2 * kPi * k * g / 3);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(std::abs(E(a, b) - rho[(a - b + 3) % 3] / 3) < 1e-13);
}

TEST_CASE("O(2) rotor Trotter product") {
  Mat H = o2_rotor_matrix(5, 2.0, 0.5);
  CHECK(H(5, 5).real() == 0.0);
  CHECK(H(6, 6).real() == doctest::Approx(1.0));
  CHECK(H(5, 6).real() == doctest::Approx(-4.0));
  CHECK(H(5, 7).real() == 0.0);
  CHECK(max_abs(H - H.adjoint()) == 0.0);
  double prev = trotter_residual(16, 1.0, 0.5, 4);
  for (int n : {8, 16, 32, 64}) {
    double r = trotter_residual(16, 1.0, 0.5, n);
    CHECK(r < prev);
    CHECK(r / prev > 0.35);
    CHECK(r / prev < 0.65);
    prev = r;
  }
  // the Villain factor targets the Villain Hamiltonian, which differs from the cosine one at finite coupling
  CHECK(trotter_residual(16, 1.0, 0.5, 64, PotentialForm::Villain) > 10 * prev);
  CHECK(trotter_residual(20, 1.0, 1e6, 4) < 1e-5);
  CHECK_THROWS_AS(trotter_residual(4, 1.0, 0.05, 4), CutoffError);
  CHECK_THROWS_AS(o2_rotor_matrix(3, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(trotter_residual(20, 1.0, 1.0, 0), ConfigError);
}
