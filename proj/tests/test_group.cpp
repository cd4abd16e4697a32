#include <doctest.h>

#include <cmath>
#include <random>

#include "hlgt/group.hpp"

using namespace hlgt;

namespace {

// Discrete Laplacian on Z_n applied to the character chi_k, divided by chi_k(m).
double laplacian_eigenvalue_zn(int n, int k) {
  auto chi = [&](int m) { return std::polar(1.0, 2.0 * kPi * k * m / n); };
  int m = 1;
  cplx lap = chi(m + 1) + chi(m - 1 + n) - 2.0 * chi(m);
  return -(lap / chi(m)).real();
}

double su2_chi(int two_j, double th) {
  if (std::abs(std::sin(th)) < 1e-14) return two_j + 1.0;
  return std::sin((two_j + 1) * th) / std::sin(th);
}

}  // namespace

TEST_CASE("Z_n Casimirs are discrete Laplacian eigenvalues") {
  for (int n : {2, 3, 4, 7}) {
    auto t = irreps(GroupId::cyclic(n));
    REQUIRE(t.entries.size() == std::size_t(n));
    for (const auto& e : t.entries) {
      CHECK(e.dim == 1);
      CHECK(e.casimir == doctest::Approx(laplacian_eigenvalue_zn(n, e.label)).epsilon(1e-13));
    }
  }
  auto z2 = irreps(GroupId::cyclic(2));
  CHECK(z2.entries[z2.index_of(1)].casimir == doctest::Approx(4.0));
  auto paper = irreps(GroupId::z2_paper());
  CHECK(paper.entries[paper.index_of(1)].casimir == doctest::Approx(1.0));
}

TEST_CASE("U(1) truncated to K = 3") {
  auto t = irreps(GroupId::u1(3));
  REQUIRE(t.entries.size() == 7);
  for (const auto& e : t.entries) {
    CHECK(e.dim == 1);
    CHECK(e.casimir == doctest::Approx(double(e.label) * e.label));
    cplx v = t.character(t.index_of(e.label), GroupValue::angle(0.7));
    CHECK(std::abs(v - std::polar(1.0, 0.7 * e.label)) < 1e-14);
  }
}

TEST_CASE("SU(2) Casimirs proportional to the radial Laplacian eigenvalue") {
  auto t = irreps(GroupId::su2(2));
  REQUIRE(t.entries.size() == 3);
  // -(f'' + 2 cot f') / f on the unit 3-sphere, by central differences.
  double th = 0.9, h = 1e-4;
  std::vector<double> ratio;
  for (const auto& e : t.entries) {
    CHECK(e.dim == e.label + 1);
    if (e.label == 0) continue;
    auto f = [&](double x) { return su2_chi(e.label, x); };
    double d2 = (f(th + h) - 2 * f(th) + f(th - h)) / (h * h);
    double d1 = (f(th + h) - f(th - h)) / (2 * h);
    double lap = -(d2 + 2.0 / std::tan(th) * d1) / f(th);
    ratio.push_back(e.casimir / lap);
  }
  CHECK(ratio[0] == doctest::Approx(ratio[1]).epsilon(1e-6));
}

TEST_CASE("fusion multiplicities") {
  auto u = irreps(GroupId::u1(4));
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int n = -4; n <= 4; ++n) CHECK(fusion_multiplicity(u, n, a, b) == (n == a + b ? 1 : 0));
  auto z2 = irreps(GroupId::cyclic(2));
  CHECK(fusion_multiplicity(z2, 1, 1, 0) == 1);
  CHECK(fusion_multiplicity(z2, 1, 1, 1) == 0);

  // SU(2): Weyl-measure quadrature of chi_a chi_b chi_pi as an independent oracle.
  auto s = irreps(GroupId::su2(4));
  auto oracle = [](int pi, int a, int b) {
    int n = 4000;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      double th = kPi * (i + 0.5) / n;
      acc += 2.0 / kPi * std::pow(std::sin(th), 2) * su2_chi(pi, th) * su2_chi(a, th) * su2_chi(b, th) * kPi / n;
    }
    return acc;
  };
  CHECK(fusion_multiplicity(s, 2, 1, 1) == 1);
  CHECK(fusion_multiplicity(s, 2, 1, 1) == std::lround(oracle(2, 1, 1)));
  CHECK(fusion_multiplicity(s, 1, 2, 2) == std::lround(oracle(1, 2, 2)));
  CHECK(fusion_multiplicity(s, 0, 1, 3) == 0);
}

TEST_CASE("Haar integration") {
  for (auto G : {GroupId::cyclic(5), GroupId::u1(16), GroupId::su2(6)})
    CHECK(std::abs(haar_integrate(G, [](const GroupValue&) { return cplx(1.0); }) - 1.0) < 1e-13);
  auto t = irreps(GroupId::u1(8));
  for (int n : {1, 2, 5}) {
    cplx v = haar_integrate(GroupId::u1(8), [&](const GroupValue& g) { return t.character(t.index_of(n), g); });
    CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("group law on samples") {
  std::mt19937_64 rng(7);
  for (auto G : {GroupId::cyclic(6), GroupId::u1(8), GroupId::su2(4)}) {
    for (int i = 0; i < 50; ++i) {
      auto a = random_element(G, rng), b = random_element(G, rng), c = random_element(G, rng);
      CHECK(approx_equal(G, multiply(G, multiply(G, a, b), c), multiply(G, a, multiply(G, b, c))));
      CHECK(approx_equal(G, multiply(G, a, invert(G, a)), identity(G)));
    }
  }
  FiniteGroup F(GroupId::cyclic(5));
  CHECK(F.mul(3, 4) == 2);
  CHECK(F.inv(2) == 3);
}

TEST_CASE("group spec parsing") {
  CHECK(GroupId::parse("z2").order() == 2);
  CHECK(GroupId::parse("zN:5").order() == 5);
  CHECK(GroupId::parse("u1:12").cutoff == 12);
  CHECK(GroupId::parse("suq2:1.01,40").kind == GroupKind::SUq2);
  CHECK_THROWS_AS(GroupId::parse("so3"), ConfigError);
  CHECK_THROWS_AS(GroupId::parse("suq2:1.01"), ConfigError);
  CHECK(GroupId::parse(GroupId::u1(9).to_string()).cutoff == 9);
}
