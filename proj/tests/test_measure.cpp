#include <doctest.h>

#include "hlgt/measure.hpp"

using namespace hlgt;

namespace {

double direct_affinity(double beta, long k) {
  double Z = 0, acc = 0;
  for (long n = -400; n <= 400; ++n) Z += std::exp(-0.5 * beta * n * n);
  for (long n = -400; n <= 400; ++n) acc += std::exp(-0.25 * beta * (double(n) * n + double(n + k) * (n + k)));
  return acc / Z;
}

}  // namespace

TEST_CASE("Hellinger step on Z_2") {
  auto G = GroupId::z2_paper();
  for (double beta : {0.25, 1.0, 3.0}) {
    auto st = hellinger_step(G, beta, GroupValue::integer(1));
    // rho(+-) = 1 +- e^{-beta/2}: mean of sqrt((1 + e)(1 - e)) over two points
    CHECK(st.quadrature == doctest::Approx(std::sqrt(1 - std::exp(-beta))).epsilon(1e-14));
    CHECK(st.quadrature <= 1.0);
    CHECK(hellinger_step(G, beta, GroupValue::integer(0)).quadrature == doctest::Approx(1.0));
  }
  CHECK(hellinger_z2_closed_form(1.0, 1, 0) == doctest::Approx(0.795060).epsilon(1e-6));
  for (int N = 0; N < 8; ++N) {
    double step = hellinger_step(G, std::ldexp(1.0, -N), GroupValue::integer(1)).quadrature;
    CHECK(std::pow(step, 2) == doctest::Approx(hellinger_z2_closed_form(1.0, 2, N)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(hellinger_step(G, -1.0, GroupValue::integer(1)), DomainError);
}

TEST_CASE("Hellinger on U(1) and on the line") {
  auto U = GroupId::u1(120);
  auto st = hellinger_step(U, 0.3, GroupValue::angle(0.0));
  CHECK(st.quadrature == doctest::Approx(1.0).epsilon(1e-10));
  // for a narrow kernel the circle behaves like the line
  double x = 0.2;
  auto narrow = hellinger_step(U, 0.01, GroupValue::angle(x));
  CHECK(narrow.quadrature == doctest::Approx(std::exp(-x * x / (8 * 0.01))).epsilon(1e-8));
  for (int N = 0; N < 5; ++N)
    CHECK(hellinger_gaussian_quadrature(1.0, 0.7, N) ==
          doctest::Approx(hellinger_gaussian_closed_form(1.0, 0.49, N)).epsilon(1e-9));
  auto p = hellinger_product(GroupId::z2_paper(), 1.0, GroupValue::integer(1), 1, 20);
  CHECK(p.verdict == Verdict::Singular);
  double lp = 0;
  for (int N = 0; N <= 20; ++N) lp += std::log(hellinger_z2_closed_form(1.0, 1, N));
  CHECK(p.log_products.back() == doctest::Approx(lp).epsilon(1e-12));
  auto hom = hellinger_product(GroupId::z2_paper(), 1.0, GroupValue::integer(1), 1, 80, true);
  CHECK(hom.verdict == Verdict::Singular);
}

TEST_CASE("affinities on the dual of U(1)") {
  for (double beta : {0.01, 0.3, 1.0, 4.0})
    for (long k : {0L, 1L, 3L}) CHECK(z_affinity(beta, k) == doctest::Approx(direct_affinity(beta, k)).epsilon(1e-12));
  for (double beta : {0.001, 0.05, 2.0})
    for (double a : {0.0, 0.25, 0.5}) {
      double direct = 0;
      for (long n = -5000; n <= 5000; ++n) direct += std::exp(-0.5 * beta * (n + a) * (n + a));
      CHECK(theta_sum(beta, a) == doctest::Approx(direct).epsilon(1e-12));
    }
  CHECK(z_affinity(1.0, 0) == doctest::Approx(1.0));
}

TEST_CASE("geometric families: Kakutani against the l1 criterion") {
  auto b = geometric_beta(1.5);
  CHECK(b(Dyadic::make(0, 0)) == 1.0);
  CHECK(b(Dyadic::make(1, 1)) == doctest::Approx(std::pow(2.0, -1.5)));
  CHECK(b(Dyadic::make(3, 3)) == doctest::Approx(std::pow(2.0, -4.5)));
  for (double tau : {2.0, 1.5}) {
    auto K = kakutani_affinity_Z(geometric_beta(tau), 1, 30);
    auto l1 = l1_verdict(geometric_beta(tau), 30);
    CHECK(K.verdict == Verdict::Nonsingular);
    CHECK(l1.verdict == Verdict::Nonsingular);
    // the l1 sum is geometric with ratio 2^{1 - tau}
    double sum = 1;
    for (int l = 1; l <= 30; ++l) sum += std::ldexp(std::pow(2.0, -tau * l), l - 1);
    CHECK(l1.partial_sum == doctest::Approx(sum).epsilon(1e-12));
  }
  auto half = kakutani_affinity_Z(geometric_beta(0.5), 1, 30);
  CHECK(half.verdict == Verdict::Singular);
  CHECK(l1_verdict(geometric_beta(0.5), 30).verdict == Verdict::Singular);
  // tau = 1 sits on the boundary: the l1 sum diverges linearly while the product decays only like e^{-l/16}
  CHECK(l1_verdict(geometric_beta(1.0), 30).verdict == Verdict::Singular);
  auto one = kakutani_affinity_Z(geometric_beta(1.0), 1, 60);
  CHECK(one.verdict != Verdict::Nonsingular);
  CHECK(one.log_slope == doctest::Approx(-1.0 / 16).epsilon(0.02));
  // the factor at a level is a product of per-dyadic affinities
  auto K = kakutani_affinity_Z(geometric_beta(1.0), 2, 3);
  CHECK(K.factors[3] == doctest::Approx(std::pow(direct_affinity(0.125, 2), 4)).epsilon(1e-12));
}
