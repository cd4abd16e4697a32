#include "hlgt/measure.hpp"

#include <cmath>

#include "hlgt/heat_kernel.hpp"

namespace hlgt {

HellingerStep hellinger_step(const GroupId& G, double beta, const GroupValue& h) {
  if (!(beta > 0)) throw DomainError("hellinger_step: beta must be positive");
  HellingerStep r;
  r.bound = std::sqrt(std::max(0.0, heat_kernel_eval({G, 2.0 * beta}, h)));
  if (G.is_finite()) {
    auto rho = heat_kernel_table(G, beta);
    FiniteGroup F(G);
    double acc = 0.0;
    for (int g = 0; g < F.n; ++g) acc += std::sqrt(std::max(0.0, rho[F.mul(int(h.k), g)] * rho[g]));
    r.quadrature = acc / F.n;
    return r;
  }
  if (G.kind != GroupKind::CircleU1) throw UnsupportedError("hellinger_step: Z_n or U(1) only");
  // The square root is not a trigonometric polynomial; use a fine periodic grid.
  const int nodes = 4096;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double g = -kPi + 2.0 * kPi * i / nodes;
    double a = heat_kernel_eval({G, beta}, GroupValue::angle(h.x + g));
    double b = heat_kernel_eval({G, beta}, GroupValue::angle(g));
    acc += std::sqrt(std::max(0.0, a * b));
  }
  r.quadrature = acc / nodes;
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Nonsingular: return "nonsingular";
    case Verdict::Singular: return "singular";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

void finish(AffinityProduct& p) {
  std::size_t n = p.products.size();
  if (n >= 2) {
    std::size_t first = n > 10 ? n - 11 : 0;
    p.log_slope = (p.log_products[n - 1] - p.log_products[first]) / double(n - 1 - first);
  }
  p.verdict = classify_product(p);
}

}  // namespace

Verdict classify_product(const AffinityProduct& p) {
  if (p.products.empty()) return Verdict::Inconclusive;
  double last = p.products.back();
  if (last < 1e-6 && p.log_slope < -0.05) return Verdict::Singular;
  if (last > 0.1 && p.log_slope > -1e-3) return Verdict::Nonsingular;
  return Verdict::Inconclusive;
}

AffinityProduct hellinger_product(const GroupId& G, double beta, const GroupValue& h, int s, int max_level,
                                  bool homogeneous) {
  AffinityProduct p;
  double log_prod = 0.0;
  for (int N = 0; N <= max_level; ++N) {
    double b = homogeneous ? beta : std::ldexp(beta, -N);
    double step = hellinger_step(G, b, h).quadrature;
    log_prod += s * std::log(step);
    p.levels.push_back(N);
    p.factors.push_back(std::pow(step, s));
    p.products.push_back(std::exp(log_prod));
    p.log_products.push_back(log_prod);
  }
  finish(p);
  return p;
}

double hellinger_z2_closed_form(double beta, int s, int level) {
  return std::pow(-std::expm1(-std::ldexp(beta, -level)), 0.5 * s);
}

double hellinger_gaussian_closed_form(double beta, double x2, int level) {
  return std::exp(-std::ldexp(1.0, level) * x2 / (8.0 * beta));
}

double hellinger_gaussian_quadrature(double beta, double x, int level) {
  double t = std::ldexp(beta, -level);
  double sd = std::sqrt(t), lo = -std::abs(x) - 40.0 * sd, hi = std::abs(x) + 40.0 * sd;
  const int nodes = 20000;
  double hstep = (hi - lo) / nodes, acc = 0.0;
  auto rho = [t](double y) { return std::exp(-y * y / (2.0 * t)) / std::sqrt(2.0 * kPi * t); };
  for (int i = 0; i <= nodes; ++i) {
    double g = lo + i * hstep;
    double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
    acc += w * std::sqrt(rho(x + g) * rho(g));
  }
  return acc * hstep;
}

double theta_sum(double beta, double a) {
  if (!(beta > 0)) throw DomainError("theta_sum: beta must be positive");
  if (beta >= 1.0) {
    double s = 0.0;
    long n0 = long(std::floor(-a));
    for (long n = n0 - 40; n <= n0 + 41; ++n) s += std::exp(-0.5 * beta * (n + a) * (n + a));
    return s;
  }
  // sqrt(2 pi / beta) sum_k e^{-2 pi^2 k^2 / beta} cos(2 pi k a)
  double s = 1.0;
  for (long k = 1; k < 100; ++k) {
    double w = std::exp(-2.0 * kPi * kPi * double(k) * k / beta);
    if (w < 1e-300) break;
    s += 2.0 * w * std::cos(2.0 * kPi * k * a);
  }
  return std::sqrt(2.0 * kPi / beta) * s;
}

double z_affinity(double beta, long k) { return std::exp(log_z_affinity(beta, k)); }

double log_z_affinity(double beta, long k) {
  if (!(beta > 0)) throw DomainError("z_affinity: beta must be positive");
  // sqrt(m(n) m(n+k)) = e^{-beta k^2 / 8} e^{-beta (n + k/2)^2 / 2} / Z
  double gauss = -beta * double(k) * k / 8.0;
  if (k % 2 == 0) return gauss;
  if (beta >= 1.0) return gauss + std::log(theta_sum(beta, 0.5) / theta_sum(beta, 0.0));
  // Poisson side: the theta ratio is 1 + O(e^{-2 pi^2 / beta}); keep the offsets separate.
  double odd = 0.0, even = 0.0;
  for (long j = 1; j < 100; ++j) {
    double w = std::exp(-2.0 * kPi * kPi * double(j) * j / beta);
    if (w < 1e-300) break;
    even += 2.0 * w;
    odd += 2.0 * w * ((j % 2) ? -1.0 : 1.0);
  }
  return gauss + std::log1p(odd) - std::log1p(even);
}

namespace {

int first_level(const Dyadic& d) { return d.num == 0 ? 0 : d.exp; }

}  // namespace

DyadicBeta geometric_beta(double tau) {
  return [tau](const Dyadic& d) { return std::exp2(-tau * first_level(d)); };
}

AffinityProduct kakutani_affinity_Z(const DyadicBeta& beta, long k, int max_level) {
  if (max_level > 62) throw ConfigError("dyadic levels above 62 do not fit the exact representation");
  AffinityProduct p;
  double log_prod = 0.0;
  for (int l = 0; l <= max_level; ++l) {
    // Dyadics m / 2^l with m odd; every one is evaluated (no assumption of a level-only table).
    double lf = 0.0;
    if (l == 0) {
      lf = log_z_affinity(beta(Dyadic::make(0, 0)), k);
    } else {
      std::int64_t count = std::int64_t(1) << (l - 1);
      // Level-constant tables are the common case; evaluate once when the first and last agree.
      double b_first = beta(Dyadic::make(1, l)), b_last = beta(Dyadic::make((count << 1) - 1, l));
      if (b_first == b_last && l > 12) {
        lf = double(count) * log_z_affinity(b_first, k);
      } else {
        for (std::int64_t m = 1; m < (count << 1); m += 2) lf += log_z_affinity(beta(Dyadic::make(m, l)), k);
      }
    }
    log_prod += lf;
    p.levels.push_back(l);
    p.factors.push_back(std::exp(lf));
    p.products.push_back(std::exp(log_prod));
    p.log_products.push_back(log_prod);
  }
  finish(p);
  return p;
}

L1Report l1_verdict(const DyadicBeta& beta, int max_level) {
  if (max_level > 62) throw ConfigError("dyadic levels above 62 do not fit the exact representation");
  L1Report r;
  for (int l = 0; l <= max_level; ++l) {
    double s = 0.0;
    if (l == 0) {
      s = beta(Dyadic::make(0, 0));
    } else {
      std::int64_t count = std::int64_t(1) << (l - 1);
      double b_first = beta(Dyadic::make(1, l)), b_last = beta(Dyadic::make((count << 1) - 1, l));
      if (b_first == b_last && l > 12)
        s = double(count) * b_first;
      else
        for (std::int64_t m = 1; m < (count << 1); m += 2) s += beta(Dyadic::make(m, l));
    }
    r.level_sums.push_back(s);
    r.partial_sum += s;
  }
  // Ratio test on the last five level contributions.
  std::size_t n = r.level_sums.size();
  if (n >= 6) {
    double worst_ratio = 0.0;
    bool nondecreasing = true;
    for (std::size_t i = n - 5; i < n; ++i) {
      double prev = r.level_sums[i - 1], cur = r.level_sums[i];
      worst_ratio = std::max(worst_ratio, prev > 0 ? cur / prev : 0.0);
      nondecreasing = nondecreasing && cur >= prev;
    }
    if (worst_ratio < 0.9 && r.level_sums.back() < 1e-3 * r.partial_sum)
      r.verdict = Verdict::Nonsingular;
    else if (nondecreasing)
      r.verdict = Verdict::Singular;
  }
  return r;
}

}  // namespace hlgt
