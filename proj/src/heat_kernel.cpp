#include "hlgt/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

namespace hlgt {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
}

// Irrep order for the adaptive sum: increasing Casimir. For U(1) that is
// 0, -1, 1, -2, 2, ...
std::vector<std::size_t> casimir_order(const IrrepTable& t) {
  std::vector<std::size_t> idx(t.entries.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](auto a, auto b) { return t.entries[a].casimir < t.entries[b].casimir; });
  return idx;
}

struct SortedTable {
  IrrepTable table;
  std::vector<std::size_t> order;
};

// Quadratures call the series millions of times for one group; keep the last table per thread.
const SortedTable& sorted_irreps(const GroupId& G) {
  thread_local std::optional<SortedTable> cache;
  if (!cache || cache->table.group.kind != G.kind || cache->table.group.cutoff != G.cutoff ||
      cache->table.group.q != G.q || cache->table.group.casimir_scale != G.casimir_scale) {
    IrrepTable t = irreps(G);
    auto order = casimir_order(t);
    cache = SortedTable{std::move(t), std::move(order)};
  }
  return *cache;
}

}  // namespace

SeriesValue heat_kernel_series(const HeatKernelSpec& spec, const GroupValue& g) {
  require_beta(spec.beta);
  const GroupId& G = spec.group;
  SeriesValue out;
  if (G.kind == GroupKind::IntegersZ) {
    out.value = dual_heat_kernel_Z(spec.beta, long(g.k));
    out.cutoff_used = 1;
    return out;
  }
  if (G.kind == GroupKind::LineR) {
    out.value = std::exp(-g.x * g.x / (2.0 * spec.beta)) / std::sqrt(2.0 * kPi * spec.beta);
    return out;
  }
  const SortedTable& st = sorted_irreps(G);
  const IrrepTable& t = st.table;
  const auto& order = st.order;
  out.small_beta_warning = !G.is_finite() && spec.beta < 1e-3;
  double acc = 0.0, abs_acc = 0.0;
  int used = 0;
  bool converged = G.is_finite();
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Irrep& r = t.entries[order[pos]];
    double w = r.dim * std::exp(-0.5 * spec.beta * r.casimir);
    acc += w * t.character(order[pos], g).real();
    abs_acc += r.dim * w;
    ++used;
    if (!G.is_finite() && used >= 5 && r.dim * w < spec.tol * abs_acc) {
      // U(1) adds +-n in pairs: finish the pair before stopping.
      if (G.kind == GroupKind::CircleU1 && pos + 1 < order.size() &&
          t.entries[order[pos + 1]].casimir == r.casimir)
        continue;
      converged = true;
      out.est_error = 2.0 * r.dim * w;
      break;
    }
  }
  if (!converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " for beta = %.6g (tolerance %.3e); raise the cutoff", spec.beta, spec.tol);
    throw CutoffError("heat-kernel series not converged at cutoff of " + G.to_string() + buf);
  }
  out.value = acc;
  out.cutoff_used = used;
  return out;
}

double heat_kernel_eval(const HeatKernelSpec& spec, const GroupValue& g) {
  return heat_kernel_series(spec, g).value;
}

std::vector<double> heat_kernel_table(const GroupId& G, double beta) {
  std::vector<double> v(G.order());
  for (int k = 0; k < G.order(); ++k) v[k] = heat_kernel_eval({G, beta}, GroupValue::integer(k));
  return v;
}

namespace {

// I_m(x) by the ascending series, each term positive; summed from the
// leading term in log space to avoid overflow at large m.
double bessel_i_series_scaled(double x, long m) {
  double log_t0 = m * std::log(0.5 * x) - std::lgamma(double(m) + 1.0) - x;
  double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (long k = 1; k < 10000; ++k) {
    term *= q / (double(k) * double(k + m));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(log_t0) * sum;
}

// Miller's downward recurrence for e^{-x} I_k(x), k = 0..M, normalized by
// e^{-x} (I_0 + 2 sum_k I_k) = 1.
std::vector<double> bessel_i_miller_scaled(double x, long M) {
  long start = std::max<long>(M, long(x)) + 40 + long(std::sqrt(40.0 * std::max<long>(M, long(x))));
  std::vector<double> v(M + 1, 0.0);
  double ip1 = 0.0, i = 1e-300, norm = 0.0;
  for (long k = start; k >= 1; --k) {
    double im1 = ip1 + 2.0 * k / x * i;
    ip1 = i;
    i = im1;
    if (k - 1 <= M) v[k - 1] = i;
    norm += (k - 1 == 0) ? i : 2.0 * i;
    if (i > 1e250) {  // rescale
      for (auto& e : v) e *= 1e-250;
      ip1 *= 1e-250;
      i *= 1e-250;
      norm *= 1e-250;
    }
  }
  for (auto& e : v) e /= norm;
  return v;
}

}  // namespace

std::vector<double> dual_heat_kernel_Z_range(double beta, long M) {
  require_beta(beta);
  if (M < 0) throw DomainError("M must be nonnegative");
  if (beta <= 20.0) {
    std::vector<double> v(M + 1);
    for (long m = 0; m <= M; ++m) v[m] = bessel_i_series_scaled(beta, m);
    return v;
  }
  return bessel_i_miller_scaled(beta, M);
}

double dual_heat_kernel_Z(double beta, long m) {
  m = std::labs(m);
  require_beta(beta);
  if (beta <= 20.0) return bessel_i_series_scaled(beta, m);
  return bessel_i_miller_scaled(beta, m).back();
}

double convolution_check(const GroupId& G, double a, double b) {
  require_beta(a);
  require_beta(b);
  double worst = 0.0;
  switch (G.kind) {
    case GroupKind::CyclicZn: {
      auto ra = heat_kernel_table(G, a), rb = heat_kernel_table(G, b), rab = heat_kernel_table(G, a + b);
      FiniteGroup F(G);
      for (int g = 0; g < F.n; ++g) {
        double c = 0.0;
        for (int h = 0; h < F.n; ++h) c += ra[h] * rb[F.mul(F.inv(h), g)];
        worst = std::max(worst, std::abs(c / F.n - rab[g]));
      }
      return worst;
    }
    case GroupKind::CircleU1: {
      // Truncated kernels are trigonometric polynomials of degree <= K; the
      // trapezoid rule with more than 2K nodes integrates their product exactly.
      int nodes = 4 * G.cutoff + 8;
      std::vector<double> ra(nodes), rb(nodes);
      for (int i = 0; i < nodes; ++i) {
        auto h = GroupValue::angle(2.0 * kPi * i / nodes);
        ra[i] = heat_kernel_eval({G, a}, h);
      }
      for (int gi = 0; gi < 64; ++gi) {
        auto g = GroupValue::angle(-kPi + 2.0 * kPi * (gi + 0.5) / 64);
        double c = 0.0;
        for (int i = 0; i < nodes; ++i) {
          auto h = GroupValue::angle(2.0 * kPi * i / nodes);
          c += ra[i] * heat_kernel_eval({G, b}, multiply(G, invert(G, h), g));
        }
        worst = std::max(worst, std::abs(c / nodes - heat_kernel_eval({G, a + b}, g)));
      }
      return worst;
    }
    case GroupKind::SU2: {
      std::mt19937_64 rng(7);
      for (int s = 0; s < 4; ++s) {
        auto g = random_element(G, rng);
        cplx c = haar_integrate(G, [&](const GroupValue& h) {
          return cplx(heat_kernel_eval({G, a}, h) * heat_kernel_eval({G, b}, multiply(G, invert(G, h), g)));
        });
        worst = std::max(worst, std::abs(c.real() - heat_kernel_eval({G, a + b}, g)));
      }
      return worst;
    }
    case GroupKind::IntegersZ: {
      // Counting-measure convolution on Z, truncated at |m| <= M.
      long M = G.cutoff;
      for (long m = -8; m <= 8; ++m) {
        double c = 0.0;
        for (long n = -M; n <= M; ++n) c += dual_heat_kernel_Z(a, n) * dual_heat_kernel_Z(b, m - n);
        worst = std::max(worst, std::abs(c - dual_heat_kernel_Z(a + b, m)));
      }
      return worst;
    }
    default: break;
  }
  throw UnsupportedError("convolution_check not available for " + G.to_string());
}

double heat_kernel_trace(const GroupId& G, double beta) {
  require_beta(beta);
  if (G.kind == GroupKind::SUq2) return suq2_partition(G.q, beta, G.cutoff);
  return heat_kernel_eval({G, beta}, identity(G));
}

double suq2_partition(double q, double beta, int cutoff, double tol) {
  require_beta(beta);
  IrrepTable t = irreps(GroupId::suq2(q, cutoff));
  double acc = 0.0, last = 0.0;
  for (const auto& r : t.entries) {
    last = r.dim * std::exp(-0.5 * beta * r.casimir);
    acc += last;
  }
  if (last > tol * acc) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "SU_q(2) partition sum: last term %.3e exceeds %.1e of the sum at cutoff %d", last, tol,
                  cutoff);
    throw CutoffError(buf);
  }
  return acc;
}

double su2_casimir_matched_partition(double beta, int cutoff) {
  require_beta(beta);
  double acc = 0.0;
  for (int n = 1; n <= cutoff; ++n) {
    double j = 0.5 * (n - 1);
    acc += double(n) * n * std::exp(-0.5 * beta * (j * (j + 1) + 0.25));
  }
  return acc;
}

}  // namespace hlgt
