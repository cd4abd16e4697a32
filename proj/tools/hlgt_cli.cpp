#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hlgt/dyadic.hpp"
#include "hlgt/field_algebra.hpp"
#include "hlgt/group.hpp"
#include "hlgt/hamiltonian.hpp"
#include "hlgt/heat_kernel.hpp"
#include "hlgt/measure.hpp"
#include "hlgt/observables.hpp"
#include "hlgt/rg_flow.hpp"
#include "hlgt/serialize.hpp"
#include "hlgt/states.hpp"

using namespace hlgt;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every option of every subcommand lands here; handlers read what they need.
struct Opts {
  std::string group = "z2";
  double casimir_scale = NAN;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  bool csv = false;

  double beta = 1.0, beta0 = 1.0, beta1 = 1.0, beta2 = 1.0;
  double L = 1.0;
  bool thermo = false;
  int irrep = 1, irrep2 = -1;
  double tau = 0.0, tau2 = 0.5;
  std::string covariance;
  std::string at;
  bool trace = false;
  std::string family = "heat";
  std::string levels = "0..2";
  int level = 1;
  int samples = 100;
  double g0 = NAN, gb = 1.0, gtilde = 0.5;
  int cutoff = 16;
  std::string steps_list = "8,16,32";
  bool villain = false;
  double nu = 1.0;
  int steps = 5;
  std::string emit_plot;
  int grid = 200;
  double grid_min = 0.01, grid_max = 10.0;
  std::string shift = "1";
  int power = 1;
  bool homogeneous = false;
  std::string generator = "x0";
  int count = 6;
  std::string sweep;
};

struct Outcome {
  std::vector<json> records;
  bool failed = false;
};

GroupId make_group(const Opts& o) {
  GroupId G = GroupId::parse(o.group);
  if (!std::isnan(o.casimir_scale)) G.casimir_scale = o.casimir_scale;
  G.validate();
  return G;
}

double tolerance(const Opts& o, double fallback) {
  if (o.tol) return *o.tol;
  if (const char* env = std::getenv("HLGT_TOLERANCE")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw UsageError(std::string("HLGT_TOLERANCE is not a positive number: ") + env);
    return v;
  }
  return fallback;
}

class Emitter {
 public:
  Emitter(std::string cmd, const Opts& o, json params) : cmd_(std::move(cmd)), o_(o), params_(std::move(params)) {}

  json base(const json& extra_params = json::object()) const {
    json p = params_;
    for (auto& [k, v] : extra_params.items()) p[k] = v;
    std::string group = fixed_group_, notes = fixed_notes_;
    if (group.empty()) {
      try {
        GroupId G = make_group(o_);
        group = G.to_string();
        notes = G.convention();
      } catch (const Error&) {
        group = o_.group;
      }
    }
    return {{"cmd", cmd_}, {"group", group}, {"params", p}, {"seed", o_.seed}, {"convention_notes", notes}};
  }

  void value(Outcome& out, double v, double est_error = 0.0, const json& extra_params = json::object(),
             const json& fields = json::object()) const {
    json r = base(extra_params);
    r["value"] = v;
    r["est_error"] = est_error;
    for (auto& [k, x] : fields.items()) r[k] = x;
    out.records.push_back(std::move(r));
  }

  // residual <= tol passes; `expect_above` flips the test for negative controls.
  void residual(Outcome& out, double res, double tol, const json& extra_params = json::object(),
                const json& fields = json::object(), bool expect_above = false) const {
    json r = base(extra_params);
    r["residual"] = res;
    r["est_error"] = 0.0;
    r["tolerance"] = tol;
    bool pass = expect_above ? res > tol : res <= tol;
    if (expect_above) r["expect"] = "above_tolerance";
    r["pass"] = pass;
    for (auto& [k, x] : fields.items()) r[k] = x;
    if (!pass) out.failed = true;
    out.records.push_back(std::move(r));
  }

  // For commands that do not read --group.
  Emitter& fixed_group(std::string name, std::string notes) {
    fixed_group_ = std::move(name);
    fixed_notes_ = std::move(notes);
    return *this;
  }

 private:
  std::string fixed_group_, fixed_notes_;
  std::string cmd_;
  const Opts& o_;
  json params_;
};

std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      int v = std::stoi(s);
      return {v, v};
    }
    int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
    if (a < 0 || b < a) throw UsageError("level range must satisfy 0 <= A <= B: " + s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("malformed level range '" + s + "' (expected A..B)");
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
  } catch (const std::logic_error&) {
    throw UsageError("malformed integer list '" + s + "'");
  }
  if (v.empty()) throw UsageError("empty integer list");
  return v;
}

GroupValue parse_element(const GroupId& G, const std::string& s) {
  if (s.empty()) return identity(G);
  try {
    switch (G.kind) {
      case GroupKind::CyclicZn:
      case GroupKind::IntegersZ: return GroupValue::integer(std::stoll(s));
      case GroupKind::CircleU1: return GroupValue::angle(std::stod(s));
      case GroupKind::LineR: return {0, std::stod(s), {1, 0, 0, 0}};
      case GroupKind::SU2: {
        double th = std::stod(s);
        return GroupValue::quaternion(std::cos(th), std::sin(th), 0, 0);
      }
      case GroupKind::SUq2: break;
    }
  } catch (const std::logic_error&) {
    throw UsageError("malformed group element '" + s + "'");
  }
  throw UnsupportedError("no pointwise elements on " + G.to_string());
}

// ---- irreps / heat-kernel -------------------------------------------------

Outcome cmd_irreps(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  Emitter em("irreps", o, json::object());
  for (const auto& e : irreps(G).entries)
    em.value(out, e.casimir, 0.0, {{"label", e.label}}, {{"name", e.name}, {"dim", e.dim}, {"quantity", "casimir"}});
  return out;
}

Outcome cmd_heat_kernel(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  Emitter em("heat-kernel", o, {{"beta", o.beta}});
  if (o.trace) {
    auto s = heat_kernel_series({G, o.beta}, identity(G));
    em.value(out, heat_kernel_trace(G, o.beta), s.est_error, json::object(),
             {{"beta", o.beta}, {"trace", heat_kernel_trace(G, o.beta)}, {"cutoff_used", s.cutoff_used}});
    return out;
  }
  auto s = heat_kernel_series({G, o.beta}, parse_element(G, o.at));
  json fields = {{"beta", o.beta}, {"cutoff_used", s.cutoff_used}};
  if (s.small_beta_warning) fields["warning"] = "small beta: series needs many terms";
  em.value(out, s.value, s.est_error, {{"at", o.at.empty() ? "identity" : o.at}}, fields);
  return out;
}

// ---- verify ---------------------------------------------------------------

StateFamily make_family(const Opts& o, const GroupId& G, int max_level) {
  if (o.family == "heat") return StateFamily::heat(G, o.beta);
  if (o.family == "vacuum") return StateFamily::vacuum(G);
  if (o.family == "dual") return StateFamily::dual(G, o.beta);
  if (o.family == "inhom") {
    // beta_d = beta 2^{-tau l(d)} with l the level at which d first appears
    DyadicBeta b = geometric_beta(o.tau);
    double base = o.beta;
    auto f = [b, base](const Dyadic& d) { return base * b(d); };
    return StateFamily::inhomogeneous(G, InhomogeneousTable::from_functions(max_level + 1, f, f));
  }
  throw UsageError("unknown family '" + o.family + "' (heat | inhom | dual | vacuum)");
}

Outcome cmd_verify_coherence(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  auto [A, B] = parse_range(o.levels);
  StateFamily fam = make_family(o, G, B);
  bool u1 = G.kind == GroupKind::CircleU1;
  double tol = tolerance(o, G.is_finite() ? 1e-12 : 1e-8);
  Emitter em("verify coherence", o, {{"family", o.family}, {"beta", o.beta}, {"levels", o.levels}});
  auto one = [&](int a, int b) {
    OrientedLattice c = cofinal_lattice(a), f = cofinal_lattice(b);
    double res;
    std::string span;
    if (G.is_finite()) {
      auto r = coherence_residual(fam, c, f, o.seed);
      res = r.residual;
      span = r.spanning_set;
    } else if (u1) {
      res = coherence_residual_u1(fam, c, f);
      span = "fourier-modes";
    } else if (G.kind == GroupKind::IntegersZ && fam.kind == FamilyKind::DualHeatKernel) {
      res = coherence_residual_dual_Z(fam, c, f, G.cutoff);
      span = "delta-multiplications";
    } else {
      throw UnsupportedError("coherence check not available for " + fam.name() + " on " + G.to_string());
    }
    em.residual(out, res, tol, {{"from", a}, {"to", b}},
                {{"family", fam.name()}, {"levels", std::to_string(a) + ".." + std::to_string(b)}, {"spanning_set", span}});
  };
  if (A == B) throw UsageError("coherence needs two distinct levels");
  for (int N = A; N < B; ++N) one(N, N + 1);
  if (B > A + 1) one(A, B);
  return out;
}

Outcome cmd_verify_inversion(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  if (!G.is_finite()) throw UnsupportedError("inversion check needs a finite backend");
  StateFamily fam = make_family(o, G, o.level);
  OrientedLattice lat = cofinal_lattice(o.level);
  double tol = tolerance(o, 1e-13);
  Emitter em("verify inversion", o, {{"family", o.family}, {"beta", o.beta}, {"level", o.level}});
  for (int e = 0; e < lat.size(); ++e) em.residual(out, inversion_residual(fam, lat, e), tol, {{"edge", e}});
  return out;
}

Outcome cmd_verify_gauge(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  OrientedLattice lat = cofinal_lattice(o.level);
  Emitter em("verify gauge", o, {{"family", o.family}, {"beta", o.beta}, {"level", o.level}});
  if (o.family == "dual" && G.kind == GroupKind::IntegersZ) {
    auto r = dual_gauge_check(o.beta, lat, G.cutoff, o.seed);
    em.residual(out, r.u1_type, tolerance(o, 1e-12), {{"check", "momentum-phases"}});
    em.residual(out, r.z_type, 1e-3, {{"check", "configuration-shift"}}, json::object(), true);
    return out;
  }
  StateFamily fam = make_family(o, G, o.level);
  em.residual(out, gauge_invariance_residual(fam, lat, o.samples, o.seed), tolerance(o, 1e-12),
              {{"samples", o.samples}});
  return out;
}

Outcome cmd_verify_identities(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  double tol = tolerance(o, G.is_finite() ? 1e-12 : 1e-8);
  Emitter em("verify identities", o, {{"beta", o.beta}});
  if (G.kind == GroupKind::IntegersZ) {
    auto r = dual_heat_kernel_Z_range(o.beta, G.cutoff);
    double s = r[0];
    for (std::size_t m = 1; m < r.size(); ++m) s += 2.0 * r[m];
    em.residual(out, std::abs(s - 1.0), tolerance(o, 1e-12), {{"identity", "dual-normalization"}});
    return out;
  }
  HeatKernelSpec spec{G, o.beta};
  double mass = haar_integrate(G, [&](const GroupValue& g) { return cplx(heat_kernel_eval(spec, g)); }).real();
  em.residual(out, std::abs(mass - 1.0), tolerance(o, 1e-12), {{"identity", "unit-mass"}});
  em.residual(out, convolution_check(G, o.beta, o.beta), tol, {{"identity", "convolution"}});
  if (G.is_finite()) {
    auto r = integral_identity_residuals(StateFamily::heat(G, o.beta));
    em.residual(out, r.composition, tol, {{"identity", "composition-integral"}});
    em.residual(out, r.deletion, tol, {{"identity", "deletion-integral"}});
  }
  return out;
}

Outcome cmd_verify_intertwiners(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  if (!G.is_finite()) throw UnsupportedError("intertwiners need a finite backend");
  double tol = tolerance(o, 1e-12);
  Emitter em("verify intertwiners", o, {{"level", o.level}});
  auto ru = refine_unitaries(G);
  auto unitarity = [](const Mat& U) { return max_abs(U.adjoint() * U - Mat::Identity(U.cols(), U.cols())); };
  em.residual(out, unitarity(ru.U_L), tolerance(o, 1e-13), {{"operator", "U_L"}});
  em.residual(out, unitarity(ru.V_R), tolerance(o, 1e-13), {{"operator", "V_R"}});
  em.residual(out, unitarity(ru.U_iota), tolerance(o, 1e-13), {{"operator", "U_iota"}});
  em.residual(out, max_abs(ru.flip * ru.U_L * ru.flip - ru.V_R), tolerance(o, 0.0), {{"operator", "flip U_L flip - V_R"}});
  em.residual(out, eta_intertwining_residual(G, o.level), tol, {{"operator", "eta"}});
  em.residual(out, zeta_intertwining_residual(G, o.level), tol, {{"operator", "zeta"}});
  return out;
}

Outcome cmd_verify_hamiltonian(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  double tol = tolerance(o, 1e-12);
  Emitter em("verify hamiltonian", o, {{"level", o.level}, {"L", o.L}, {"gb", o.gb}, {"irrep", o.irrep}});
  auto w = wilson_loop_eigencheck(G, o.irrep, o.level, o.L, o.gb);
  em.residual(out, w.eigen_residual, tol, {{"check", "wilson-loop-eigenvector"}},
              {{"expected", w.expected}, {"rayleigh", w.rayleigh}});
  em.residual(out, std::abs(w.ground_energy), tol, {{"check", "ground-energy"}});
  em.residual(out, w.vacuum_residual, tol, {{"check", "vacuum"}});
  CouplingSchedule s = std::isnan(o.g0) ? CouplingSchedule::from_bare(o.gb, o.L) : CouplingSchedule{o.g0, o.gb, o.L};
  em.residual(out, gibbs_is_heat_kernel_residual(G, o.level, o.beta, s), tol, {{"check", "gibbs-heat-kernel"}, {"beta", o.beta}});
  em.residual(out, refinement_coherence_residual(G, std::max(0, o.level - 1), s), tol, {{"check", "refinement-coherence"}});
  em.residual(out, gauge_commutator_residual(G, cofinal_lattice(o.level), s.prefactor(o.level), o.samples, o.seed), tol,
              {{"check", "gauge-commutator"}, {"samples", o.samples}});
  return out;
}

// ---- spectrum / trotter ---------------------------------------------------

Outcome cmd_spectrum(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  CouplingSchedule s = std::isnan(o.g0) ? CouplingSchedule::from_bare(o.gb, o.L) : CouplingSchedule{o.g0, o.gb, o.L};
  Emitter em("spectrum", o, {{"level", o.level}, {"g0", s.g0}, {"gb", s.gb}, {"L", s.L}});
  Mat H = ks_strong_matrix(G, o.level, s, KSBasis::Fourier);
  std::vector<double> ev(H.rows());
  for (long i = 0; i < H.rows(); ++i) ev[i] = H(i, i).real();
  std::sort(ev.begin(), ev.end());
  std::vector<std::pair<double, int>> distinct;
  for (double e : ev) {
    if (!distinct.empty() && std::abs(e - distinct.back().first) <= 1e-9 * std::max(1.0, std::abs(e)))
      ++distinct.back().second;
    else
      distinct.push_back({e, 1});
  }
  for (int i = 0; i < int(distinct.size()) && i < o.count; ++i)
    em.value(out, distinct[i].first, 0.0, {{"index", i}}, {{"quantity", "eigenvalue"}, {"multiplicity", distinct[i].second}});
  em.value(out, spectral_gap(G, o.level, s), 0.0, json::object(), {{"quantity", "gap"}});
  return out;
}

Outcome cmd_trotter(const Opts& o) {
  Outcome out;
  Emitter em("trotter", o, {{"beta", o.beta}, {"gtilde", o.gtilde}, {"cutoff", o.cutoff}, {"villain", o.villain}});
  em.fixed_group("u1:" + std::to_string(o.cutoff), "O(2) rotor, Fourier modes |n| <= K, kinetic n^2/2");
  PotentialForm form = o.villain ? PotentialForm::Villain : PotentialForm::Cosine;
  double prev = NAN;
  for (int n : parse_int_list(o.steps_list)) {
    double r = trotter_residual(o.cutoff, o.beta, o.gtilde, n, form);
    json fields = {{"quantity", "trotter-residual"}};
    if (!std::isnan(prev)) fields["ratio_to_previous"] = r / prev;
    em.value(out, r, 0.0, {{"steps", n}}, fields);
    prev = r;
  }
  return out;
}

// ---- two-point ------------------------------------------------------------

Outcome cmd_two_point(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  TwoPointSpec s{G, o.beta0, o.thermo ? INFINITY : o.L, o.irrep, o.irrep2 < 0 ? o.irrep : o.irrep2, o.tau, o.tau2};
  json p = {{"beta0", o.beta0}, {"irrep", s.pi}, {"irrep2", s.pi2}, {"tau", o.tau}, {"tau2", o.tau2}};
  p["L"] = o.thermo ? json("infinity") : json(o.L);
  Emitter em("two-point", o, p);
  auto r = two_point(s);
  if (o.thermo) {
    em.value(out, r.thermo, 0.0, json::object(), {{"quantity", "thermodynamic"}});
    return out;
  }
  em.value(out, r.fusion, std::abs(r.fusion - r.transfer), json::object(),
           {{"quantity", "fusion-series"}, {"transfer", r.transfer}, {"partition", r.partition}, {"terms", r.terms}});
  em.residual(out, std::abs(r.fusion - r.transfer), tolerance(o, 1e-10), {{"check", "fusion-vs-transfer"}});
  if (!o.covariance.empty()) {
    CovarianceKind k = parse_covariance_kind(o.covariance);
    em.value(out, closed_form_covariance(k, o.beta0, o.L, o.tau, o.tau2), 0.0, {{"covariance", o.covariance}},
             {{"quantity", "closed-form"}});
    if (k == CovarianceKind::Ising1d)
      em.value(out, ising_transfer_covariance(o.beta0, o.L, o.tau, o.tau2), 0.0, {{"covariance", "ising-transfer"}},
               {{"quantity", "closed-form"}});
  }
  return out;
}

// ---- rg -------------------------------------------------------------------

Outcome cmd_rg_flow(const Opts& o) {
  Outcome out;
  Emitter em("rg flow", o, {{"nu", o.nu}, {"beta0", o.beta0}, {"steps", o.steps}});
  em.fixed_group("any", "heat-kernel betas add under coarse-graining for every backend");
  auto f = classify_flow(o.nu, o.beta0, o.steps);
  for (const auto& st : f.steps)
    em.value(out, st.beta, 0.0, {{"M", st.M}}, {{"quantity", "beta"}, {"fixed_point_distance", st.fixed_point_distance}});
  em.value(out, f.steps.back().fixed_point_distance, 0.0, json::object(),
           {{"quantity", "classification"}, {"classification", to_string(f.classification)}, {"monotone", f.monotone}});
  if (!o.emit_plot.empty()) {
    std::ofstream csv(o.emit_plot);
    if (!csv) throw UsageError("cannot write " + o.emit_plot);
    csv.precision(17);
    csv << "M,beta,fixed_point_distance\n";
    for (const auto& st : f.steps) csv << st.M << ',' << st.beta << ',' << st.fixed_point_distance << '\n';
  }
  return out;
}

Outcome cmd_rg_plaquette(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  Emitter em("rg plaquette", o, {{"beta1", o.beta1}, {"beta2", o.beta2}});
  em.residual(out, plaquette_flow_residual(G, o.beta1, o.beta2), tolerance(o, G.is_finite() ? 1e-12 : 1e-8));
  return out;
}

Outcome cmd_rg_ising(const Opts& o) {
  Outcome out;
  if (o.grid < 2 || !(o.grid_min > 0) || !(o.grid_max > o.grid_min)) throw UsageError("bad Ising grid");
  std::vector<double> b(o.grid);
  for (int i = 0; i < o.grid; ++i) b[i] = o.grid_min + (o.grid_max - o.grid_min) * i / (o.grid - 1);
  Emitter em("rg ising", o, {{"grid", o.grid}, {"min", o.grid_min}, {"max", o.grid_max}});
  em.fixed_group("z2", "beta_Ising = -1/2 ln tanh(beta), decimation tanh K' = tanh^2 K");
  em.residual(out, ising_conjugacy_residual(b), tolerance(o, 1e-12));
  return out;
}

// ---- measure --------------------------------------------------------------

void emit_product(Outcome& out, const Emitter& em, const AffinityProduct& p) {
  for (std::size_t i = 0; i < p.levels.size(); ++i)
    em.value(out, p.factors[i], 0.0, {{"level", p.levels[i]}},
             {{"quantity", "factor"}, {"product", p.products[i]}, {"log_product", p.log_products[i]}});
  em.value(out, p.products.back(), 0.0, json::object(),
           {{"quantity", "verdict"}, {"verdict", to_string(p.verdict)}, {"log_slope", p.log_slope}});
}

Outcome cmd_hellinger(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  int n = parse_range(o.levels).second;
  Emitter em("hellinger", o, {{"beta", o.beta}, {"shift", o.shift}, {"levels", n}, {"power", o.power}, {"homogeneous", o.homogeneous}});
  auto p = hellinger_product(G, o.beta, parse_element(G, o.shift), o.power, n, o.homogeneous);
  emit_product(out, em, p);
  if (G.kind == GroupKind::CyclicZn && G.cutoff == 2 && G.casimir_scale == 0.25 && !o.homogeneous &&
      parse_element(G, o.shift).k % 2 != 0) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.levels.size(); ++i)
      worst = std::max(worst, std::abs(p.factors[i] - hellinger_z2_closed_form(o.beta, o.power, p.levels[i])));
    em.residual(out, worst, tolerance(o, 1e-12), {{"check", "z2-closed-form"}});
  }
  return out;
}

Outcome cmd_kakutani(const Opts& o) {
  Outcome out;
  int n = parse_range(o.levels).second;
  long k = 0;
  try {
    k = std::stol(o.shift);
  } catch (const std::logic_error&) {
    throw UsageError("kakutani --shift must be an integer");
  }
  Emitter em("kakutani", o, {{"tau", o.tau}, {"shift", k}, {"levels", n}});
  em.fixed_group("zdual", "dual of U(1), m_beta(n) proportional to e^{-beta n^2/2}");
  auto b = geometric_beta(o.tau);
  auto p = kakutani_affinity_Z(b, k, n);
  emit_product(out, em, p);
  auto l1 = l1_verdict(b, n);
  em.value(out, l1.partial_sum, 0.0, json::object(), {{"quantity", "l1-criterion"}, {"verdict", to_string(l1.verdict)}});
  em.residual(out, p.verdict == l1.verdict ? 0.0 : 1.0, 0.0, {{"check", "product-matches-l1"}});
  return out;
}

// ---- duality / jones ------------------------------------------------------

Outcome cmd_duality(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  Emitter em("duality", o, {{"level", o.level}});
  auto r = duality_check(G, o.level, o.samples, o.seed);
  em.residual(out, double(r.mismatches), 0.0, {{"check", "holonomy-duality"}}, {{"checked", r.checked}});
  // Round trip hol^{-1} o hol on random configurations.
  std::mt19937_64 rng(o.seed);
  int E = 1 << o.level;
  long bad = 0;
  for (int t = 0; t < o.samples; ++t) {
    std::vector<GroupValue> g(E);
    for (auto& x : g) x = random_element(G, rng);
    auto back = holonomy_inverse(G, holonomy_path(G, g));
    auto again = holonomy_path(G, back);
    auto path = holonomy_path(G, g);
    for (int e = 0; e < E; ++e)
      if (!approx_equal(G, back[e], g[e]) || !approx_equal(G, again[e], path[e])) {
        ++bad;
        break;
      }
  }
  em.residual(out, double(bad), 0.0, {{"check", "holonomy-round-trip"}, {"samples", o.samples}});
  return out;
}

ThompsonElement parse_generator(const std::string& s) {
  if (s == "x0") return ThompsonElement::x0();
  if (s == "x1") return ThompsonElement::x1();
  if (s == "x0inv") return ThompsonElement::x0().inverse();
  if (s == "x1inv") return ThompsonElement::x1().inverse();
  if (s == "id") return ThompsonElement::identity();
  throw UsageError("unknown generator '" + s + "' (x0 | x1 | x0inv | x1inv | id)");
}

Outcome cmd_jones(const Opts& o) {
  Outcome out;
  GroupId G = make_group(o);
  if (!G.is_finite()) throw UnsupportedError("jones action needs a finite backend");
  double tol = tolerance(o, 1e-12);
  Emitter em("jones", o, {{"generator", o.generator}});
  ThompsonElement f = parse_generator(o.generator);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> nd;
  int n = G.order();
  OrientedLattice lat = cofinal_lattice(1);
  Mat a(n * n, n * n);
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) a(i, j) = cplx(nd(rng), nd(rng));
  LatticeOperator op{lat, a};
  auto moved = jones_act_refining(G, f, op);
  json rec = em.base({{"check", "image"}});
  rec["value"] = max_abs(moved.op);
  rec["est_error"] = 0.0;
  rec["image_lattice"] = to_json(moved.lattice);
  out.records.push_back(rec);
  for (const char* g2 : {"x0", "x1"})
    em.residual(out, jones_group_law_residual(G, f, parse_generator(g2), op), tol, {{"check", "group-law"}, {"with", g2}});
  em.residual(out, jones_refinement_residual(G, f, op, cofinal_lattice(2)), tol, {{"check", "refinement-compatibility"}});
  Mat x = Mat::Zero(n, n), z = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    x((i + 1) % n, i) = 1.0;
    z(i, i) = std::polar(1.0, 2.0 * kPi * i / n);
  }
  auto w = non_equivariance_witness(G, x, z);
  em.residual(out, w.max_entry_difference, 0.1, {{"check", "eta-non-equivariance"}}, json::object(), true);
  return out;
}

// ---- output ---------------------------------------------------------------

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& cells) {
  for (auto& [k, v] : j.items()) {
    std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object())
      flatten(v, key, cells);
    else
      cells.push_back({key, v});
  }
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  std::string s = v.dump();
  if (v.is_array()) return csv_cell(json(s));
  return s;
}

void print_records(const std::vector<json>& recs, bool csv) {
  if (!csv) {
    for (const auto& r : recs) std::cout << r.dump() << '\n';
    return;
  }
  std::vector<std::string> cols;
  std::set<std::string> seen;
  std::vector<std::vector<std::pair<std::string, json>>> rows;
  for (const auto& r : recs) {
    rows.emplace_back();
    flatten(r, "", rows.back());
    for (auto& [k, v] : rows.back())
      if (seen.insert(k).second) cols.push_back(k);
  }
  for (std::size_t i = 0; i < cols.size(); ++i) std::cout << (i ? "," : "") << cols[i];
  std::cout << '\n';
  for (const auto& row : rows) {
    std::map<std::string, json> m(row.begin(), row.end());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) std::cout << ',';
      auto it = m.find(cols[i]);
      if (it != m.end()) std::cout << csv_cell(it->second);
    }
    std::cout << '\n';
  }
}

// ---- sweeps ---------------------------------------------------------------

const std::map<std::string, double Opts::*>& sweepable() {
  static const std::map<std::string, double Opts::*> m = {
      {"beta", &Opts::beta},   {"beta0", &Opts::beta0}, {"beta1", &Opts::beta1}, {"beta2", &Opts::beta2},
      {"tau", &Opts::tau},     {"tau2", &Opts::tau2},   {"L", &Opts::L},         {"gb", &Opts::gb},
      {"g0", &Opts::g0},       {"gtilde", &Opts::gtilde}, {"nu", &Opts::nu}};
  return m;
}

Outcome run_with_sweep(const Opts& o, const std::function<Outcome(const Opts&)>& fn) {
  if (o.sweep.empty()) return fn(o);
  auto eq = o.sweep.find('=');
  if (eq == std::string::npos) throw UsageError("--sweep expects name=start:stop:step");
  std::string name = o.sweep.substr(0, eq);
  auto it = sweepable().find(name);
  if (it == sweepable().end()) throw UsageError("parameter '" + name + "' cannot be swept");
  double a, b, h;
  char c1, c2;
  std::istringstream is(o.sweep.substr(eq + 1));
  if (!(is >> a >> c1 >> b >> c2 >> h) || c1 != ':' || c2 != ':' || !(h > 0) || b < a)
    throw UsageError("--sweep range must be start:stop:step with step > 0");
  long n = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
  std::vector<std::future<Outcome>> jobs;
  for (long i = 0; i < n; ++i) {
    Opts c = o;
    c.*(it->second) = a + h * double(i);
    jobs.push_back(std::async(std::launch::async, [c, &fn] { return fn(c); }));
  }
  // Collected in parameter order regardless of completion order.
  Outcome all;
  for (auto& j : jobs) {
    Outcome r = j.get();
    all.failed = all.failed || r.failed;
    for (auto& x : r.records) all.records.push_back(std::move(x));
  }
  return all;
}

// ---- argument plumbing ----------------------------------------------------

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// The app and its selected subcommands, following the non-option tokens of argv.
std::vector<CLI::App*> command_chain(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<CLI::App*> chain{&app};
  for (const auto& a : args) {
    if (a.empty() || a[0] == '-') continue;
    CLI::App* sub = nullptr;
    try {
      sub = chain.back()->get_subcommand(a);
    } catch (const CLI::OptionNotFound&) {
    }
    if (sub) chain.push_back(sub);
  }
  return chain;
}

std::vector<std::string> long_names(const std::vector<CLI::App*>& chain) {
  std::vector<std::string> names;
  for (auto* a : chain)
    for (const auto* opt : a->get_options())
      for (const auto& ln : opt->get_lnames()) names.push_back("--" + ln);
  return names;
}

std::string suggestion_for(const std::string& bad, const std::vector<std::string>& names) {
  std::string key = bad.substr(0, bad.find('='));
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& n : names) {
    std::size_t d = levenshtein(key, n);
    if (d < best_d) best_d = d, best = n;
  }
  if (best.empty() || best_d > std::max<std::size_t>(2, key.size() / 3)) return "";
  return best;
}

// Config lines `key = value` become `--key value` unless the flag is already given.
void apply_config(const std::string& path, const std::vector<CLI::App*>& chain, std::vector<std::string>& args) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  auto names = long_names(chain);
  std::set<std::string> known(names.begin(), names.end());
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = "--" + trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!known.count(key)) {
      std::string s = suggestion_for(key, names);
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key.substr(2) + "'" +
                       (s.empty() ? "" : "; did you mean '" + s.substr(2) + "'?"));
    }
    if (given.count(key)) continue;
    if (value == "true") {
      args.push_back(key);
    } else if (value != "false") {
      args.push_back(key);
      args.push_back(value);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  Opts o;
  std::string config_path;
  double tol_value = NAN;
  CLI::App app{"Finite-level toolkit for Hamiltonian lattice gauge theory on dyadic lattices", "hlgt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "RNG seed recorded in every record");
  app.add_option("--tol", tol_value, "Residual tolerance, overrides HLGT_TOLERANCE");
  app.add_flag("--csv", o.csv, "CSV instead of JSON lines");
  app.add_option("--config", config_path, "File of key = value lines mirroring the flags");
  app.add_option("--casimir-scale", o.casimir_scale, "Multiplier on all Casimir eigenvalues");

  std::function<Outcome(const Opts&)> handler;
  auto bind = [&](CLI::App* sub, std::function<Outcome(const Opts&)> fn, bool sweep = true) {
    sub->fallthrough();
    if (sweep) sub->add_option("--sweep", o.sweep, "name=start:stop:step, run concurrently, ordered by parameter");
    sub->callback([&handler, fn] { handler = fn; });
  };
  auto group_opt = [&](CLI::App* sub) { sub->add_option("--group", o.group, "z2 | zN:<n> | u1:<K> | su2:<2jmax> | zdual:<M> | suq2:<q>,<cutoff>"); };

  auto* irr = app.add_subcommand("irreps", "Irreducible representations with Casimirs");
  group_opt(irr);
  bind(irr, cmd_irreps, false);

  auto* hk = app.add_subcommand("heat-kernel", "Heat kernel value or trace");
  group_opt(hk);
  hk->add_option("--beta", o.beta)->required();
  hk->add_option("--at", o.at, "Group element (integer, angle, or SU(2) class angle)");
  hk->add_flag("--trace", o.trace);
  bind(hk, cmd_heat_kernel);

  auto* ver = app.add_subcommand("verify", "Residual checks");
  ver->require_subcommand(1);
  ver->fallthrough();
  auto verify_sub = [&](const char* name, const char* desc, std::function<Outcome(const Opts&)> fn) {
    auto* s = ver->add_subcommand(name, desc);
    group_opt(s);
    s->add_option("--beta", o.beta);
    s->add_option("--family", o.family, "heat | inhom | dual | vacuum");
    s->add_option("--tau", o.tau, "Decay exponent of the inhomogeneous family");
    s->add_option("--level", o.level);
    s->add_option("--samples", o.samples);
    bind(s, fn);
    return s;
  };
  verify_sub("coherence", "Coherence of a state family under refinement", cmd_verify_coherence)
      ->add_option("--levels", o.levels, "A..B");
  verify_sub("inversion", "Inversion coherence of the edge factors", cmd_verify_inversion);
  verify_sub("gauge", "Gauge invariance of states", cmd_verify_gauge);
  verify_sub("identities", "Heat kernel integral identities", cmd_verify_identities);
  verify_sub("intertwiners", "Unitarity of the refinement unitaries and eta/zeta intertwining", cmd_verify_intertwiners);
  auto* vh = verify_sub("hamiltonian", "Strong-coupling Hamiltonian checks", cmd_verify_hamiltonian);
  vh->add_option("--L", o.L);
  vh->add_option("--gb", o.gb);
  vh->add_option("--g0", o.g0);
  vh->add_option("--irrep", o.irrep);

  auto* sp = app.add_subcommand("spectrum", "Strong-coupling spectrum on the cofinal lattice");
  group_opt(sp);
  sp->add_option("--level", o.level);
  sp->add_option("--g0", o.g0);
  sp->add_option("--gb", o.gb);
  sp->add_option("--L", o.L);
  sp->add_option("--count", o.count, "Number of distinct eigenvalues to report");
  bind(sp, cmd_spectrum);

  auto* tr = app.add_subcommand("trotter", "Trotter residuals for the O(2) rotor");
  tr->add_option("--beta", o.beta);
  tr->add_option("--gtilde", o.gtilde);
  tr->add_option("--cutoff", o.cutoff, "Fourier cutoff K");
  tr->add_option("--steps", o.steps_list, "n1,n2,...");
  tr->add_flag("--villain", o.villain, "Villain potential instead of cosine");
  bind(tr, cmd_trotter);

  auto* tp = app.add_subcommand("two-point", "Two-point function of character insertions");
  group_opt(tp);
  tp->add_option("--beta0", o.beta0);
  auto* Lopt = tp->add_option("--L", o.L);
  tp->add_flag("--thermo", o.thermo, "Infinite-volume limit")->excludes(Lopt);
  tp->add_option("--irrep", o.irrep);
  tp->add_option("--irrep2", o.irrep2);
  tp->add_option("--tau", o.tau);
  tp->add_option("--tau2", o.tau2);
  tp->add_option("--covariance", o.covariance, "Also print a closed form: wiener | ou | ising1d");
  bind(tp, cmd_two_point);

  auto* rg = app.add_subcommand("rg", "Renormalization-group flows");
  rg->require_subcommand(1);
  rg->fallthrough();
  auto* rf = rg->add_subcommand("flow", "Power-law beta flow");
  rf->add_option("--nu", o.nu);
  rf->add_option("--beta0", o.beta0);
  rf->add_option("--steps", o.steps);
  rf->add_option("--emit-plot", o.emit_plot, "CSV file for the trajectory");
  bind(rf, cmd_rg_flow);
  auto* rp = rg->add_subcommand("plaquette", "Plaquette convolution flow");
  group_opt(rp);
  rp->add_option("--beta1", o.beta1);
  rp->add_option("--beta2", o.beta2);
  bind(rp, cmd_rg_plaquette);
  auto* ri = rg->add_subcommand("ising", "Ising conjugacy residual");
  ri->add_option("--grid", o.grid);
  ri->add_option("--min", o.grid_min);
  ri->add_option("--max", o.grid_max);
  bind(ri, cmd_rg_ising, false);

  auto* he = app.add_subcommand("hellinger", "Hellinger affinity product of the dual family");
  group_opt(he);
  he->add_option("--beta", o.beta);
  he->add_option("--shift", o.shift, "Shift element");
  he->add_option("--levels", o.levels, "Last level");
  he->add_option("--power", o.power, "Edges per level");
  he->add_flag("--homogeneous", o.homogeneous, "Same beta at every level");
  bind(he, cmd_hellinger);

  auto* ka = app.add_subcommand("kakutani", "Kakutani product for geometric betas on the dual of U(1)");
  ka->add_option("--tau", o.tau);
  ka->add_option("--shift", o.shift);
  ka->add_option("--levels", o.levels);
  bind(ka, cmd_kakutani);

  auto* du = app.add_subcommand("duality", "Holonomy duality and round trip");
  group_opt(du);
  du->add_option("--level", o.level);
  du->add_option("--samples", o.samples);
  bind(du, cmd_duality, false);

  auto* jo = app.add_subcommand("jones", "Jones action checks on Thompson generators");
  group_opt(jo);
  jo->add_option("--generator", o.generator, "x0 | x1 | x0inv | x1inv | id");
  bind(jo, cmd_jones, false);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // --config is read before parsing so its keys can fill subcommand options.
    auto chain = command_chain(app, args);
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string cfg;
      if (args[i] == "--config" && i + 1 < args.size())
        cfg = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0)
        cfg = args[i].substr(9);
      if (!cfg.empty()) apply_config(cfg, chain, args);
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    // Point at the first unknown long option with the nearest known name.
    auto names = long_names(command_chain(app, args));
    for (const auto& a : args) {
      if (a.rfind("--", 0) != 0) continue;
      std::string key = a.substr(0, a.find('='));
      if (std::find(names.begin(), names.end(), key) != names.end()) continue;
      std::string s = suggestion_for(a, names);
      std::cerr << "hlgt: unknown option " << key << (s.empty() ? "" : "; did you mean " + s + "?") << '\n';
      return 1;
    }
    std::cerr << "hlgt: " << e.what() << '\n';
    return 1;
  } catch (const CLI::ParseError& e) {
    // A misspelled subcommand surfaces as a missing one; name the nearest.
    auto chain = command_chain(app, args);
    CLI::App* last = chain.back();
    for (const auto& a : args) {
      if (a.empty() || a[0] == '-' || last->get_subcommands({}).empty()) continue;
      bool known = false;
      for (auto* c : chain) known = known || c->get_name() == a;
      if (known) continue;
      std::string best;
      std::size_t best_d = std::string::npos;
      for (auto* sub : last->get_subcommands({})) {
        std::size_t d = levenshtein(a, sub->get_name());
        if (d < best_d) best_d = d, best = sub->get_name();
      }
      if (best_d <= std::max<std::size_t>(2, a.size() / 3)) {
        std::cerr << "hlgt: unknown command '" << a << "'; did you mean '" << best << "'?\n";
        return 1;
      }
    }
    std::cerr << "hlgt: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "hlgt: " << e.what() << '\n';
    return 1;
  }
  if (!std::isnan(tol_value)) o.tol = tol_value;

  try {
    Outcome out = run_with_sweep(o, handler);
    print_records(out.records, o.csv);
    std::cout.flush();
    return out.failed ? 2 : 0;
  } catch (const UsageError& e) {
    std::cerr << "hlgt: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "hlgt: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "hlgt: error: " << e.what() << '\n';
    return 1;
  }
}
