#include "hlgt/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace hlgt {

GroupId GroupId::cyclic(int n, double scale) {
  GroupId g{GroupKind::CyclicZn, n, 0.0, scale};
  g.validate();
  return g;
}
GroupId GroupId::u1(int K) {
  GroupId g{GroupKind::CircleU1, K, 0.0, 1.0};
  g.validate();
  return g;
}
GroupId GroupId::su2(int two_jmax, double scale) {
  GroupId g{GroupKind::SU2, two_jmax, 0.0, scale};
  g.validate();
  return g;
}
GroupId GroupId::integers(int M) {
  GroupId g{GroupKind::IntegersZ, M, 0.0, 1.0};
  g.validate();
  return g;
}
GroupId GroupId::line() { return GroupId{GroupKind::LineR, 1, 0.0, 1.0}; }
GroupId GroupId::suq2(double q, int cutoff) {
  GroupId g{GroupKind::SUq2, cutoff, q, 1.0};
  g.validate();
  return g;
}

void GroupId::validate() const {
  if (cutoff <= 0) throw ConfigError("group cutoff must be strictly positive");
  if (!(casimir_scale > 0.0)) throw ConfigError("casimir scale must be positive");
  if (kind == GroupKind::SUq2 && (q == 0.0 || std::abs(std::abs(q) - 1.0) == 0.0))
    throw ConfigError("SU_q(2) requires q != 0 and |q| != 1");
}

int GroupId::order() const {
  if (!is_finite()) throw UnsupportedError("order() requires a finite backend");
  return cutoff;
}

namespace {

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  return v;
}

}  // namespace

GroupId GroupId::parse(const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  std::transform(head.begin(), head.end(), head.begin(), ::tolower);
  if (head == "zn") return cyclic(parse_int(arg, "n"));
  if (head == "u1") return u1(arg.empty() ? 32 : parse_int(arg, "K"));
  if (head == "su2") return su2(arg.empty() ? 8 : parse_int(arg, "2jmax"));
  if (head == "zdual") return integers(arg.empty() ? 64 : parse_int(arg, "M"));
  if (head == "line" || head == "r") return line();
  if (head == "suq2") {
    auto comma = arg.find(',');
    if (comma == std::string::npos) throw ConfigError("suq2 needs <q>,<cutoff>");
    return suq2(std::stod(arg.substr(0, comma)), parse_int(arg.substr(comma + 1), "cutoff"));
  }
  if (head.size() > 1 && head[0] == 'z' && arg.empty())
    return cyclic(parse_int(head.substr(1), "n"));
  throw ConfigError("unknown group spec '" + spec + "'");
}

std::string GroupId::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case GroupKind::CyclicZn: os << "zN:" << cutoff; break;
    case GroupKind::CircleU1: os << "u1:" << cutoff; break;
    case GroupKind::SU2: os << "su2:" << cutoff; break;
    case GroupKind::IntegersZ: os << "zdual:" << cutoff; break;
    case GroupKind::LineR: os << "line"; break;
    case GroupKind::SUq2: os << "suq2:" << q << "," << cutoff; break;
  }
  return os.str();
}

std::string GroupId::convention() const {
  std::ostringstream os;
  switch (kind) {
    case GroupKind::CyclicZn: os << "c_k = s*2(1-cos(2 pi k/n))"; break;
    case GroupKind::CircleU1: os << "c_n = s*n^2"; break;
    case GroupKind::SU2: os << "c_j = s*j(j+1)"; break;
    case GroupKind::IntegersZ: os << "discrete Laplacian on Z, kernel e^-b I_m(b)"; break;
    case GroupKind::LineR: os << "c(p) = p^2"; break;
    case GroupKind::SUq2: os << "c_n = ((q^(n/2)-q^(-n/2))/(q-1/q))^2, d_n = n^2"; break;
  }
  os << ", s = " << casimir_scale << ", Haar mass 1";
  return os.str();
}

GroupValue GroupValue::angle(double phi) {
  double a = std::remainder(phi, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return {0, a, {1, 0, 0, 0}};
}

GroupValue GroupValue::quaternion(double w, double x, double y, double z) {
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  return {0, 0.0, {w / n, x / n, y / n, z / n}};
}

GroupValue identity(const GroupId&) { return GroupValue{}; }

GroupValue multiply(const GroupId& G, const GroupValue& a, const GroupValue& b) {
  switch (G.kind) {
    case GroupKind::CyclicZn: return GroupValue::integer((a.k + b.k) % G.cutoff);
    case GroupKind::IntegersZ: return GroupValue::integer(a.k + b.k);
    case GroupKind::CircleU1: return GroupValue::angle(a.x + b.x);
    case GroupKind::LineR: return {0, a.x + b.x, {1, 0, 0, 0}};
    case GroupKind::SU2: {
      const auto& p = a.quat;
      const auto& q = b.quat;
      return {0, 0.0,
              {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
               p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
               p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
               p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]}};
    }
    case GroupKind::SUq2: break;
  }
  throw UnsupportedError("SU_q(2) is spectral data only");
}

GroupValue invert(const GroupId& G, const GroupValue& a) {
  switch (G.kind) {
    case GroupKind::CyclicZn: return GroupValue::integer((G.cutoff - a.k % G.cutoff) % G.cutoff);
    case GroupKind::IntegersZ: return GroupValue::integer(-a.k);
    case GroupKind::CircleU1: return GroupValue::angle(-a.x);
    case GroupKind::LineR: return {0, -a.x, {1, 0, 0, 0}};
    case GroupKind::SU2: return {0, 0.0, {a.quat[0], -a.quat[1], -a.quat[2], -a.quat[3]}};
    case GroupKind::SUq2: break;
  }
  throw UnsupportedError("SU_q(2) is spectral data only");
}

GroupValue random_element(const GroupId& G, std::mt19937_64& rng) {
  switch (G.kind) {
    case GroupKind::CyclicZn:
      return GroupValue::integer(std::uniform_int_distribution<int>(0, G.cutoff - 1)(rng));
    case GroupKind::IntegersZ:
      return GroupValue::integer(std::uniform_int_distribution<int>(-G.cutoff, G.cutoff)(rng));
    case GroupKind::CircleU1:
      return GroupValue::angle(std::uniform_real_distribution<double>(-kPi, kPi)(rng));
    case GroupKind::LineR: return {0, std::normal_distribution<double>()(rng), {1, 0, 0, 0}};
    case GroupKind::SU2: {
      std::normal_distribution<double> n;
      return GroupValue::quaternion(n(rng), n(rng), n(rng), n(rng));
    }
    case GroupKind::SUq2: break;
  }
  throw UnsupportedError("SU_q(2) is spectral data only");
}

bool approx_equal(const GroupId& G, const GroupValue& a, const GroupValue& b, double tol) {
  switch (G.kind) {
    case GroupKind::CyclicZn:
    case GroupKind::IntegersZ: return a.k == b.k;
    case GroupKind::CircleU1: return std::abs(std::remainder(a.x - b.x, 2 * kPi)) <= tol;
    case GroupKind::LineR: return std::abs(a.x - b.x) <= tol;
    case GroupKind::SU2: {
      double d = 0;
      for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.quat[i] - b.quat[i]));
      return d <= tol;
    }
    case GroupKind::SUq2: break;
  }
  return false;
}

double su2_class_angle(const GroupValue& g) { return std::acos(std::clamp(g.quat[0], -1.0, 1.0)); }

namespace {

// Chebyshev U_n(w) = sin((n+1) theta)/sin(theta), stable through theta = 0.
double chebyshev_u(int n, double w) {
  double u0 = 1.0, u1 = 2.0 * w;
  if (n == 0) return u0;
  for (int k = 1; k < n; ++k) {
    double u2 = 2.0 * w * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

}  // namespace

cplx IrrepTable::character(std::size_t i, const GroupValue& g) const {
  const Irrep& r = entries.at(i);
  switch (group.kind) {
    case GroupKind::CyclicZn:
      return std::polar(1.0, 2.0 * kPi * double(r.label) * double(g.k) / group.cutoff);
    case GroupKind::CircleU1: return std::polar(1.0, double(r.label) * g.x);
    case GroupKind::SU2: return chebyshev_u(r.label, std::clamp(g.quat[0], -1.0, 1.0));
    default: break;
  }
  throw UnsupportedError("characters not available for " + group.to_string());
}

std::size_t IrrepTable::index_of(int label) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].label == label) return i;
  throw ContractError("irrep label " + std::to_string(label) + " not in table");
}

IrrepTable irreps(const GroupId& G) {
  G.validate();
  IrrepTable t{G, {}};
  const double s = G.casimir_scale;
  switch (G.kind) {
    case GroupKind::CyclicZn:
      for (int k = 0; k < G.cutoff; ++k) {
        std::string name = k == 0 ? "triv" : (G.cutoff == 2 ? "sgn" : "chi" + std::to_string(k));
        t.entries.push_back({k, 1, s * 2.0 * (1.0 - std::cos(2.0 * kPi * k / G.cutoff)), name});
      }
      t.entries[0].casimir = 0.0;
      break;
    case GroupKind::CircleU1:
      for (int n = -G.cutoff; n <= G.cutoff; ++n)
        t.entries.push_back({n, 1, s * double(n) * n, "n=" + std::to_string(n)});
      break;
    case GroupKind::SU2:
      for (int tj = 0; tj <= G.cutoff; ++tj) {
        double j = 0.5 * tj;
        t.entries.push_back({tj, tj + 1, s * j * (j + 1), "2j=" + std::to_string(tj)});
      }
      break;
    case GroupKind::SUq2: {
      double den = G.q - 1.0 / G.q;
      for (int n = 1; n <= G.cutoff; ++n) {
        double c = (std::pow(G.q, 0.5 * n) - std::pow(G.q, -0.5 * n)) / den;
        t.entries.push_back({n, n * n, s * c * c, "n=" + std::to_string(n)});
      }
      break;
    }
    case GroupKind::IntegersZ:
    case GroupKind::LineR:
      throw UnsupportedError("irrep table needs a compact backend; the dual of " + G.to_string() +
                             " is continuous");
  }
  return t;
}

int default_nodes(const GroupId& G) {
  switch (G.kind) {
    case GroupKind::CircleU1: return std::max(256, 8 * G.cutoff + 8);
    case GroupKind::SU2: return std::max(32, 4 * G.cutoff + 8);
    default: return 0;
  }
}

double su2_class_integrate(const std::function<double(double)>& f, int nodes) {
  // Weyl measure (2/pi) sin^2 on [0, pi] written as (1/pi) over [0, 2pi):
  // the integrand extends evenly and the periodic trapezoid rule is spectral.
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double th = 2.0 * kPi * (i + 0.5) / nodes;
    double tt = th <= kPi ? th : 2.0 * kPi - th;
    double s = std::sin(th);
    acc += f(tt) * s * s;
  }
  return acc * 2.0 / nodes;
}

cplx haar_integrate(const GroupId& G, const std::function<cplx(const GroupValue&)>& f, int nodes) {
  if (nodes <= 0) nodes = default_nodes(G);
  switch (G.kind) {
    case GroupKind::CyclicZn: {
      cplx acc = 0.0;
      for (int k = 0; k < G.cutoff; ++k) acc += f(GroupValue::integer(k));
      return acc / double(G.cutoff);
    }
    case GroupKind::IntegersZ: {
      cplx acc = 0.0;
      for (int m = -G.cutoff; m <= G.cutoff; ++m) acc += f(GroupValue::integer(m));
      return acc;
    }
    case GroupKind::CircleU1: {
      cplx acc = 0.0;
      for (int i = 0; i < nodes; ++i) acc += f(GroupValue::angle(-kPi + 2.0 * kPi * (i + 1) / nodes));
      return acc / double(nodes);
    }
    case GroupKind::SU2: {
      // Hopf coordinates: g = (cos eta e^{i xi1}, sin eta e^{i xi2}),
      // measure sin(2 eta) d eta d xi1 d xi2 / (4 pi^2).
      auto ring = [&](double eta) {
        cplx acc = 0.0;
        double c = std::cos(eta), s = std::sin(eta);
        for (int a = 0; a < nodes; ++a) {
          double x1 = 2.0 * kPi * a / nodes;
          for (int b = 0; b < nodes; ++b) {
            double x2 = 2.0 * kPi * b / nodes;
            GroupValue g{0, 0.0, {c * std::cos(x1), c * std::sin(x1), s * std::cos(x2), s * std::sin(x2)}};
            acc += f(g);
          }
        }
        return acc / double(nodes * nodes) * std::sin(2.0 * eta);
      };
      using Q = boost::math::quadrature::gauss<double, 30>;
      double re = Q::integrate([&](double e) { return ring(e).real(); }, 0.0, kPi / 2);
      double im = Q::integrate([&](double e) { return ring(e).imag(); }, 0.0, kPi / 2);
      return {re, im};
    }
    case GroupKind::LineR:
      throw UnsupportedError("Haar integration on R is not provided; only closed forms are used");
    case GroupKind::SUq2: break;
  }
  throw UnsupportedError("SU_q(2) is spectral data only");
}

double fusion_integral(const IrrepTable& t, int pi, int a, int b) {
  std::size_t ip = t.index_of(pi), ia = t.index_of(a), ib = t.index_of(b);
  const GroupId& G = t.group;
  if (G.kind == GroupKind::SU2) {
    auto chi = [](int tj, double th) { return chebyshev_u(tj, std::cos(th)); };
    return su2_class_integrate([&](double th) { return chi(a, th) * chi(b, th) * chi(pi, th); },
                               4 * G.cutoff + 64);
  }
  int nodes = G.kind == GroupKind::CircleU1 ? 4 * G.cutoff + 8 : 0;
  cplx v = haar_integrate(
      G, [&](const GroupValue& g) { return t.character(ia, g) * t.character(ib, g) * std::conj(t.character(ip, g)); },
      nodes);
  return v.real();
}

int fusion_multiplicity(const IrrepTable& t, int pi, int a, int b) {
  double raw = fusion_integral(t, pi, a, b);
  double r = std::round(raw);
  if (std::abs(raw - r) > 1e-6)
    throw CutoffError("fusion integral " + std::to_string(raw) + " is not near an integer");
  return int(r);
}

FiniteGroup::FiniteGroup(const GroupId& G) : n(G.order()), id(G) {
  mul_table.resize(n * n);
  inv_table.resize(n);
  for (int a = 0; a < n; ++a) {
    inv_table[a] = int(invert(G, GroupValue::integer(a)).k);
    for (int b = 0; b < n; ++b) mul_table[a * n + b] = int(multiply(G, GroupValue::integer(a), GroupValue::integer(b)).k);
  }
}

}  // namespace hlgt
