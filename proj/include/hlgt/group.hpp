#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hlgt/common.hpp"

namespace hlgt {

enum class GroupKind { CyclicZn, CircleU1, SU2, IntegersZ, LineR, SUq2 };

// Backend descriptor. `cutoff` is n for Z_n, K for U(1), 2j_max for SU(2),
// M for Z, the level cutoff for SU_q(2); unused for R.
struct GroupId {
  GroupKind kind = GroupKind::CyclicZn;
  int cutoff = 2;
  double q = 0.0;
  // Global multiplier on every Casimir eigenvalue. 1 is the native convention
  // of each backend; 0.25 on Z_2 reproduces c_sgn = 1.
  double casimir_scale = 1.0;

  static GroupId cyclic(int n, double scale = 1.0);
  static GroupId z2_paper() { return cyclic(2, 0.25); }
  static GroupId u1(int K);
  static GroupId su2(int two_jmax, double scale = 1.0);
  static GroupId integers(int M);
  static GroupId line();
  static GroupId suq2(double q, int cutoff);

  // z2 | zN:<n> | z<n> | u1:<K> | su2:<2jmax> | zdual:<M> | line | suq2:<q>,<cutoff>
  static GroupId parse(const std::string& spec);
  std::string to_string() const;
  std::string convention() const;

  bool is_finite() const { return kind == GroupKind::CyclicZn; }
  bool is_compact() const {
    return kind == GroupKind::CyclicZn || kind == GroupKind::CircleU1 || kind == GroupKind::SU2;
  }
  bool is_abelian() const { return kind != GroupKind::SU2 && kind != GroupKind::SUq2; }
  int order() const;  // |G| for finite backends
  void validate() const;
};

// Backend-tagged element. Only the field matching the backend is meaningful.
struct GroupValue {
  std::int64_t k = 0;                      // Z_n residue, Z integer
  double x = 0.0;                          // U(1) angle in (-pi, pi], R coordinate
  std::array<double, 4> quat{1, 0, 0, 0};  // SU(2): w + xi + yj + zk

  static GroupValue integer(std::int64_t v) { return {v, 0.0, {1, 0, 0, 0}}; }
  static GroupValue angle(double phi);
  static GroupValue quaternion(double w, double x, double y, double z);
};

GroupValue identity(const GroupId& G);
GroupValue multiply(const GroupId& G, const GroupValue& a, const GroupValue& b);
GroupValue invert(const GroupId& G, const GroupValue& a);
GroupValue random_element(const GroupId& G, std::mt19937_64& rng);
bool approx_equal(const GroupId& G, const GroupValue& a, const GroupValue& b, double tol = 1e-12);
// SU(2) rotation angle theta in [0, pi] with tr g = 2 cos theta.
double su2_class_angle(const GroupValue& g);

struct Irrep {
  int label;  // k for Z_n, n for U(1)/SU_q(2), 2j for SU(2)
  int dim;
  double casimir;
  std::string name;
};

struct IrrepTable {
  GroupId group;
  std::vector<Irrep> entries;

  cplx character(std::size_t i, const GroupValue& g) const;
  std::size_t index_of(int label) const;
  std::size_t trivial() const { return index_of(0); }
};

IrrepTable irreps(const GroupId& G);

// Raw multiplicity integral; exposed for diagnostics.
double fusion_integral(const IrrepTable& t, int pi, int a, int b);
int fusion_multiplicity(const IrrepTable& t, int pi, int a, int b);

// Normalized Haar average. Exact on Z_n, trapezoidal on U(1), Gauss/trapezoid
// product rule on SU(2); counting measure over [-M, M] on Z.
cplx haar_integrate(const GroupId& G, const std::function<cplx(const GroupValue&)>& f,
                    int nodes = 0);
// Class-function average on SU(2) via the Weyl measure (2/pi) sin^2 on [0, pi].
double su2_class_integrate(const std::function<double(double)>& f, int nodes = 512);
int default_nodes(const GroupId& G);

// Finite backend as explicit tables; elements are 0..n-1 with 0 the identity.
struct FiniteGroup {
  int n = 0;
  std::vector<int> mul_table;
  std::vector<int> inv_table;
  GroupId id;

  explicit FiniteGroup(const GroupId& G);
  int mul(int a, int b) const { return mul_table[a * n + b]; }
  int inv(int a) const { return inv_table[a]; }
  GroupValue value(int a) const { return GroupValue::integer(a); }
};

}  // namespace hlgt
