#pragma once

// Right-hand side of the Hölder-type bound
//
//   E([I]_v) <= K prod_i ( sum_{j at L_i, j below v} f(j)^{p_i} mu(C_j)^{1+p_i} )^{1/p_i}
//
// together with the admissible constants K.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "joinforge/muirhead.hpp"
#include "joinforge/orbit.hpp"
#include "joinforge/tree.hpp"

namespace joinforge {

inline constexpr double kConjugacyTolerance = 1e-12;

// One exponent per shape slot, in slot order, plus the inherited coexponent
// 1/alpha (0 encodes alpha = infinity, the top-level case).
struct ExponentAssignment {
  std::vector<double> exponents;
  double coexponent = 0.0;
};

// Slot i receives p[slot_to_index[i]]; an empty map means slot i gets p[i].
// Throws ValidationError unless the map is a permutation of 0..p.size()-1.
ExponentAssignment bind_exponents(std::span<const double> p, std::span<const int> slot_to_index = {},
                                  double coexponent = 0.0);

struct ExponentViolation {
  enum class Kind { count, positivity, coexponent, conjugacy };
  Kind kind;
  std::string message;
  double residual;  // count difference, offending value, or sum - 1
};

std::optional<ExponentViolation> validate_exponents(const JoinShape& shape,
                                                    const ExponentAssignment& pa);

// sum over vertices j at `level` below `base` of f(j)^p mu(C_j)^(1+p).
// Throws UsageError when level is outside [base.level(), depth].
double level_power_sum(const TreeParams& tree, const CylinderMassTable& masses, const LevelFunction& f,
                       const Vertex& base, int level, double p);
// Natural log of the same sum (-inf when it vanishes), without overflow.
double log_level_power_sum(const TreeParams& tree, const CylinderMassTable& masses,
                           const LevelFunction& f, const Vertex& base, int level, double p);

// K times the product over slots. Throws ValidationError on invalid exponents.
double rhs_product(const JoinShape& shape, const Vertex& base, const CylinderMassTable& masses,
                   const LevelFunction& f, const ExponentAssignment& pa, double K);
double log_rhs_product(const JoinShape& shape, const Vertex& base, const CylinderMassTable& masses,
                       const LevelFunction& f, const ExponentAssignment& pa, double K);

struct GeneralConstant {
  double value = 1.0;  // prod over join points of (m-1)!/(m-r-1)!
  double crude = 1.0;  // (m-1)^(n-1)
};

GeneralConstant k_general(const JoinShape& shape);

struct BinaryConstant {
  double value = 1.0;
  bool condition_met = false;  // at every join node
  bool top_condition_met = false;
  bool deep_condition_met = false;  // at every node below the top
};

// Requires a binary shape; throws UsageError otherwise.
BinaryConstant k_binary(const JoinShape& shape, const ExponentAssignment& pa);

struct InductiveStep {
  int node = 0;
  int level = 0;
  int branches = 0;
  std::vector<double> branch_coexponents;  // 1/alpha_j
  double inherited_coexponent = 0.0;       // 1/alpha
  double beta_coexponent = 0.0;            // 1/beta
  std::vector<double> muirhead_exponents;  // beta/alpha_j, padded with zeros to m
  MuirheadCase muirhead_case = MuirheadCase::ii;
  double muirhead_value = 0.0;
  bool estimated = false;
  double factor = 0.0;
  double certified_factor = 0.0;  // case ii upper bracket where not exact
};

struct InductiveConstant {
  double value = 1.0;
  double certified_upper = 1.0;
  bool estimated = false;
  std::vector<InductiveStep> ledger;  // pre-order
};

// Accumulates the per-join-node factors
//   K(m; beta/alpha_1, ..., beta/alpha_d, 0, ...)^(1/beta) (m-1)!^(1-1/beta) / (m-d)!.
// Where no closed form for K(m; .) applies the numeric estimate is used and
// the result is flagged as estimated. Throws ValidationError on invalid
// exponents.
InductiveConstant k_inductive(const JoinShape& shape, const ExponentAssignment& pa);

}  // namespace joinforge
