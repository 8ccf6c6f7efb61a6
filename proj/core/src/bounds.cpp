#include "joinforge/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "joinforge/error.hpp"

namespace joinforge {

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

double reciprocal_sum(const ExponentAssignment& pa, int begin, int end) {
  double sum = 0.0;
  for (int i = begin; i < end; ++i) sum += 1.0 / pa.exponents[static_cast<std::size_t>(i)];
  return sum;
}

int count_slots(const ShapeNode& node) {
  if (node.is_leaf()) return 0;
  int total = node.multiplicity();
  for (const ShapeNode& b : node.branches) total += count_slots(b);
  return total;
}

void require_valid(const JoinShape& shape, const ExponentAssignment& pa) {
  if (auto violation = validate_exponents(shape, pa)) throw ValidationError(violation->message);
}

}  // namespace

ExponentAssignment bind_exponents(std::span<const double> p, std::span<const int> slot_to_index,
                                  double coexponent) {
  ExponentAssignment out;
  out.coexponent = coexponent;
  if (slot_to_index.empty()) {
    out.exponents.assign(p.begin(), p.end());
    return out;
  }
  if (slot_to_index.size() != p.size()) {
    throw ValidationError("slot assignment covers " + std::to_string(slot_to_index.size()) +
                          " slots but " + std::to_string(p.size()) + " exponents are given");
  }
  std::vector<bool> taken(p.size(), false);
  out.exponents.resize(p.size());
  for (std::size_t slot = 0; slot < slot_to_index.size(); ++slot) {
    const int k = slot_to_index[slot];
    if (k < 0 || static_cast<std::size_t>(k) >= p.size() || taken[static_cast<std::size_t>(k)]) {
      throw ValidationError("slot assignment is not a permutation of the exponent list");
    }
    taken[static_cast<std::size_t>(k)] = true;
    out.exponents[slot] = p[static_cast<std::size_t>(k)];
  }
  return out;
}

std::optional<ExponentViolation> validate_exponents(const JoinShape& shape,
                                                    const ExponentAssignment& pa) {
  using Kind = ExponentViolation::Kind;
  const int expected = shape.slot_count();
  const int given = static_cast<int>(pa.exponents.size());
  if (given != expected) {
    return ExponentViolation{Kind::count,
                             "exponent count " + std::to_string(given) + " != " +
                                 std::to_string(expected) + " join slots",
                             static_cast<double>(given - expected)};
  }
  for (std::size_t i = 0; i < pa.exponents.size(); ++i) {
    const double p = pa.exponents[i];
    if (!(p > 0.0) || std::isnan(p)) {
      return ExponentViolation{Kind::positivity,
                               "exponent for slot " + std::to_string(i) + " must be positive",
                               p};
    }
  }
  if (!(pa.coexponent >= 0.0 && pa.coexponent <= 1.0)) {
    return ExponentViolation{Kind::coexponent, "coexponent must lie in [0, 1]", pa.coexponent};
  }
  const double residual = reciprocal_sum(pa, 0, given) + pa.coexponent - 1.0;
  if (std::fabs(residual) > kConjugacyTolerance) {
    return ExponentViolation{Kind::conjugacy,
                             "reciprocal exponents sum to 1 + (" + std::to_string(residual) + ")",
                             residual};
  }
  return std::nullopt;
}

double log_level_power_sum(const TreeParams& tree, const CylinderMassTable& masses,
                           const LevelFunction& f, const Vertex& base, int level, double p) {
  if (level < base.level() || level > tree.depth()) {
    throw UsageError("level " + std::to_string(level) + " outside [" + std::to_string(base.level()) +
                     ", " + std::to_string(tree.depth()) + "]");
  }
  const auto [begin, end] = tree.descendant_range(base, level);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(end - begin));
  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint64_t pos = begin; pos < end; ++pos) {
    const double mass = masses.at(level, pos);
    double term;
    if (mass > 0.0) {
      term = p * std::log(f.at(level, pos)) + (1.0 + p) * std::log(mass);
    } else if (1.0 + p == 0.0) {
      term = p * std::log(f.at(level, pos));  // 0^0 = 1
    } else {
      continue;
    }
    logs.push_back(term);
    peak = std::max(peak, term);
  }
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  for (double t : logs) scaled += std::exp(t - peak);
  return peak + std::log(scaled);
}

double level_power_sum(const TreeParams& tree, const CylinderMassTable& masses, const LevelFunction& f,
                       const Vertex& base, int level, double p) {
  return std::exp(log_level_power_sum(tree, masses, f, base, level, p));
}

double log_rhs_product(const JoinShape& shape, const Vertex& base, const CylinderMassTable& masses,
                       const LevelFunction& f, const ExponentAssignment& pa, double K) {
  require_valid(shape, pa);
  if (shape.base_level() != base.level()) throw UsageError("shape base level differs from base");
  if (!(K >= 0.0)) throw ValidationError("constant K must be nonnegative");
  if (K == 0.0) return -std::numeric_limits<double>::infinity();
  double total = std::log(K);
  const std::vector<ShapeSlot> slots = shape.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double p = pa.exponents[i];
    const double log_sum = log_level_power_sum(masses.tree(), masses, f, base, slots[i].level, p);
    if (log_sum == -std::numeric_limits<double>::infinity()) return log_sum;
    total += log_sum / p;
  }
  return total;
}

double rhs_product(const JoinShape& shape, const Vertex& base, const CylinderMassTable& masses,
                   const LevelFunction& f, const ExponentAssignment& pa, double K) {
  return std::exp(log_rhs_product(shape, base, masses, f, pa, K));
}

GeneralConstant k_general(const JoinShape& shape) {
  const int m = shape.arity();
  GeneralConstant out;
  for (const ShapeNodeRef& ref : shape.internal_nodes()) {
    const int d = static_cast<int>(ref.node->branches.size());
    out.value *= factorial(m - 1) / factorial(m - d);
  }
  out.crude = std::pow(static_cast<double>(m - 1), shape.slot_count());
  return out;
}

BinaryConstant k_binary(const JoinShape& shape, const ExponentAssignment& pa) {
  if (shape.arity() != 2) throw UsageError("binary-optimal constant requires m = 2");
  require_valid(shape, pa);
  BinaryConstant out;
  out.top_condition_met = true;
  out.deep_condition_met = true;

  // Slots are contiguous per subtree: own slots first, then each branch.
  int cursor = 0;
  auto walk = [&](auto&& self, const ShapeNode& node, bool top) -> void {
    if (node.is_leaf()) return;
    cursor += node.multiplicity();
    for (const ShapeNode& branch : node.branches) {
      const int begin = cursor;
      self(self, branch, false);
      const double share = reciprocal_sum(pa, begin, cursor);
      if (share > 0.5 + kConjugacyTolerance) (top ? out.top_condition_met : out.deep_condition_met) = false;
    }
  };
  walk(walk, shape.top(), true);
  out.condition_met = out.top_condition_met && out.deep_condition_met;
  out.value = out.condition_met ? std::ldexp(1.0, -shape.slot_count()) : k_general(shape).value;
  return out;
}

InductiveConstant k_inductive(const JoinShape& shape, const ExponentAssignment& pa) {
  require_valid(shape, pa);
  const int m = shape.arity();
  const double mfact = factorial(m - 1);
  InductiveConstant out;

  const std::vector<ShapeNodeRef> refs = shape.internal_nodes();
  std::size_t next_ref = 0;
  int cursor = 0;
  auto walk = [&](auto&& self, const ShapeNode& node, double inherited) -> void {
    if (node.is_leaf()) return;
    const ShapeNodeRef& ref = refs[next_ref++];
    const int d = static_cast<int>(node.branches.size());
    InductiveStep step;
    step.node = ref.id;
    step.level = ref.level;
    step.branches = d;
    step.inherited_coexponent = inherited;

    const int own_begin = cursor;
    cursor += node.multiplicity();
    step.beta_coexponent = reciprocal_sum(pa, own_begin, cursor) + inherited;
    const std::size_t ledger_slot = out.ledger.size();
    out.ledger.push_back(step);

    std::vector<double> branch_coexponents;
    for (const ShapeNode& branch : node.branches) {
      if (branch.is_leaf()) {
        branch_coexponents.push_back(1.0);
        continue;
      }
      const int begin = cursor;
      const int width = count_slots(branch);
      const double coexp = 1.0 - reciprocal_sum(pa, begin, begin + width);
      branch_coexponents.push_back(coexp);
      self(self, branch, coexp);
    }

    InductiveStep& entry = out.ledger[ledger_slot];
    entry.branch_coexponents = branch_coexponents;
    const double inv_beta = entry.beta_coexponent;
    std::vector<double> a(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(j)] = branch_coexponents[static_cast<std::size_t>(j)] / inv_beta;
    entry.muirhead_exponents = a;
    const MuirheadSpec spec(a);
    const MuirheadClosedForm closed = muirhead_closed_form(spec);
    entry.muirhead_case = closed.which;
    double certified = closed.upper;
    if (closed.exact) {
      entry.muirhead_value = closed.value;
      certified = closed.value;
    } else {
      entry.muirhead_value = muirhead_numeric(spec).value;
      entry.estimated = true;
    }
    const double tail = std::pow(mfact, 1.0 - inv_beta) / factorial(m - d);
    entry.factor = std::pow(entry.muirhead_value, inv_beta) * tail;
    entry.certified_factor = std::pow(certified, inv_beta) * tail;
  };
  walk(walk, shape.top(), pa.coexponent);

  for (const InductiveStep& step : out.ledger) {
    out.value *= step.factor;
    out.certified_upper *= step.certified_factor;
    out.estimated = out.estimated || step.estimated;
  }
  return out;
}

}  // namespace joinforge
