#include "joinforge/energy.hpp"

#include <numeric>
#include <span>
#include <vector>

#include "joinforge/error.hpp"

namespace joinforge {

const char* to_string(EnergyMethod method) {
  return method == EnergyMethod::bruteforce ? "bruteforce" : "factorized";
}

double interaction_value(const LevelFunction& f, const Configuration& config) {
  if (config.size() == 1) return 1.0;
  double value = 1.0;
  for (const auto& [vertex, multiplicity] : join_multiset(config)) {
    for (int r = 0; r < multiplicity; ++r) value *= f(vertex);
  }
  return value;
}

namespace {

double pairwise_sum(std::span<const double> terms) {
  if (terms.size() <= 8) return std::accumulate(terms.begin(), terms.end(), 0.0);
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

void check_inputs(const Configuration& config, const WeightAssignment& mu, const LevelFunction& f) {
  if (!(mu.tree() == config.tree()) || !(f.tree() == config.tree())) {
    throw ConfigError("weights, vertex function and configuration use different trees");
  }
}

// Per-vertex tables of sub-energies for the levels the shape visits,
// restricted to the subtree of the base.
class FactorizedEvaluator {
 public:
  FactorizedEvaluator(const Configuration& config, const WeightAssignment& mu, const LevelFunction& f)
      : tree_(config.tree()),
        base_(config.base()),
        base_position_(tree_.position(base_)),
        mu_(mu),
        f_(f),
        m_(static_cast<std::size_t>(tree_.arity())) {}

  double total(const JoinShape& shape) {
    const std::vector<double> table = node_table(shape.top(), base_.level());
    return std::accumulate(table.begin(), table.end(), 0.0);
  }

 private:
  std::uint64_t level_width(int level) const { return tree_.level_size(level - base_.level()); }
  std::uint64_t level_begin(int level) const { return base_position_ * level_width(level); }

  // Entry u holds the energy of the sub-orbit whose join vertex (or leaf) is
  // the u-th vertex of the node's level below the base.
  std::vector<double> node_table(const ShapeNode& node, int parent_level) {
    const int level = parent_level + node.gap;
    const std::uint64_t width = level_width(level);
    std::vector<double> table(width, 0.0);
    if (node.is_leaf()) {
      const std::uint64_t begin = level_begin(level);
      for (std::uint64_t u = 0; u < width; ++u) table[u] = mu_.at(begin + u);
      return table;
    }

    // Branch sums aggregated to the children of the join vertices: the
    // descent from a child down to the branch's own level sums over every
    // same-level descendant.
    const std::size_t d = node.branches.size();
    std::vector<std::vector<double>> at_children(d);
    for (std::size_t j = 0; j < d; ++j) {
      const std::vector<double> below = node_table(node.branches[j], level);
      const std::uint64_t block = tree_.level_size(node.branches[j].gap - 1);
      std::vector<double>& agg = at_children[j];
      agg.assign(width * m_, 0.0);
      for (std::uint64_t c = 0; c < agg.size(); ++c) {
        double sum = 0.0;
        for (std::uint64_t u = c * block; u < (c + 1) * block; ++u) sum += below[u];
        agg[c] = sum;
      }
    }

    const std::uint64_t begin = level_begin(level);
    std::vector<bool> used(m_, false);
    for (std::uint64_t w = 0; w < width; ++w) {
      // Injective assignments of the d branches to the m children.
      auto assign = [&](auto&& self, std::size_t j) -> double {
        if (j == d) return 1.0;
        double sum = 0.0;
        for (std::size_t c = 0; c < m_; ++c) {
          if (used[c]) continue;
          const double branch = at_children[j][w * m_ + c];
          if (branch == 0.0) continue;
          used[c] = true;
          sum += branch * self(self, j + 1);
          used[c] = false;
        }
        return sum;
      };
      const double fw = f_.at(level, begin + w);
      double factor = 1.0;
      for (std::size_t r = 1; r < d; ++r) factor *= fw;
      table[w] = factor * assign(assign, 0);
    }
    return table;
  }

  const TreeParams& tree_;
  const Vertex& base_;
  std::uint64_t base_position_;
  const WeightAssignment& mu_;
  const LevelFunction& f_;
  std::size_t m_;
};

}  // namespace

EnergyResult orbit_energy_bruteforce(const Configuration& config, const WeightAssignment& mu,
                                     const LevelFunction& f, const BruteforceOptions& options) {
  check_inputs(config, mu, f);
  std::vector<double> terms;
  double naive = 0.0;
  std::uint64_t count = 0;
  orbit_enumerate(
      config,
      [&](const Configuration& member) {
        double term = interaction_value(f, member);
        for (const Vertex& leaf : member.particles()) term *= mu(leaf);
        ++count;
        if (options.summation == Summation::pairwise) {
          terms.push_back(term);
        } else {
          naive += term;
        }
      },
      options.guard);
  const double value = options.summation == Summation::pairwise ? pairwise_sum(terms) : naive;
  return {value, EnergyMethod::bruteforce, count};
}

EnergyResult orbit_energy_factorized(const Configuration& config, const WeightAssignment& mu,
                                     const LevelFunction& f) {
  check_inputs(config, mu, f);
  const JoinShape shape = extract_shape(config);
  FactorizedEvaluator evaluator(config, mu, f);
  return {evaluator.total(shape), EnergyMethod::factorized, orbit_size_saturating(shape)};
}

}  // namespace joinforge
