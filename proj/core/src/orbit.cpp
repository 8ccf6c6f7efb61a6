#include "joinforge/orbit.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "joinforge/error.hpp"

namespace joinforge {

Configuration::Configuration(const TreeParams& tree, Vertex base, std::vector<Vertex> particles)
    : tree_(tree), base_(std::move(base)), particles_(std::move(particles)) {
  tree_.require(base_);
  if (particles_.empty()) throw ConfigError("configuration needs at least one particle");
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const Vertex& p = particles_[i];
    tree_.require(p);
    if (!tree_.is_leaf(p)) {
      throw ConfigError("particle " + std::to_string(i + 1) + " (\"" + p.to_string() +
                        "\") is not a free vertex");
    }
    if (!base_.is_prefix_of(p)) {
      throw ConfigError("particle " + std::to_string(i + 1) + " (\"" + p.to_string() +
                        "\") does not descend from base \"" + base_.to_string() + "\"");
    }
  }
  std::set<Vertex> distinct(particles_.begin(), particles_.end());
  if (distinct.size() != particles_.size()) throw ConfigError("configuration repeats a particle");
}

JoinMultiset join_multiset(const Configuration& config) { return join_multiset(config.particles()); }

namespace {

void write_node(const ShapeNode& node, bool with_indices, std::string& out) {
  out += '[';
  out += std::to_string(node.gap);
  if (node.is_leaf()) {
    if (with_indices) {
      out += ',';
      out += std::to_string(node.particle + 1);
    }
  } else {
    out += ",[";
    for (std::size_t i = 0; i < node.branches.size(); ++i) {
      if (i) out += ',';
      write_node(node.branches[i], with_indices, out);
    }
    out += ']';
  }
  out += ']';
}

ShapeNode build_node(const Configuration& config, std::vector<int> indices, int parent_level) {
  ShapeNode node;
  std::sort(indices.begin(), indices.end());
  if (indices.size() == 1) {
    node.gap = config.tree().depth() - parent_level;
    node.particle = indices.front();
    node.indices = std::move(indices);
    return node;
  }
  const Vertex& first = config[static_cast<std::size_t>(indices.front())];
  int level = first.level();
  for (int i : indices) level = std::min(level, join_level(first, config[static_cast<std::size_t>(i)]));
  node.gap = level - parent_level;

  std::map<Symbol, std::vector<int>> groups;
  for (int i : indices) groups[config[static_cast<std::size_t>(i)][static_cast<std::size_t>(level)]].push_back(i);
  std::vector<std::pair<std::string, ShapeNode>> keyed;
  for (auto& [symbol, group] : groups) {
    ShapeNode branch = build_node(config, std::move(group), level);
    keyed.emplace_back(serialize_node(branch, false), std::move(branch));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.indices.front() < b.second.indices.front();
  });
  for (auto& entry : keyed) node.branches.push_back(std::move(entry.second));
  node.indices = std::move(indices);
  return node;
}

void collect_internal(const ShapeNode& node, int parent_level, int depth,
                      std::vector<ShapeNodeRef>& out) {
  if (node.is_leaf()) return;
  const int level = parent_level + node.gap;
  out.push_back({&node, static_cast<int>(out.size()), level, parent_level});
  for (const ShapeNode& b : node.branches) collect_internal(b, level, depth, out);
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, bool& overflow) {
  std::uint64_t product = 0;
  if (__builtin_mul_overflow(a, b, &product)) {
    overflow = true;
    return std::numeric_limits<std::uint64_t>::max();
  }
  return product;
}

std::uint64_t saturating_pow(std::uint64_t base, int exponent, bool& overflow) {
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) result = saturating_mul(result, base, overflow);
  return result;
}

// Orbit count below a fixed join vertex of `node`.
std::uint64_t count_at_join(const ShapeNode& node, std::uint64_t m, bool& overflow) {
  if (node.is_leaf()) return 1;
  const auto d = static_cast<std::uint64_t>(node.branches.size());
  std::uint64_t count = 1;
  for (std::uint64_t i = 0; i < d; ++i) count = saturating_mul(count, m - i, overflow);
  for (const ShapeNode& b : node.branches) {
    count = saturating_mul(count, saturating_pow(m, b.gap - 1, overflow), overflow);
    count = saturating_mul(count, count_at_join(b, m, overflow), overflow);
  }
  return count;
}

std::uint64_t count_orbit(const JoinShape& shape, bool& overflow) {
  const auto m = static_cast<std::uint64_t>(shape.arity());
  std::uint64_t count = saturating_pow(m, shape.top().gap, overflow);
  return saturating_mul(count, count_at_join(shape.top(), m, overflow), overflow);
}

using Partition = std::vector<std::vector<int>>;

int group_join_level(const Configuration& c, const std::vector<int>& indices) {
  const Vertex& first = c[static_cast<std::size_t>(indices.front())];
  int level = first.level();
  for (int i : indices) level = std::min(level, join_level(first, c[static_cast<std::size_t>(i)]));
  return level;
}

Partition split_by_child(const Configuration& c, const std::vector<int>& indices, int level) {
  std::map<Symbol, std::vector<int>> groups;
  for (int i : indices) groups[c[static_cast<std::size_t>(i)][static_cast<std::size_t>(level)]].push_back(i);
  Partition parts;
  for (auto& [symbol, group] : groups) parts.push_back(std::move(group));
  std::sort(parts.begin(), parts.end());
  return parts;
}

// Builds the automorphism level by level: the index sets sent to the
// children of matching join vertices must coincide.
bool match_groups(const Configuration& a, const Configuration& b, const std::vector<int>& indices) {
  if (indices.size() < 2) return true;
  const int level = group_join_level(a, indices);
  if (level != group_join_level(b, indices)) return false;
  const Partition pa = split_by_child(a, indices, level);
  if (pa != split_by_child(b, indices, level)) return false;
  return std::all_of(pa.begin(), pa.end(),
                     [&](const std::vector<int>& part) { return match_groups(a, b, part); });
}

void place(const ShapeNode& node, const Vertex& anchor, int depth, std::vector<Vertex>& out) {
  // `anchor` is the vertex reached after descending the node's gap.
  if (node.is_leaf()) {
    out[static_cast<std::size_t>(node.particle)] = anchor;
    return;
  }
  for (std::size_t t = 0; t < node.branches.size(); ++t) {
    const ShapeNode& branch = node.branches[t];
    Vertex target = anchor.child(static_cast<Symbol>(t + 1));
    for (int i = 1; i < branch.gap; ++i) target = target.child(1);
    place(branch, target, depth, out);
  }
}

}  // namespace

std::string serialize_node(const ShapeNode& node, bool with_indices) {
  std::string out;
  write_node(node, with_indices, out);
  return out;
}

std::string JoinShape::serialize(bool with_indices) const { return serialize_node(top_, with_indices); }

std::vector<ShapeNodeRef> JoinShape::internal_nodes() const {
  std::vector<ShapeNodeRef> out;
  collect_internal(top_, base_level_, depth_, out);
  return out;
}

std::vector<ShapeSlot> JoinShape::slots() const {
  std::vector<ShapeSlot> out;
  for (const ShapeNodeRef& ref : internal_nodes()) {
    for (int r = 0; r < ref.node->multiplicity(); ++r) out.push_back({ref.id, ref.level});
  }
  return out;
}

std::vector<int> JoinShape::join_levels() const {
  std::vector<int> out;
  for (const ShapeSlot& slot : slots()) out.push_back(slot.level);
  return out;
}

JoinShape extract_shape(const Configuration& config) {
  std::vector<int> indices(config.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  return JoinShape(config.tree().arity(), config.tree().depth(), config.base().level(),
                   build_node(config, std::move(indices), config.base().level()));
}

bool equivalent(const Configuration& a, const Configuration& b) {
  if (!(a.tree() == b.tree())) throw UsageError("configurations live on different trees");
  if (a.base() != b.base()) throw UsageError("configurations have different bases");
  if (a.size() != b.size()) throw UsageError("configurations have different particle counts");
  std::vector<int> indices(a.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  return match_groups(a, b, indices);
}

std::uint64_t orbit_size(const JoinShape& shape) {
  bool overflow = false;
  const std::uint64_t count = count_orbit(shape, overflow);
  if (overflow) throw std::overflow_error("orbit size does not fit in 64 bits");
  return count;
}

std::uint64_t orbit_size(const Configuration& config) { return orbit_size(extract_shape(config)); }

std::uint64_t orbit_size_saturating(const JoinShape& shape) {
  bool overflow = false;
  return count_orbit(shape, overflow);
}

void orbit_enumerate(const Configuration& config,
                     const std::function<void(const Configuration&)>& visit, std::uint64_t guard) {
  const JoinShape reference = extract_shape(config);
  const std::uint64_t estimate = orbit_size_saturating(reference);
  if (estimate > guard) throw GuardExceeded(estimate, guard);

  const TreeParams& tree = config.tree();
  const std::size_t n = config.size();
  std::vector<std::vector<int>> levels(n, std::vector<int>(n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t s = 0; s < n; ++s) levels[r][s] = join_level(config[r], config[s]);
  }

  const auto [begin, end] = tree.descendant_range(config.base(), tree.depth());
  std::vector<Vertex> leaves;
  leaves.reserve(static_cast<std::size_t>(end - begin));
  for (std::uint64_t pos = begin; pos < end; ++pos) leaves.push_back(tree.vertex_at(tree.depth(), pos));

  // Backtracking over S_v(n) on the pairwise join-level matrix, which is a
  // complete orbit invariant for ordered tuples below a fixed base.
  std::vector<std::size_t> chosen(n);
  std::vector<bool> used(leaves.size(), false);
  std::vector<Vertex> tuple(n);
  auto descend = [&](auto&& self, std::size_t t) -> void {
    if (t == n) {
      visit(Configuration(tree, config.base(), tuple));
      return;
    }
    for (std::size_t cand = 0; cand < leaves.size(); ++cand) {
      if (used[cand]) continue;
      bool consistent = true;
      for (std::size_t r = 0; r < t && consistent; ++r) {
        consistent = join_level(leaves[cand], leaves[chosen[r]]) == levels[r][t];
      }
      if (!consistent) continue;
      used[cand] = true;
      chosen[t] = cand;
      tuple[t] = leaves[cand];
      self(self, t + 1);
      used[cand] = false;
    }
  };
  descend(descend, 0);
}

std::vector<Configuration> orbit_members(const Configuration& config, std::uint64_t guard) {
  std::vector<Configuration> out;
  orbit_enumerate(config, [&](const Configuration& c) { out.push_back(c); }, guard);
  return out;
}

Configuration realize(const TreeParams& tree, const Vertex& base, const JoinShape& shape) {
  if (shape.arity() != tree.arity() || shape.depth() != tree.depth()) {
    throw UsageError("shape was extracted on a different tree");
  }
  if (shape.base_level() != base.level()) throw UsageError("shape base level differs from base");
  for (const ShapeNodeRef& ref : shape.internal_nodes()) {
    if (static_cast<int>(ref.node->branches.size()) > tree.arity()) {
      throw UsageError("shape node has more branches than the tree arity");
    }
  }
  Vertex anchor = base;
  for (int i = 0; i < shape.top().gap; ++i) anchor = anchor.child(1);
  std::vector<Vertex> particles(static_cast<std::size_t>(shape.particle_count()));
  place(shape.top(), anchor, tree.depth(), particles);
  return Configuration(tree, base, std::move(particles));
}

}  // namespace joinforge
