#include "joinforge/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "joinforge/error.hpp"

namespace joinforge {

Vertex Vertex::parse(std::string_view text) {
  std::vector<Symbol> word;
  if (text.empty()) return Vertex();
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view token =
        text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    Symbol symbol = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), symbol);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size() || symbol < 1) {
      throw ConfigError("malformed vertex \"" + std::string(text) + "\"");
    }
    word.push_back(symbol);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return Vertex(std::move(word));
}

Vertex Vertex::child(Symbol s) const {
  std::vector<Symbol> word = word_;
  word.push_back(s);
  return Vertex(std::move(word));
}

Vertex Vertex::prefix(int length) const {
  const auto n = static_cast<std::size_t>(std::clamp(length, 0, level()));
  return Vertex(std::vector<Symbol>(word_.begin(), word_.begin() + static_cast<std::ptrdiff_t>(n)));
}

bool Vertex::is_prefix_of(const Vertex& other) const {
  return word_.size() <= other.word_.size() &&
         std::equal(word_.begin(), word_.end(), other.word_.begin());
}

std::string Vertex::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(word_[i]);
  }
  return out;
}

int join_level(const Vertex& a, const Vertex& b) {
  const auto wa = a.word();
  const auto wb = b.word();
  const auto mismatch = std::mismatch(wa.begin(), wa.end(), wb.begin(), wb.end());
  return static_cast<int>(mismatch.first - wa.begin());
}

Vertex join(const Vertex& a, const Vertex& b) { return a.prefix(join_level(a, b)); }

TreeParams::TreeParams(int arity, int depth) : arity_(arity), depth_(depth) {
  if (arity < 2) throw ConfigError("tree arity must be at least 2, got " + std::to_string(arity));
  if (depth < 1) throw ConfigError("tree depth must be at least 1, got " + std::to_string(depth));
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  powers_.reserve(static_cast<std::size_t>(depth) + 2);
  std::uint64_t value = 1;
  for (int level = 0; level <= depth + 1; ++level) {
    powers_.push_back(value);
    if (level <= depth && value > kLimit / static_cast<std::uint64_t>(arity)) {
      throw ConfigError("tree with arity " + std::to_string(arity) + " and depth " +
                        std::to_string(depth) + " is too large to address");
    }
    value *= static_cast<std::uint64_t>(arity);
  }
}

std::uint64_t TreeParams::vertex_count() const { return level_offset(depth_ + 1); }

std::uint64_t TreeParams::level_offset(int level) const {
  return (powers_.at(level) - 1) / static_cast<std::uint64_t>(arity_ - 1);
}

bool TreeParams::contains(const Vertex& v) const {
  if (v.level() > depth_) return false;
  return std::all_of(v.word().begin(), v.word().end(),
                     [this](Symbol s) { return s >= 1 && s <= arity_; });
}

void TreeParams::require(const Vertex& v) const {
  if (!contains(v)) {
    throw ConfigError("vertex \"" + v.to_string() + "\" is not in the " + std::to_string(arity_) +
                      "-ary tree of depth " + std::to_string(depth_));
  }
}

std::uint64_t TreeParams::position(const Vertex& v) const {
  std::uint64_t pos = 0;
  for (Symbol s : v.word()) pos = pos * static_cast<std::uint64_t>(arity_) + static_cast<std::uint64_t>(s - 1);
  return pos;
}

Vertex TreeParams::vertex_at(int level, std::uint64_t position) const {
  std::vector<Symbol> word(static_cast<std::size_t>(level));
  for (int i = level - 1; i >= 0; --i) {
    word[static_cast<std::size_t>(i)] = static_cast<Symbol>(position % static_cast<std::uint64_t>(arity_)) + 1;
    position /= static_cast<std::uint64_t>(arity_);
  }
  return Vertex(std::move(word));
}

std::pair<std::uint64_t, std::uint64_t> TreeParams::descendant_range(const Vertex& v,
                                                                     int level) const {
  const std::uint64_t width = powers_.at(level - v.level());
  const std::uint64_t begin = position(v) * width;
  return {begin, begin + width};
}

namespace {

void check_table_size(std::uint64_t entries) {
  if (entries > kMaxTableEntries) {
    throw ConfigError("tree too large for dense tables (" + std::to_string(entries) + " entries)");
  }
}

}  // namespace

WeightAssignment::WeightAssignment(const TreeParams& tree, std::vector<double> by_position)
    : tree_(tree), values_(std::move(by_position)) {
  check_table_size(tree_.leaf_count());
  if (values_.size() != tree_.leaf_count()) {
    throw ConfigError("weight table has " + std::to_string(values_.size()) + " entries, tree has " +
                      std::to_string(tree_.leaf_count()) + " leaves");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw ConfigError("leaf weight of \"" + tree_.vertex_at(tree_.depth(), i).to_string() +
                        "\" must be finite and nonnegative");
    }
  }
}

WeightAssignment WeightAssignment::uniform(const TreeParams& tree, double value) {
  check_table_size(tree.leaf_count());
  return WeightAssignment(tree, std::vector<double>(tree.leaf_count(), value));
}

WeightAssignment WeightAssignment::from_map(const TreeParams& tree,
                                            const std::map<Vertex, double>& weights) {
  check_table_size(tree.leaf_count());
  std::vector<double> values(tree.leaf_count(), -1.0);
  std::vector<bool> seen(values.size(), false);
  for (const auto& [leaf, weight] : weights) {
    tree.require(leaf);
    if (!tree.is_leaf(leaf)) throw ConfigError("weight given for non-leaf \"" + leaf.to_string() + "\"");
    values[tree.position(leaf)] = weight;
    seen[tree.position(leaf)] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ConfigError("missing leaf weight for \"" + tree.vertex_at(tree.depth(), i).to_string() + "\"");
    }
  }
  return WeightAssignment(tree, std::move(values));
}

WeightAssignment WeightAssignment::scaled(double factor) const {
  std::vector<double> values = values_;
  for (double& v : values) v *= factor;
  return WeightAssignment(tree_, std::move(values));
}

LevelFunction::LevelFunction(const TreeParams& tree, std::vector<double> by_index)
    : tree_(tree), values_(std::move(by_index)) {
  check_table_size(tree_.vertex_count());
  if (values_.size() != tree_.vertex_count()) {
    throw ConfigError("vertex function has " + std::to_string(values_.size()) +
                      " entries, tree has " + std::to_string(tree_.vertex_count()) + " vertices");
  }
  for (int level = 0; level <= tree_.depth(); ++level) {
    for (std::uint64_t pos = 0; pos < tree_.level_size(level); ++pos) {
      const double v = values_[tree_.level_offset(level) + pos];
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("vertex function at \"" + tree_.vertex_at(level, pos).to_string() +
                          "\" must be finite and positive");
      }
    }
  }
}

LevelFunction LevelFunction::constant(const TreeParams& tree, double value) {
  check_table_size(tree.vertex_count());
  return LevelFunction(tree, std::vector<double>(tree.vertex_count(), value));
}

LevelFunction LevelFunction::from_map(const TreeParams& tree, const std::map<Vertex, double>& values,
                                      double fallback) {
  check_table_size(tree.vertex_count());
  std::vector<double> table(tree.vertex_count(), fallback);
  std::vector<bool> seen(table.size(), false);
  for (const auto& [v, value] : values) {
    tree.require(v);
    table[tree.index(v)] = value;
    seen[tree.index(v)] = true;
  }
  if (!(fallback > 0.0)) {
    for (int level = 0; level <= tree.depth(); ++level) {
      for (std::uint64_t pos = 0; pos < tree.level_size(level); ++pos) {
        if (!seen[tree.level_offset(level) + pos]) {
          throw ConfigError("missing vertex function value for \"" +
                            tree.vertex_at(level, pos).to_string() + "\"");
        }
      }
    }
  }
  return LevelFunction(tree, std::move(table));
}

LevelFunction LevelFunction::scaled(double factor) const {
  std::vector<double> values = values_;
  for (double& v : values) v *= factor;
  return LevelFunction(tree_, std::move(values));
}

CylinderMassTable cylinder_masses(const TreeParams& tree, const WeightAssignment& weights) {
  if (!(weights.tree() == tree)) throw ConfigError("weights belong to a different tree");
  std::vector<double> mass(tree.vertex_count(), 0.0);
  const auto leaves = weights.values();
  std::copy(leaves.begin(), leaves.end(),
            mass.begin() + static_cast<std::ptrdiff_t>(tree.level_offset(tree.depth())));
  const auto m = static_cast<std::uint64_t>(tree.arity());
  for (int level = tree.depth() - 1; level >= 0; --level) {
    const std::uint64_t here = tree.level_offset(level);
    const std::uint64_t below = tree.level_offset(level + 1);
    for (std::uint64_t pos = 0; pos < tree.level_size(level); ++pos) {
      double total = 0.0;
      for (std::uint64_t c = 0; c < m; ++c) total += mass[below + pos * m + c];
      mass[here + pos] = total;
    }
  }
  return CylinderMassTable(tree, std::move(mass));
}

JoinMultiset join_multiset(std::span<const Vertex> particles) {
  std::set<Vertex> distinct(particles.begin(), particles.end());
  if (distinct.size() != particles.size()) throw ConfigError("configuration repeats a particle");

  std::set<Vertex> candidates;
  for (std::size_t a = 0; a < particles.size(); ++a) {
    for (std::size_t b = a + 1; b < particles.size(); ++b) {
      candidates.insert(join(particles[a], particles[b]));
    }
  }
  JoinMultiset result;
  for (const Vertex& w : candidates) {
    std::set<Symbol> children;
    for (const Vertex& p : particles) {
      if (w.is_prefix_of(p) && p.level() > w.level()) {
        children.insert(p[static_cast<std::size_t>(w.level())]);
      }
    }
    result.emplace(w, static_cast<int>(children.size()) - 1);
  }
  return result;
}

}  // namespace joinforge
