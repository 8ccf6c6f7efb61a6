#pragma once

// Symbolic description of the m-ary regular rooted tree: vertex words,
// per-leaf weights, cylinder masses, per-vertex values and joins.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace joinforge {

using Symbol = int;

// A word over {1..m}. The empty word is the root; the word length is the
// level of the vertex.
class Vertex {
 public:
  Vertex() = default;
  explicit Vertex(std::vector<Symbol> word) : word_(std::move(word)) {}
  Vertex(std::initializer_list<Symbol> word) : word_(word) {}

  static Vertex root() { return Vertex(); }

  // Parses the dotted text encoding ("2.1.1"; "" is the root). Symbols are
  // checked for positivity only; arity checks belong to TreeParams.
  static Vertex parse(std::string_view text);

  int level() const { return static_cast<int>(word_.size()); }
  bool is_root() const { return word_.empty(); }
  std::span<const Symbol> word() const { return word_; }
  Symbol operator[](std::size_t i) const { return word_[i]; }

  Vertex child(Symbol s) const;
  Vertex prefix(int length) const;

  // Curtailment: true when this word is an initial subword of `other`.
  bool is_prefix_of(const Vertex& other) const;

  std::string to_string() const;

  auto operator<=>(const Vertex&) const = default;
  bool operator==(const Vertex&) const = default;

 private:
  std::vector<Symbol> word_;
};

// Longest common prefix of the two words.
Vertex join(const Vertex& a, const Vertex& b);

// Length of the longest common prefix, i.e. join(a, b).level().
int join_level(const Vertex& a, const Vertex& b);

// Shape of the tree: arity m >= 2 and depth k >= 1 (levels below the root).
//
// Vertices at one level are addressed by position, the base-m number formed
// by the zero-based symbols. The heap index of a vertex is the number of
// vertices on shallower levels plus its position.
class TreeParams {
 public:
  TreeParams(int arity, int depth);

  int arity() const { return arity_; }
  int depth() const { return depth_; }

  std::uint64_t vertex_count() const;
  std::uint64_t leaf_count() const { return level_size(depth_); }
  std::uint64_t level_size(int level) const { return powers_.at(level); }
  std::uint64_t level_offset(int level) const;

  bool contains(const Vertex& v) const;
  // Throws ConfigError naming the offending word.
  void require(const Vertex& v) const;
  bool is_leaf(const Vertex& v) const { return v.level() == depth_; }

  std::uint64_t position(const Vertex& v) const;
  std::uint64_t index(const Vertex& v) const { return level_offset(v.level()) + position(v); }
  Vertex vertex_at(int level, std::uint64_t position) const;

  // Half-open range of positions at `level` below `v` (level >= v.level()).
  std::pair<std::uint64_t, std::uint64_t> descendant_range(const Vertex& v, int level) const;

  bool operator==(const TreeParams& other) const {
    return arity_ == other.arity_ && depth_ == other.depth_;
  }

 private:
  int arity_;
  int depth_;
  std::vector<std::uint64_t> powers_;  // m^0 .. m^(k+1)
};

// Dense tables are capped so that a typo in m or k fails loudly.
inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 24;

// Nonnegative weight on every leaf, stored by leaf position.
class WeightAssignment {
 public:
  WeightAssignment(const TreeParams& tree, std::vector<double> by_position);

  static WeightAssignment uniform(const TreeParams& tree, double value);
  // Every leaf must be present in `weights`.
  static WeightAssignment from_map(const TreeParams& tree, const std::map<Vertex, double>& weights);

  const TreeParams& tree() const { return tree_; }
  double operator()(const Vertex& leaf) const { return values_[tree_.position(leaf)]; }
  double at(std::uint64_t position) const { return values_[position]; }
  std::span<const double> values() const { return values_; }

  WeightAssignment scaled(double factor) const;

 private:
  TreeParams tree_;
  std::vector<double> values_;
};

// Positive value on every vertex, stored by heap index.
class LevelFunction {
 public:
  LevelFunction(const TreeParams& tree, std::vector<double> by_index);

  static LevelFunction constant(const TreeParams& tree, double value);
  // Vertices missing from `values` take `fallback`; pass a non-positive
  // fallback to require every vertex.
  static LevelFunction from_map(const TreeParams& tree, const std::map<Vertex, double>& values,
                                double fallback);

  const TreeParams& tree() const { return tree_; }
  double operator()(const Vertex& v) const { return values_[tree_.index(v)]; }
  double at(int level, std::uint64_t position) const {
    return values_[tree_.level_offset(level) + position];
  }
  std::span<const double> values() const { return values_; }

  LevelFunction scaled(double factor) const;

 private:
  TreeParams tree_;
  std::vector<double> values_;
};

// mu(C_v) for every vertex: the total weight of the leaves below v.
class CylinderMassTable {
 public:
  CylinderMassTable(const TreeParams& tree, std::vector<double> by_index)
      : tree_(tree), mass_(std::move(by_index)) {}

  const TreeParams& tree() const { return tree_; }
  double mass(const Vertex& v) const { return mass_[tree_.index(v)]; }
  double at(int level, std::uint64_t position) const {
    return mass_[tree_.level_offset(level) + position];
  }

 private:
  TreeParams tree_;
  std::vector<double> mass_;
};

CylinderMassTable cylinder_masses(const TreeParams& tree, const WeightAssignment& weights);

// Join points with multiplicity. A vertex w has multiplicity r when r + 1
// particles pairwise join at w; the multiplicities sum to n - 1.
using JoinMultiset = std::map<Vertex, int>;

// Throws ConfigError on repeated particles.
JoinMultiset join_multiset(std::span<const Vertex> particles);

}  // namespace joinforge
