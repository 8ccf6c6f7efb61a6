#pragma once

// Configurations of distinct leaves below a base vertex, their canonical
// join shapes, and the orbits of ordered tuples under the automorphisms of
// the rooted tree that fix the base.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "joinforge/tree.hpp"

namespace joinforge {

inline constexpr std::uint64_t kDefaultEnumerationGuard = 10'000'000;

// Ordered tuple of n >= 1 distinct leaves, all descending from `base`.
class Configuration {
 public:
  Configuration(const TreeParams& tree, Vertex base, std::vector<Vertex> particles);

  const TreeParams& tree() const { return tree_; }
  const Vertex& base() const { return base_; }
  std::span<const Vertex> particles() const { return particles_; }
  const Vertex& operator[](std::size_t i) const { return particles_[i]; }
  std::size_t size() const { return particles_.size(); }

  bool operator==(const Configuration& other) const {
    return tree_ == other.tree_ && base_ == other.base_ && particles_ == other.particles_;
  }

 private:
  TreeParams tree_;
  Vertex base_;
  std::vector<Vertex> particles_;
};

JoinMultiset join_multiset(const Configuration& config);

// One node of a join shape. Internal nodes stand for a join point with
// d = branches.size() >= 2 occupied children; leaves stand for a particle.
// `gap` counts levels from the parent join point (from the base for the top
// node) down to this node; for a leaf it reaches the free level.
struct ShapeNode {
  int gap = 0;
  int particle = -1;               // leaves only, zero-based
  std::vector<int> indices;        // sorted zero-based particle indices
  std::vector<ShapeNode> branches;  // canonical order

  bool is_leaf() const { return branches.empty(); }
  int multiplicity() const { return is_leaf() ? 0 : static_cast<int>(branches.size()) - 1; }
  bool operator==(const ShapeNode&) const = default;
};

// Internal node seen during a pre-order walk, with absolute levels.
struct ShapeNodeRef {
  const ShapeNode* node;
  int id;  // pre-order position among internal nodes
  int level;
  int parent_level;
};

// Exponent slot: internal node `node` owns multiplicity() consecutive slots.
struct ShapeSlot {
  int node;
  int level;
};

// Canonical, index-annotated orbit invariant. Branches at every node are
// sorted by (serialization without indices, smallest particle index).
//
// Slots are numbered in pre-order: a node's own slots first, then those of
// each branch in canonical order, so the slots of any subtree are contiguous.
class JoinShape {
 public:
  JoinShape(int arity, int depth, int base_level, ShapeNode top)
      : arity_(arity), depth_(depth), base_level_(base_level), top_(std::move(top)) {}

  int arity() const { return arity_; }
  int depth() const { return depth_; }
  int base_level() const { return base_level_; }
  const ShapeNode& top() const { return top_; }
  int particle_count() const { return static_cast<int>(top_.indices.size()); }
  int slot_count() const { return particle_count() - 1; }

  std::vector<ShapeNodeRef> internal_nodes() const;
  std::vector<ShapeSlot> slots() const;
  // Levels of the join points with multiplicity, in slot order.
  std::vector<int> join_levels() const;

  // Nested-list text form. Internal node: [gap,[branch,...]]; leaf with
  // indices: [gap,index] (one-based); leaf without indices: [gap].
  std::string serialize(bool with_indices = true) const;

  bool operator==(const JoinShape&) const = default;

 private:
  int arity_;
  int depth_;
  int base_level_;
  ShapeNode top_;
};

std::string serialize_node(const ShapeNode& node, bool with_indices);

JoinShape extract_shape(const Configuration& config);

// True iff an automorphism fixing the base maps a onto b position-wise.
// Throws UsageError when the trees, bases or sizes differ.
bool equivalent(const Configuration& a, const Configuration& b);

// Number of ordered tuples in the orbit. Throws std::overflow_error when the
// count does not fit in 64 bits.
std::uint64_t orbit_size(const JoinShape& shape);
std::uint64_t orbit_size(const Configuration& config);
// Same count, clamped to UINT64_MAX instead of throwing.
std::uint64_t orbit_size_saturating(const JoinShape& shape);

// Visits every member of the orbit exactly once. Refuses with GuardExceeded
// when orbit_size exceeds `guard`.
void orbit_enumerate(const Configuration& config,
                     const std::function<void(const Configuration&)>& visit,
                     std::uint64_t guard = kDefaultEnumerationGuard);

std::vector<Configuration> orbit_members(const Configuration& config,
                                         std::uint64_t guard = kDefaultEnumerationGuard);

// A configuration whose canonical shape is `shape`, placed below `base`.
// Choices are made with the smallest available symbols.
Configuration realize(const TreeParams& tree, const Vertex& base, const JoinShape& shape);

}  // namespace joinforge
