#pragma once

// A complete inequality instance and its JSON file format.
//
//   {
//     "m": 2, "k": 3,
//     "base": [],                          // vertex as a symbol list or "2.1"
//     "config": [[1,1,1],[1,2,1],...],     // particles, lists or dotted strings
//     "mu": {"1.1.1": 2.0, ...},           // leaf weights, default 1.0
//     "f":  {"": 2.0, "1": 3.0, ...},      // vertex values, default 1.0
//     "p":  [3, 3, 3],
//     "slot_assignment": {"0": 2, ...},    // optional: slot id -> index into p
//     "regime": "general",                 // general | binary_optimal | inductive | explicit
//     "K": 0.125,                          // explicit regime only
//     "seed": 7                            // optional provenance
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "joinforge/bounds.hpp"
#include "joinforge/orbit.hpp"
#include "joinforge/tree.hpp"

namespace joinforge {

enum class RegimeKind { general, binary_optimal, inductive, explicit_value };

struct Regime {
  RegimeKind kind = RegimeKind::general;
  double value = 0.0;  // explicit_value only

  // Accepts general, binary_optimal / binary-optimal, inductive,
  // explicit=V. Throws UsageError otherwise.
  static Regime parse(std::string_view text);
  std::string name() const;
  bool operator==(const Regime&) const = default;
};

struct Instance {
  Configuration config;
  WeightAssignment mu;
  LevelFunction f;
  std::vector<double> p;
  std::vector<int> slot_assignment;  // slot -> index into p; empty = identity
  Regime regime;
  std::optional<std::uint64_t> seed;

  const TreeParams& tree() const { return config.tree(); }
  const Vertex& base() const { return config.base(); }
  ExponentAssignment exponents() const { return bind_exponents(p, slot_assignment); }
};

// Throws ConfigError carrying "line L, column C" for syntax errors and the
// field path for schema errors.
Instance parse_instance(std::string_view text);
Instance instance_from_json(const nlohmann::json& doc);
// Writes every leaf weight and every vertex value explicitly.
nlohmann::json instance_to_json(const Instance& instance);

Vertex vertex_from_json(const nlohmann::json& value, const std::string& field);
nlohmann::json vertex_to_json(const Vertex& v);

}  // namespace joinforge
