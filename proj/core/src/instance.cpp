#include "joinforge/instance.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "joinforge/error.hpp"

namespace joinforge {

using nlohmann::json;

Regime Regime::parse(std::string_view text) {
  if (text == "general") return {RegimeKind::general, 0.0};
  if (text == "binary_optimal" || text == "binary-optimal") return {RegimeKind::binary_optimal, 0.0};
  if (text == "inductive") return {RegimeKind::inductive, 0.0};
  constexpr std::string_view kExplicit = "explicit=";
  if (text.substr(0, kExplicit.size()) == kExplicit) {
    const std::string number(text.substr(kExplicit.size()));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size() || !(value >= 0.0) || !std::isfinite(value)) {
      throw UsageError("explicit regime needs a nonnegative constant, got \"" + number + "\"");
    }
    return {RegimeKind::explicit_value, value};
  }
  throw UsageError("unknown regime \"" + std::string(text) + "\"");
}

std::string Regime::name() const {
  switch (kind) {
    case RegimeKind::general: return "general";
    case RegimeKind::binary_optimal: return "binary_optimal";
    case RegimeKind::inductive: return "inductive";
    case RegimeKind::explicit_value: return "explicit";
  }
  return "general";
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

int int_field(const json& doc, const char* name) {
  if (!doc.contains(name)) field_error(name, "missing");
  const json& v = doc.at(name);
  if (!v.is_number_integer()) field_error(name, "expected an integer");
  return v.get<int>();
}

double number_value(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Vertex vertex_from_json(const json& value, const std::string& field) {
  if (value.is_string()) {
    try {
      return Vertex::parse(value.get<std::string>());
    } catch (const ConfigError& e) {
      field_error(field, e.what());
    }
  }
  if (!value.is_array()) field_error(field, "expected a symbol list or dotted string");
  std::vector<Symbol> word;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const json& s = value[i];
    if (!s.is_number_integer() || s.get<int>() < 1) {
      field_error(field + "[" + std::to_string(i) + "]", "expected a positive integer symbol");
    }
    word.push_back(s.get<int>());
  }
  return Vertex(std::move(word));
}

json vertex_to_json(const Vertex& v) {
  json out = json::array();
  for (Symbol s : v.word()) out.push_back(s);
  return out;
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("instance must be a JSON object");
  const int m = int_field(doc, "m");
  const int k = int_field(doc, "k");
  std::optional<TreeParams> tree;
  try {
    tree.emplace(m, k);
  } catch (const ConfigError& e) {
    field_error("m/k", e.what());
  }

  Vertex base;
  if (doc.contains("base")) base = vertex_from_json(doc.at("base"), "base");
  try {
    tree->require(base);
  } catch (const ConfigError& e) {
    field_error("base", e.what());
  }

  if (!doc.contains("config")) field_error("config", "missing");
  const json& cfg = doc.at("config");
  if (!cfg.is_array()) field_error("config", "expected a list of particles");
  std::vector<Vertex> particles;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    particles.push_back(vertex_from_json(cfg[i], "config[" + std::to_string(i) + "]"));
  }
  std::optional<Configuration> config;
  try {
    config.emplace(*tree, base, std::move(particles));
  } catch (const ConfigError& e) {
    field_error("config", e.what());
  }

  std::vector<double> weights(tree->leaf_count(), 1.0);
  if (doc.contains("mu")) {
    const json& mu = doc.at("mu");
    if (!mu.is_object()) field_error("mu", "expected an object mapping leaves to weights");
    for (const auto& [key, value] : mu.items()) {
      const std::string field = "mu[\"" + key + "\"]";
      Vertex leaf;
      try {
        leaf = Vertex::parse(key);
        tree->require(leaf);
      } catch (const ConfigError& e) {
        field_error(field, e.what());
      }
      if (!tree->is_leaf(leaf)) field_error(field, "not a free vertex");
      const double w = number_value(value, field);
      if (!(w >= 0.0) || !std::isfinite(w)) field_error(field, "weight must be finite and >= 0");
      weights[tree->position(leaf)] = w;
    }
  }

  std::map<Vertex, double> fvalues;
  if (doc.contains("f")) {
    const json& f = doc.at("f");
    if (!f.is_object()) field_error("f", "expected an object mapping vertices to values");
    for (const auto& [key, value] : f.items()) {
      const std::string field = "f[\"" + key + "\"]";
      Vertex v;
      try {
        v = Vertex::parse(key);
        tree->require(v);
      } catch (const ConfigError& e) {
        field_error(field, e.what());
      }
      const double x = number_value(value, field);
      if (!(x > 0.0) || !std::isfinite(x)) field_error(field, "value must be finite and > 0");
      fvalues[v] = x;
    }
  }

  std::vector<double> p;
  if (doc.contains("p")) {
    const json& pj = doc.at("p");
    if (!pj.is_array()) field_error("p", "expected a list of exponents");
    for (std::size_t i = 0; i < pj.size(); ++i) p.push_back(number_value(pj[i], "p[" + std::to_string(i) + "]"));
  }

  std::vector<int> slots;
  if (doc.contains("slot_assignment") && !doc.at("slot_assignment").is_null()) {
    const json& sa = doc.at("slot_assignment");
    if (!sa.is_object()) field_error("slot_assignment", "expected an object slot-id -> index");
    slots.assign(sa.size(), -1);
    for (const auto& [key, value] : sa.items()) {
      const std::string field = "slot_assignment[\"" + key + "\"]";
      int slot = -1;
      const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), slot);
      if (ec != std::errc() || end != key.data() + key.size() || slot < 0 ||
          static_cast<std::size_t>(slot) >= slots.size()) {
        field_error(field, "slot ids must be 0.." + std::to_string(slots.size() - 1));
      }
      if (!value.is_number_integer()) field_error(field, "expected an integer index into p");
      slots[static_cast<std::size_t>(slot)] = value.get<int>();
    }
  }

  Regime regime;
  if (doc.contains("regime")) {
    if (!doc.at("regime").is_string()) field_error("regime", "expected a string");
    std::string name = doc.at("regime").get<std::string>();
    if ((name == "explicit") && doc.contains("K")) {
      name += "=" + doc.at("K").dump();
    }
    try {
      regime = Regime::parse(name);
    } catch (const UsageError& e) {
      field_error("regime", e.what());
    }
  }

  std::optional<std::uint64_t> seed;
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    if (!doc.at("seed").is_number_unsigned()) field_error("seed", "expected a nonnegative integer");
    seed = doc.at("seed").get<std::uint64_t>();
  }

  return Instance{*config,
                  WeightAssignment(*tree, std::move(weights)),
                  LevelFunction::from_map(*tree, fvalues, 1.0),
                  std::move(p),
                  std::move(slots),
                  regime,
                  seed};
}

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": malformed JSON");
  }
  return instance_from_json(doc);
}

json instance_to_json(const Instance& instance) {
  const TreeParams& tree = instance.tree();
  json out;
  out["m"] = tree.arity();
  out["k"] = tree.depth();
  out["base"] = vertex_to_json(instance.base());
  json config = json::array();
  for (const Vertex& v : instance.config.particles()) config.push_back(vertex_to_json(v));
  out["config"] = std::move(config);
  json mu = json::object();
  for (std::uint64_t pos = 0; pos < tree.leaf_count(); ++pos) {
    mu[tree.vertex_at(tree.depth(), pos).to_string()] = instance.mu.at(pos);
  }
  out["mu"] = std::move(mu);
  json f = json::object();
  for (int level = 0; level <= tree.depth(); ++level) {
    for (std::uint64_t pos = 0; pos < tree.level_size(level); ++pos) {
      f[tree.vertex_at(level, pos).to_string()] = instance.f.at(level, pos);
    }
  }
  out["f"] = std::move(f);
  out["p"] = instance.p;
  if (!instance.slot_assignment.empty()) {
    json sa = json::object();
    for (std::size_t i = 0; i < instance.slot_assignment.size(); ++i) {
      sa[std::to_string(i)] = instance.slot_assignment[i];
    }
    out["slot_assignment"] = std::move(sa);
  }
  out["regime"] = instance.regime.name();
  if (instance.regime.kind == RegimeKind::explicit_value) out["K"] = instance.regime.value;
  if (instance.seed) out["seed"] = *instance.seed;
  return out;
}

}  // namespace joinforge
