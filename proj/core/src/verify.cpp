#include "joinforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "joinforge/error.hpp"
#include "joinforge/rng.hpp"

namespace joinforge {

using nlohmann::json;

namespace {

json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

void add_flag(std::vector<std::string>& flags, const std::string& flag) {
  if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.push_back(flag);
}

double ratio_of(double lhs, double log_rhs) {
  const double rhs = std::exp(log_rhs);
  if (lhs == 0.0 && rhs == 0.0) return 1.0;
  if (log_rhs == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  if (lhs == 0.0) return 0.0;
  return std::exp(std::log(lhs) - log_rhs);
}

Vertex leftmost(int level) { return Vertex(std::vector<Symbol>(static_cast<std::size_t>(level), 1)); }

}  // namespace

bool Report::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

json report_to_json(const Report& report) {
  json out;
  out["lhs"] = number_to_json(report.lhs);
  out["rhs"] = number_to_json(report.rhs);
  out["K"] = number_to_json(report.K);
  out["ratio"] = number_to_json(report.ratio);
  out["pass"] = report.pass;
  out["tolerance"] = report.tolerance;
  out["flags"] = report.flags;
  out["regime"] = report.regime;
  out["method"] = report.method;
  out["shape"] = report.shape;
  out["join_levels"] = report.join_levels;
  out["seed"] = report.seed ? json(*report.seed) : json(nullptr);
  out["error"] = report.error;
  return out;
}

Report report_from_json(const json& doc) {
  Report r;
  try {
    r.lhs = number_from_json(doc.at("lhs"));
    r.rhs = number_from_json(doc.at("rhs"));
    r.K = number_from_json(doc.at("K"));
    r.ratio = number_from_json(doc.at("ratio"));
    r.pass = doc.at("pass").get<bool>();
    r.tolerance = doc.at("tolerance").get<double>();
    r.flags = doc.at("flags").get<std::vector<std::string>>();
    r.regime = doc.at("regime").get<std::string>();
    r.method = doc.at("method").get<std::string>();
    r.shape = doc.at("shape").get<std::string>();
    r.join_levels = doc.at("join_levels").get<std::vector<int>>();
    if (doc.contains("seed") && !doc.at("seed").is_null()) r.seed = doc.at("seed").get<std::uint64_t>();
    r.error = doc.value("error", std::string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

ChosenConstant choose_constant(const JoinShape& shape, const ExponentAssignment& pa, const Regime& regime) {
  ChosenConstant out;
  switch (regime.kind) {
    case RegimeKind::general:
      out.value = k_general(shape).value;
      break;
    case RegimeKind::binary_optimal: {
      const BinaryConstant k = k_binary(shape, pa);
      out.value = k.value;
      if (!k.condition_met) out.flags.push_back(flags::kBinaryConditionFailed);
      if (k.top_condition_met && !k.deep_condition_met) out.flags.push_back(flags::kBinaryConditionDeepFailure);
      break;
    }
    case RegimeKind::inductive: {
      const InductiveConstant k = k_inductive(shape, pa);
      out.value = k.value;
      if (k.estimated) out.flags.push_back(flags::kEstimatedK);
      break;
    }
    case RegimeKind::explicit_value:
      out.value = regime.value;
      break;
  }
  return out;
}

Report check_inequality(const Instance& instance, const CheckOptions& options) {
  Report r;
  r.tolerance = options.tolerance;
  r.regime = instance.regime.name();
  r.method = to_string(options.method);
  r.seed = instance.seed;
  const JoinShape shape = extract_shape(instance.config);
  r.shape = shape.serialize();
  r.join_levels = shape.join_levels();

  ExponentAssignment pa;
  ChosenConstant K;
  try {
    pa = instance.exponents();
    if (auto violation = validate_exponents(shape, pa)) throw ValidationError(violation->message);
    K = choose_constant(shape, pa, instance.regime);
  } catch (const ValidationError& e) {
    r.error = e.what();
    add_flag(r.flags, flags::kInvalidExponents);
    r.pass = false;
    return r;
  } catch (const UsageError& e) {
    r.error = e.what();
    r.pass = false;
    return r;
  }
  r.K = K.value;
  for (const auto& flag : K.flags) add_flag(r.flags, flag);

  if (options.method == EnergyMethod::bruteforce) {
    try {
      r.lhs = orbit_energy_bruteforce(instance.config, instance.mu, instance.f,
                                      {options.guard, options.summation})
                  .value;
    } catch (const GuardExceeded&) {
      add_flag(r.flags, flags::kEnumerationGuard);
      r.method = to_string(EnergyMethod::factorized);
      r.lhs = orbit_energy_factorized(instance.config, instance.mu, instance.f).value;
    }
  } else {
    r.lhs = orbit_energy_factorized(instance.config, instance.mu, instance.f).value;
  }

  const CylinderMassTable masses = cylinder_masses(instance.tree(), instance.mu);
  const double log_rhs = log_rhs_product(shape, instance.base(), masses, instance.f, pa, r.K);
  r.rhs = std::exp(log_rhs);
  r.ratio = ratio_of(r.lhs, log_rhs);
  r.pass = r.ratio <= 1.0 + options.tolerance;
  return r;
}

EqualityReport check_equality_case(const TreeParams& tree, const JoinShape& shape,
                                   const ExponentAssignment& pa, std::uint64_t seed, double tolerance) {
  EqualityReport out;
  if (tree.arity() != 2) {
    out.skipped = true;
    out.reason = "equality case needs a binary tree";
    return out;
  }
  if (auto violation = validate_exponents(shape, pa)) {
    out.skipped = true;
    out.reason = violation->message;
    return out;
  }
  if (!k_binary(shape, pa).condition_met) {
    out.skipped = true;
    out.reason = "exponents fail the half-sum condition at some join point";
    return out;
  }

  Rng rng(seed);
  const double weight = rng.log_uniform(1e-2, 1e2);
  std::vector<double> level_values(static_cast<std::size_t>(tree.depth()) + 1);
  for (double& v : level_values) v = rng.log_uniform(1e-1, 1e1);
  std::vector<double> f(tree.vertex_count());
  for (int level = 0; level <= tree.depth(); ++level) {
    for (std::uint64_t pos = 0; pos < tree.level_size(level); ++pos) {
      f[tree.level_offset(level) + pos] = level_values[static_cast<std::size_t>(level)];
    }
  }

  const Vertex base = leftmost(shape.base_level());
  Instance instance{realize(tree, base, shape),
                    WeightAssignment::uniform(tree, weight),
                    LevelFunction(tree, std::move(f)),
                    pa.exponents,
                    {},
                    Regime{RegimeKind::binary_optimal, 0.0},
                    seed};
  CheckOptions options;
  options.tolerance = tolerance;
  if (orbit_size_saturating(shape) <= 100'000) options.method = EnergyMethod::bruteforce;
  out.report = check_inequality(instance, options);
  out.equality = out.report.error.empty() && std::fabs(out.report.ratio - 1.0) <= tolerance;
  return out;
}

ExampleReproduction reproduce_example() {
  const TreeParams tree(2, 3);
  const Configuration config(tree, Vertex::root(), {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 1, 2}});
  ExampleReproduction out;
  out.orbit_size = orbit_size(config);
  out.joins = join_multiset(config);

  const std::vector<double> p{3.0, 3.0, 3.0};
  out.displayed_constant = 8.0 * std::pow(8.0, 1.0 / p[0]) * std::pow(4.0, 1.0 / p[1]) * std::pow(2.0, 1.0 / p[2]);

  auto run = [&](double K) {
    Instance instance{config, WeightAssignment::uniform(tree, 1.0), LevelFunction::constant(tree, 1.0),
                      p, {}, Regime{RegimeKind::explicit_value, K}, std::nullopt};
    CheckOptions options;
    options.method = EnergyMethod::bruteforce;
    return check_inequality(instance, options);
  };
  out.displayed_constant_run = run(out.displayed_constant);
  out.optimal_run = run(0.125);
  out.displayed_constant_tight = std::fabs(out.displayed_constant_run.ratio - 1.0) <= kDefaultRelativeTolerance;
  out.optimal_tight = std::fabs(out.optimal_run.ratio - 1.0) <= kDefaultRelativeTolerance;

  const WeightAssignment mu = WeightAssignment::uniform(tree, 1.0);
  const LevelFunction f = LevelFunction::constant(tree, 1.0);
  out.bruteforce_lhs = orbit_energy_bruteforce(config, mu, f).value;
  out.factorized_lhs = orbit_energy_factorized(config, mu, f).value;
  return out;
}

json example_to_json(const ExampleReproduction& example) {
  json joins = json::array();
  for (const auto& [vertex, multiplicity] : example.joins) {
    joins.push_back({{"vertex", vertex.to_string()}, {"level", vertex.level()}, {"multiplicity", multiplicity}});
  }
  json out;
  out["orbit_size"] = example.orbit_size;
  out["join_points"] = std::move(joins);
  out["lhs_bruteforce"] = example.bruteforce_lhs;
  out["lhs_factorized"] = example.factorized_lhs;
  out["displayed_constant"] = {{"K", example.displayed_constant},
                               {"tight", example.displayed_constant_tight},
                               {"report", report_to_json(example.displayed_constant_run)}};
  out["optimal_constant"] = {{"K", 0.125},
                             {"tight", example.optimal_tight},
                             {"report", report_to_json(example.optimal_run)}};
  out["tight_constant"] = example.optimal_tight ? (example.displayed_constant_tight ? "both" : "optimal")
                                                : (example.displayed_constant_tight ? "displayed" : "none");
  return out;
}

Instance random_instance(std::uint64_t seed, const RandomRanges& ranges) {
  if (ranges.particles_min < 2 || ranges.particles_max < ranges.particles_min) {
    throw UsageError("particle range must satisfy 2 <= n_min <= n_max");
  }
  std::vector<TreeParams> feasible;
  for (int m : ranges.arities) {
    for (int k = ranges.depth_min; k <= ranges.depth_max; ++k) {
      const TreeParams tree(m, k);
      if (tree.leaf_count() >= static_cast<std::uint64_t>(ranges.particles_min)) feasible.push_back(tree);
    }
  }
  if (feasible.empty()) {
    throw UsageError("no tree in range holds " + std::to_string(ranges.particles_min) + " distinct leaves");
  }

  Rng rng(seed);
  const TreeParams& tree = feasible[rng.integer(0, feasible.size() - 1)];
  const int k = tree.depth();

  Vertex base;
  if (rng.bernoulli(ranges.base_probability)) {
    std::vector<int> levels;
    for (int level = 1; level < k; ++level) {
      if (tree.level_size(k - level) >= static_cast<std::uint64_t>(ranges.particles_min)) levels.push_back(level);
    }
    if (!levels.empty()) {
      const int level = levels[rng.integer(0, levels.size() - 1)];
      base = tree.vertex_at(level, rng.integer(0, tree.level_size(level) - 1));
    }
  }

  const std::uint64_t capacity = tree.level_size(k - base.level());
  const auto n_max = std::min<std::uint64_t>(static_cast<std::uint64_t>(ranges.particles_max), capacity);
  const auto n = static_cast<std::size_t>(rng.integer(static_cast<std::uint64_t>(ranges.particles_min), n_max));

  const auto [begin, end] = tree.descendant_range(base, k);
  std::set<std::uint64_t> taken;
  std::vector<Vertex> particles;
  while (particles.size() < n) {
    const std::uint64_t pos = rng.integer(begin, end - 1);
    if (!taken.insert(pos).second) continue;
    particles.push_back(tree.vertex_at(k, pos));
  }

  std::vector<double> weights(tree.leaf_count());
  for (double& w : weights) {
    const bool zero = rng.bernoulli(ranges.zero_weight_probability);
    const double draw = rng.log_uniform(ranges.weight_min, ranges.weight_max);
    w = zero ? 0.0 : draw;
  }
  std::vector<double> f(tree.vertex_count());
  for (double& v : f) v = rng.log_uniform(ranges.f_min, ranges.f_max);

  // Reciprocals uniform on the simplex, then inverted.
  std::vector<double> p(n - 1);
  double total = 0.0;
  for (double& e : p) {
    e = rng.exponential();
    total += e;
  }
  for (double& e : p) e = total / e;

  return Instance{Configuration(tree, base, std::move(particles)),
                  WeightAssignment(tree, std::move(weights)),
                  LevelFunction(tree, std::move(f)),
                  std::move(p),
                  {},
                  ranges.regime,
                  seed};
}

CampaignSummary fuzz_campaign(const CampaignSpec& spec) {
  if (spec.seed_end < spec.seed_begin) throw UsageError("seed range is empty or reversed");
  const std::uint64_t count = spec.seed_end - spec.seed_begin;
  std::vector<CampaignRecord> records(static_cast<std::size_t>(count));

  auto evaluate = [&](std::size_t i) {
    CampaignRecord& rec = records[i];
    rec.seed = spec.seed_begin + i;
    const Instance instance = random_instance(rec.seed, spec.ranges);
    if (spec.require_binary_condition) {
      const JoinShape shape = extract_shape(instance.config);
      bool met = false;
      if (instance.tree().arity() == 2) {
        try {
          met = k_binary(shape, instance.exponents()).condition_met;
        } catch (const ValidationError&) {
          met = false;
        }
      }
      if (!met) {
        rec.skipped = true;
        return;
      }
    }
    rec.report = check_inequality(instance, spec.check);
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) evaluate(i);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < records.size(); i += static_cast<std::size_t>(jobs)) {
          evaluate(i);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  CampaignSummary summary;
  summary.instances = count;
  std::vector<double> ratios;
  for (const CampaignRecord& rec : records) {
    if (rec.skipped) {
      ++summary.skipped;
      continue;
    }
    ++summary.evaluated;
    ratios.push_back(rec.report.ratio);
    for (const std::string& flag : rec.report.flags) ++summary.flag_counts[flag];
    if (!rec.report.pass) {
      summary.failures.push_back(
          {rec.seed, rec.report, instance_to_json(random_instance(rec.seed, spec.ranges))});
    }
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    summary.min_ratio = ratios.front();
    summary.max_ratio = ratios.back();
    const std::size_t mid = ratios.size() / 2;
    summary.median_ratio = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  }
  summary.records = std::move(records);
  return summary;
}

json summary_to_json(const CampaignSummary& summary) {
  json failures = json::array();
  for (const CampaignFailure& f : summary.failures) {
    failures.push_back({{"seed", f.seed}, {"report", report_to_json(f.report)}, {"instance", f.instance}});
  }
  json out;
  out["instances"] = summary.instances;
  out["evaluated"] = summary.evaluated;
  out["skipped"] = summary.skipped;
  out["violations"] = summary.failures.size();
  out["min_ratio"] = number_to_json(summary.min_ratio);
  out["median_ratio"] = number_to_json(summary.median_ratio);
  out["max_ratio"] = number_to_json(summary.max_ratio);
  out["flag_counts"] = summary.flag_counts;
  out["failures"] = std::move(failures);
  return out;
}

std::string summary_to_csv(const CampaignSummary& summary) {
  std::ostringstream out;
  out.precision(17);
  out << "seed,ratio,pass,skipped\n";
  for (const CampaignRecord& rec : summary.records) {
    out << rec.seed << ',';
    if (!rec.skipped) out << rec.report.ratio;
    out << ',' << (rec.skipped ? "" : (rec.report.pass ? "true" : "false")) << ','
        << (rec.skipped ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace joinforge
