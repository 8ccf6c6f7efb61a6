#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "joinforge/bounds.hpp"
#include "joinforge/energy.hpp"
#include "joinforge/error.hpp"
#include "joinforge/instance.hpp"
#include "joinforge/muirhead.hpp"
#include "joinforge/orbit.hpp"
#include "joinforge/verify.hpp"

namespace joinforge::cli {

using nlohmann::json;

namespace {

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read instance file '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  try {
    return parse_instance(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json joins_to_json(const JoinMultiset& joins) {
  json out = json::array();
  for (const auto& [vertex, multiplicity] : joins) {
    out.push_back({{"vertex", vertex.to_string()}, {"level", vertex.level()}, {"multiplicity", multiplicity}});
  }
  return out;
}

json closed_form_to_json(const MuirheadClosedForm& c) {
  json out{{"case", to_string(c.which)}};
  if (c.exact) {
    out["value"] = c.value;
  } else {
    out["lower"] = c.lower;
    out["upper"] = c.upper;
  }
  return out;
}

// "A..B" with B exclusive.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("--seeds expects A..B, got \"" + text + "\"");
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || end != part.data() + part.size() || part.empty()) {
      throw UsageError("--seeds expects nonnegative integers, got \"" + text + "\"");
    }
    return v;
  };
  const std::string_view view(text);
  const std::uint64_t a = number(view.substr(0, dots));
  const std::uint64_t b = number(view.substr(dots + 2));
  if (b < a) throw UsageError("--seeds range " + text + " is reversed");
  return {a, b};
}

std::pair<int, int> min_max(const std::vector<int>& values, const char* flag) {
  if (values.size() == 1) return {values[0], values[0]};
  if (values.size() == 2 && values[0] <= values[1]) return {values[0], values[1]};
  throw UsageError(std::string(flag) + " expects one value or MIN MAX");
}

struct Invocation {
  std::ostream& out;
  std::ostream& err;
  bool tty;
  std::uint64_t guard;

  void emit(const json& doc) const { out << doc.dump() << '\n'; }
  void summary(const std::string& line) const {
    if (tty) err << line << '\n';
  }
};

int cmd_join_set(const Invocation& io, const std::string& file) {
  const Instance inst = load_instance(file);
  const JoinMultiset joins = join_multiset(inst.config);
  int total = 0;
  for (const auto& [v, r] : joins) total += r;
  io.emit({{"join_points", joins_to_json(joins)}, {"total_multiplicity", total}});
  io.summary(std::to_string(joins.size()) + " join points, total multiplicity " + std::to_string(total));
  return kPass;
}

int cmd_orbit(const Invocation& io, const std::string& action, const std::string& file) {
  const Instance inst = load_instance(file);
  const JoinShape shape = extract_shape(inst.config);
  if (action == "size") {
    const std::uint64_t size = orbit_size(shape);
    io.emit({{"orbit_size", size}, {"shape", shape.serialize()}});
    io.summary("orbit size " + std::to_string(size));
    return kPass;
  }
  json members = json::array();
  orbit_enumerate(
      inst.config,
      [&](const Configuration& c) {
        json tuple = json::array();
        for (const Vertex& v : c.particles()) tuple.push_back(vertex_to_json(v));
        members.push_back(std::move(tuple));
      },
      io.guard);
  const std::size_t count = members.size();
  io.emit({{"count", count}, {"members", std::move(members)}, {"shape", shape.serialize()}});
  io.summary("enumerated " + std::to_string(count) + " orbit members");
  return kPass;
}

int cmd_energy(const Invocation& io, const std::string& file, const std::string& method, bool pairwise) {
  const Instance inst = load_instance(file);
  EnergyResult r;
  if (method == "brute") {
    BruteforceOptions options;
    options.guard = io.guard;
    options.summation = pairwise ? Summation::pairwise : Summation::naive;
    r = orbit_energy_bruteforce(inst.config, inst.mu, inst.f, options);
  } else {
    r = orbit_energy_factorized(inst.config, inst.mu, inst.f);
  }
  io.emit({{"energy", r.value}, {"method", to_string(r.method)}, {"terms", r.terms}});
  io.summary(std::string("energy ") + to_string(r.method) + " = " + json(r.value).dump());
  return kPass;
}

int cmd_bound(const Invocation& io, const std::string& file, const std::optional<std::string>& regime_text) {
  const Instance inst = load_instance(file);
  const Regime regime = regime_text ? Regime::parse(*regime_text) : inst.regime;
  const JoinShape shape = extract_shape(inst.config);
  const ExponentAssignment pa = inst.exponents();
  if (auto violation = validate_exponents(shape, pa)) {
    io.emit({{"error", violation->message}, {"residual", violation->residual}});
    io.err << "invalid exponents: " << violation->message << '\n';
    return kViolation;
  }
  const ChosenConstant K = choose_constant(shape, pa, regime);
  const CylinderMassTable masses = cylinder_masses(inst.tree(), inst.mu);
  const double log_rhs = log_rhs_product(shape, inst.base(), masses, inst.f, pa, K.value);
  json doc{{"K", K.value},
           {"flags", K.flags},
           {"join_levels", shape.join_levels()},
           {"log_rhs", std::isfinite(log_rhs) ? json(log_rhs) : json("-inf")},
           {"regime", regime.name()},
           {"rhs", std::exp(log_rhs)},
           {"shape", shape.serialize()}};
  if (regime.kind == RegimeKind::inductive) {
    const InductiveConstant k = k_inductive(shape, pa);
    json ledger = json::array();
    for (const InductiveStep& step : k.ledger) {
      ledger.push_back({{"node", step.node},
                        {"level", step.level},
                        {"branches", step.branches},
                        {"branch_coexponents", step.branch_coexponents},
                        {"inherited_coexponent", step.inherited_coexponent},
                        {"beta_coexponent", step.beta_coexponent},
                        {"muirhead_exponents", step.muirhead_exponents},
                        {"muirhead_case", to_string(step.muirhead_case)},
                        {"muirhead_value", step.muirhead_value},
                        {"estimated", step.estimated},
                        {"factor", step.factor},
                        {"certified_factor", step.certified_factor}});
    }
    doc["ledger"] = std::move(ledger);
    doc["certified_upper"] = k.certified_upper;
  }
  io.emit(doc);
  io.summary("K = " + json(K.value).dump() + ", rhs = " + json(std::exp(log_rhs)).dump());
  return kPass;
}

int cmd_kconst(const Invocation& io, int m, const std::vector<double>& a, std::optional<int> numeric) {
  if (static_cast<int>(a.size()) != m) {
    throw UsageError("--a needs " + std::to_string(m) + " values, got " + std::to_string(a.size()));
  }
  const MuirheadSpec spec(a);
  json doc = closed_form_to_json(muirhead_closed_form(spec));
  if (numeric) {
    const MuirheadEstimate e = muirhead_numeric(spec, *numeric);
    doc["numeric"] = {{"value", e.value},
                      {"uncertainty", e.uncertainty},
                      {"argmax", e.argmax},
                      {"resolution", e.resolution},
                      {"coarse", e.coarse}};
  }
  io.emit(doc);
  io.summary("case " + doc.at("case").get<std::string>());
  return kPass;
}

int cmd_verify(const Invocation& io, const std::string& file, const CheckOptions& options,
               const std::optional<std::string>& regime_text) {
  Instance inst = load_instance(file);
  if (regime_text) inst.regime = Regime::parse(*regime_text);
  const Report r = check_inequality(inst, options);
  io.emit(report_to_json(r));
  if (!r.error.empty()) io.err << "validation failed: " << r.error << '\n';
  io.summary(std::string(r.pass ? "PASS" : "FAIL") + " ratio " + json(r.ratio).dump() + " K " + json(r.K).dump());
  return r.pass ? kPass : kViolation;
}

int cmd_equality(const Invocation& io, const std::string& file, std::uint64_t seed, double tolerance) {
  const Instance inst = load_instance(file);
  const JoinShape shape = extract_shape(inst.config);
  const EqualityReport e = check_equality_case(inst.tree(), shape, inst.exponents(), seed, tolerance);
  json doc{{"equality", e.equality}, {"skipped", e.skipped}, {"reason", e.reason}};
  if (!e.skipped) doc["report"] = report_to_json(e.report);
  io.emit(doc);
  if (e.skipped) io.err << "equality case skipped: " << e.reason << '\n';
  io.summary(e.skipped ? "skipped" : (e.equality ? "equality holds" : "equality fails"));
  return e.equality ? kPass : kViolation;
}

int cmd_example(const Invocation& io) {
  const ExampleReproduction ex = reproduce_example();
  io.emit(example_to_json(ex));
  io.summary("orbit size " + std::to_string(ex.orbit_size) + "; displayed constant ratio " +
             json(ex.displayed_constant_run.ratio).dump() + ", K = 1/8 ratio " + json(ex.optimal_run.ratio).dump());
  return ex.displayed_constant_run.pass && ex.optimal_run.pass ? kPass : kViolation;
}

struct FuzzArgs {
  std::string seeds;
  std::vector<int> arities{2, 3};
  std::vector<int> depth{1, 4};
  std::vector<int> particles{2, 6};
  std::string regime = "general";
  int jobs = 1;
  std::string csv;
  bool binary_only = false;
  std::string method = "factorized";
};

int cmd_fuzz(const Invocation& io, const FuzzArgs& args) {
  CampaignSpec spec;
  std::tie(spec.seed_begin, spec.seed_end) = parse_seed_range(args.seeds);
  spec.ranges.arities = args.arities;
  std::tie(spec.ranges.depth_min, spec.ranges.depth_max) = min_max(args.depth, "--k");
  std::tie(spec.ranges.particles_min, spec.ranges.particles_max) = min_max(args.particles, "--n");
  spec.ranges.regime = Regime::parse(args.regime);
  spec.jobs = args.jobs;
  spec.require_binary_condition = args.binary_only;
  spec.check.guard = io.guard;
  spec.check.method = args.method == "brute" ? EnergyMethod::bruteforce : EnergyMethod::factorized;
  const CampaignSummary s = fuzz_campaign(spec);
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::binary);
    if (!csv) throw UsageError("cannot write '" + args.csv + "'");
    csv << summary_to_csv(s);
  }
  io.emit(summary_to_json(s));
  io.summary(std::to_string(s.evaluated) + " evaluated, " + std::to_string(s.failures.size()) +
             " violations, max ratio " + json(s.max_ratio).dump());
  return s.failures.empty() ? kPass : kViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool err_is_tty) {
  CLI::App app{"Orbit energies and Hölder-type bounds on m-ary trees", "joinforge"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::uint64_t guard = kDefaultEnumerationGuard;
  app.add_option("--guard", guard, "Largest orbit that may be enumerated")
      ->envname("JOINFORGE_GUARD")
      ->check(CLI::PositiveNumber);

  std::string file;
  auto add_file = [&](CLI::App* sub) { sub->add_option("file", file, "Instance JSON file")->required(); };

  CLI::App* join_set = app.add_subcommand("join-set", "Join points with multiplicity");
  add_file(join_set);

  CLI::App* orbit = app.add_subcommand("orbit", "Orbit size or members");
  std::string orbit_action;
  orbit->add_option("action", orbit_action, "size | enumerate")
      ->required()
      ->check(CLI::IsMember({"size", "enumerate"}));
  add_file(orbit);

  CLI::App* energy = app.add_subcommand("energy", "Orbit energy");
  add_file(energy);
  std::string method = "factorized";
  energy->add_option("--method", method, "brute | factorized")->check(CLI::IsMember({"brute", "factorized"}));
  bool pairwise = false;
  energy->add_flag("--pairwise", pairwise, "Pairwise summation for the brute-force sum");

  CLI::App* bound = app.add_subcommand("bound", "Constant and right-hand side");
  add_file(bound);
  std::optional<std::string> regime;
  bound->add_option("--regime", regime, "general | binary-optimal | inductive | explicit=V");

  CLI::App* kconst = app.add_subcommand("kconst", "Muirhead constant K(m; a)");
  int m = 0;
  std::vector<double> a;
  std::optional<int> numeric;
  kconst->add_option("--m", m, "Number of variables")->required()->check(CLI::Range(1, 64));
  kconst->add_option("--a", a, "Exponents a_1 .. a_m")->required()->expected(1, -1);
  kconst->add_option("--numeric", numeric, "Also run the grid estimate at this resolution (0 = default)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* verify = app.add_subcommand("verify", "Check the inequality on an instance");
  add_file(verify);
  CheckOptions check;
  std::string verify_method = "factorized";
  verify->add_option("--method", verify_method, "brute | factorized")->check(CLI::IsMember({"brute", "factorized"}));
  verify->add_option("--tolerance", check.tolerance, "Relative tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--regime", regime, "Override the instance regime");

  CLI::App* equality = app.add_subcommand("equality-check", "Equality at constant weights");
  add_file(equality);
  std::uint64_t seed = 0;
  double tolerance = kDefaultRelativeTolerance;
  equality->add_option("--seed", seed, "Seed for the weight and level values");
  equality->add_option("--tolerance", tolerance, "Relative tolerance")->check(CLI::NonNegativeNumber);

  CLI::App* example = app.add_subcommand("example", "Four-particle binary worked example");

  CLI::App* fuzz = app.add_subcommand("fuzz", "Seeded random campaign");
  FuzzArgs fuzz_args;
  fuzz->add_option("--seeds", fuzz_args.seeds, "Seed range A..B (B excluded)")->required();
  fuzz->add_option("--m", fuzz_args.arities, "Arities")->expected(1, -1)->check(CLI::Range(2, 16));
  fuzz->add_option("--k", fuzz_args.depth, "Depth or MIN MAX")->expected(1, 2);
  fuzz->add_option("--n", fuzz_args.particles, "Particle count or MIN MAX")->expected(1, 2);
  fuzz->add_option("--regime", fuzz_args.regime, "Constant regime");
  fuzz->add_option("--jobs", fuzz_args.jobs, "Worker threads")->check(CLI::Range(1, 256));
  fuzz->add_option("--csv", fuzz_args.csv, "Write per-seed ratios to this CSV file");
  fuzz->add_option("--method", fuzz_args.method, "brute | factorized")->check(CLI::IsMember({"brute", "factorized"}));
  fuzz->add_flag("--binary-condition-only", fuzz_args.binary_only, "Skip instances failing the half-sum condition");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "joinforge: " << e.what() << '\n';
    return kUsage;
  }

  const Invocation io{out, err, err_is_tty, guard};
  try {
    if (*join_set) return cmd_join_set(io, file);
    if (*orbit) return cmd_orbit(io, orbit_action, file);
    if (*energy) return cmd_energy(io, file, method, pairwise);
    if (*bound) return cmd_bound(io, file, regime);
    if (*kconst) return cmd_kconst(io, m, a, numeric);
    if (*verify) {
      check.method = verify_method == "brute" ? EnergyMethod::bruteforce : EnergyMethod::factorized;
      check.guard = guard;
      return cmd_verify(io, file, check, regime);
    }
    if (*equality) return cmd_equality(io, file, seed, tolerance);
    if (*example) return cmd_example(io);
    if (*fuzz) return cmd_fuzz(io, fuzz_args);
  } catch (const GuardExceeded& e) {
    err << "joinforge: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "joinforge: " << e.what() << '\n';
    return kViolation;
  } catch (const Error& e) {
    err << "joinforge: " << e.what() << '\n';
    return kUsage;
  } catch (const std::overflow_error& e) {
    err << "joinforge: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace joinforge::cli
