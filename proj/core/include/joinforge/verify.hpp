#pragma once

// Checking the bound on concrete instances: single checks, the symmetric
// equality case, the worked 4-particle binary example, seeded random
// instances and sharded fuzz campaigns.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "joinforge/energy.hpp"
#include "joinforge/instance.hpp"

namespace joinforge {

inline constexpr double kDefaultRelativeTolerance = 1e-9;

namespace flags {
inline constexpr const char* kEstimatedK = "estimated-k";
inline constexpr const char* kBinaryConditionFailed = "binary-condition-failed";
inline constexpr const char* kBinaryConditionDeepFailure = "binary-condition-deep-failure";
inline constexpr const char* kEnumerationGuard = "enumeration-guard";
inline constexpr const char* kInvalidExponents = "invalid-exponents";
}  // namespace flags

struct Report {
  double lhs = 0.0;
  double rhs = 0.0;
  double K = 0.0;
  double ratio = 1.0;  // lhs / rhs, 1 when both vanish
  bool pass = false;   // ratio <= 1 + tolerance
  double tolerance = kDefaultRelativeTolerance;
  std::vector<std::string> flags;
  std::string regime;
  std::string method;
  std::string shape;
  std::vector<int> join_levels;
  std::optional<std::uint64_t> seed;
  std::string error;  // validation failure, empty otherwise

  bool has_flag(const std::string& flag) const;
  bool operator==(const Report&) const = default;
};

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

struct CheckOptions {
  EnergyMethod method = EnergyMethod::factorized;
  double tolerance = kDefaultRelativeTolerance;
  std::uint64_t guard = kDefaultEnumerationGuard;
  Summation summation = Summation::naive;
};

// Constant chosen by the instance's regime, with any flags it raises.
struct ChosenConstant {
  double value = 0.0;
  std::vector<std::string> flags;
};

// Throws UsageError for the binary regime on a non-binary tree and
// ValidationError for invalid exponents.
ChosenConstant choose_constant(const JoinShape& shape, const ExponentAssignment& pa, const Regime& regime);

// Never throws on invalid exponents: the violation lands in report.error
// with pass = false.
Report check_inequality(const Instance& instance, const CheckOptions& options = {});

struct EqualityReport {
  Report report;
  bool skipped = false;
  std::string reason;
  bool equality = false;  // |ratio - 1| <= tolerance
};

// Builds the instance with constant leaf weight and level-constant f drawn
// from `seed`, regime binary_optimal, and checks that the bound is attained.
EqualityReport check_equality_case(const TreeParams& tree, const JoinShape& shape,
                                   const ExponentAssignment& pa, std::uint64_t seed = 0,
                                   double tolerance = kDefaultRelativeTolerance);

struct ExampleReproduction {
  std::uint64_t orbit_size = 0;
  JoinMultiset joins;
  double displayed_constant = 0.0;  // 8 * 8^(1/p1) * 4^(1/p2) * 2^(1/p3)
  Report displayed_constant_run;
  Report optimal_run;  // K = 1/8
  bool displayed_constant_tight = false;
  bool optimal_tight = false;
  double bruteforce_lhs = 0.0;
  double factorized_lhs = 0.0;
};

// Binary tree of depth 3, configuration (111, 121, 211, 212), unit weights,
// f = 1 and p = (3, 3, 3).
ExampleReproduction reproduce_example();
nlohmann::json example_to_json(const ExampleReproduction& example);

struct RandomRanges {
  std::vector<int> arities{2, 3};
  int depth_min = 1;
  int depth_max = 4;
  int particles_min = 2;
  int particles_max = 6;
  double base_probability = 0.25;  // chance of a non-root base
  double zero_weight_probability = 0.05;
  double weight_min = 1e-3;
  double weight_max = 1e3;
  double f_min = 1e-3;
  double f_max = 1e3;
  Regime regime{};
};

// Deterministic in `seed`. Throws UsageError when no (m, k) in range can
// hold particles_min distinct leaves.
Instance random_instance(std::uint64_t seed, const RandomRanges& ranges = {});

struct CampaignSpec {
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 0;  // exclusive
  RandomRanges ranges{};
  CheckOptions check{};
  int jobs = 1;
  // Skip instances whose exponents fail the binary half-sum condition.
  bool require_binary_condition = false;
};

struct CampaignRecord {
  std::uint64_t seed = 0;
  bool skipped = false;
  Report report;
};

struct CampaignFailure {
  std::uint64_t seed = 0;
  Report report;
  nlohmann::json instance;
};

struct CampaignSummary {
  std::uint64_t instances = 0;
  std::uint64_t evaluated = 0;
  std::uint64_t skipped = 0;
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  double max_ratio = 0.0;
  std::map<std::string, std::uint64_t> flag_counts;
  std::vector<CampaignFailure> failures;
  std::vector<CampaignRecord> records;  // sorted by seed
};

CampaignSummary fuzz_campaign(const CampaignSpec& spec);
nlohmann::json summary_to_json(const CampaignSummary& summary);
std::string summary_to_csv(const CampaignSummary& summary);

}  // namespace joinforge
