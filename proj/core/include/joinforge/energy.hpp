#pragma once

// Interaction values and orbit energies
//
//   E([I]_v) = sum over (i_1..i_n) in [I]_v of mu(i_1)...mu(i_n) F(i_1..i_n),
//
// evaluated either by enumerating the orbit or by recursing over the join
// shape, which never touches individual tuples.

#include <cstdint>

#include "joinforge/orbit.hpp"
#include "joinforge/tree.hpp"

namespace joinforge {

enum class EnergyMethod { bruteforce, factorized };
enum class Summation { naive, pairwise };

const char* to_string(EnergyMethod method);

struct EnergyResult {
  double value = 0.0;
  EnergyMethod method = EnergyMethod::factorized;
  std::uint64_t terms = 0;  // orbit size (saturated at UINT64_MAX)
};

// Product of f over the join multiset, one factor per unit of multiplicity.
// A single particle has F = 1.
double interaction_value(const LevelFunction& f, const Configuration& config);

struct BruteforceOptions {
  std::uint64_t guard = kDefaultEnumerationGuard;
  Summation summation = Summation::naive;
};

// Throws GuardExceeded when the orbit is larger than options.guard.
EnergyResult orbit_energy_bruteforce(const Configuration& config, const WeightAssignment& mu,
                                     const LevelFunction& f, const BruteforceOptions& options = {});

EnergyResult orbit_energy_factorized(const Configuration& config, const WeightAssignment& mu,
                                     const LevelFunction& f);

}  // namespace joinforge
