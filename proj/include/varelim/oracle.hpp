#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "varelim/instance.hpp"
#include "varelim/trace.hpp"

namespace varelim {

struct GeneratorConfig {
    std::size_t n = 6;
    std::size_t d = 3;
    double p1 = 0.5; ///< probability that a pair is constrained
    double p2 = 0.5; ///< probability that a tuple of a constrained pair is forbidden
    std::uint64_t seed = 1;
};

/// Uniform random binary CSP. Values are labelled 0..d-1.
Instance random_instance(const GeneratorConfig& cfg);

/// Random tree-structured instance (constraint graph is a random tree).
Instance random_tree_instance(std::size_t n, std::size_t d, double p2, std::uint64_t seed);

/// Generator settings for battery seed `seed`: n in [4,9], d in [2,4],
/// p1 = 0.5, p2 in {0.3, 0.5, 0.7}, cycling through every combination.
GeneratorConfig battery_config(std::uint64_t seed);

struct BatteryCase {
    GeneratorConfig config;
    Instance instance; ///< arc consistent
};

/// The first `count` battery instances that survive arc consistency, in
/// seed order from `first_seed`. With `fixed`, every seed uses its n, d, p1
/// and p2 instead of battery_config.
/// \throws PreconditionError if a fixed config wipes out for 1000 seeds in a row.
std::vector<BatteryCase> ac_battery(std::size_t count, std::uint64_t first_seed = 1,
                                    const std::optional<GeneratorConfig>& fixed = std::nullopt);

/// Limit on the product of active domain sizes for exhaustive search.
inline constexpr double kBruteForceLimit = 1e7;

/// \throws SizeGuardError when the search space exceeds kBruteForceLimit.
std::optional<Solution> brute_force_solve(const Instance& inst);
/// \throws SizeGuardError
std::uint64_t count_solutions(const Instance& inst);

struct FixpointResult {
    Instance instance;
    EliminationTrace trace;
};

/// Scans active variables in ascending order and eliminates the first one
/// accepted by the rule's checker, until none is.
/// \throws PreconditionError if `inst` is not arc consistent.
FixpointResult naive_fixpoint(const Instance& inst, Rule rule);

/// As naive_fixpoint, with a neighbourhood-substitution fixpoint applied
/// before the first scan and after every elimination.
FixpointResult naive_fixpoint_ns(const Instance& inst, Rule rule);

/// Exhaustive search for variable and value bijections preserving
/// compatibility between active variables and live values.
/// \throws SizeGuardError when either instance has more than 7 active variables.
bool are_isomorphic(const Instance& a, const Instance& b);

/// Largest number of eliminations over every sequence of rule-valid
/// eliminations. With `with_ns`, NS runs first and after each elimination.
/// \throws SizeGuardError above 7 active variables.
std::size_t max_eliminations_by_order(const Instance& inst, Rule rule, bool with_ns = false);

} // namespace varelim
