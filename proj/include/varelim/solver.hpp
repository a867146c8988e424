#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "varelim/instance.hpp"
#include "varelim/trace.hpp"

namespace varelim {

struct SearchConfig {
    std::uint64_t initial_budget = 100; ///< backtracks allowed before the first restart
    double factor = 1.1;                ///< budget growth per restart
    double time_limit = 0;              ///< seconds; 0 means none
    /// 0 breaks dom/wdeg ties by variable index; other values break them
    /// pseudo-randomly from this seed.
    std::uint64_t seed = 0;
};

enum class Verdict { sat, unsat, timeout };

std::string_view verdict_name(Verdict v);

struct SearchResult {
    Verdict verdict = Verdict::unsat;
    std::optional<Solution> solution;
    std::uint64_t backtracks = 0;
    /// Budget of every run, restart 0 first.
    std::vector<std::uint64_t> budgets;
};

/// floor(initial * factor^k), exact for factors with at most three decimals.
/// \throws PreconditionError if initial < 1 or factor <= 1.
std::uint64_t restart_budget(std::uint64_t initial, double factor, std::uint64_t k);

/// Binary-branching MAC over the active variables with dom/wdeg and
/// geometric restarts; constraint weights persist across restarts.
/// With `log`, writes `restart <k> <budget>` per run, then
/// `backtracks <count>` and `verdict <sat|unsat|timeout>`.
/// \throws PreconditionError on an invalid config.
SearchResult mac_solve(const Instance& inst, const SearchConfig& cfg = {}, std::ostream* log = nullptr);

/// Extends a solution of the reduced instance to the variables eliminated
/// in `trace`, processing records in reverse.
/// \throws ReconstructionError if an extension step fails or the result is
///         not a solution of `original`.
Solution reconstruct_solution(const Instance& original, const EliminationTrace& trace, const Solution& reduced);

struct PreprocessResult {
    bool sat = true;
    Instance reduced;
    EliminationTrace trace; ///< AC deletions, singleton and rule eliminations
    std::size_t ac_deletions = 0;
    double time_ac = 0; ///< seconds, AC and singleton rounds
    double time_elim = 0;
};

/// AC and singleton elimination repeated until no singleton remains, then
/// the rule's engine (or, with `with_ns`, the naive fixpoint interleaved
/// with neighbourhood substitution).
PreprocessResult preprocess(const Instance& inst, std::optional<Rule> rule, bool with_ns = false);

struct PipelineResult {
    Verdict verdict = Verdict::unsat;
    std::optional<Solution> solution; ///< of the original instance
    Instance reduced;
    EliminationTrace trace;
    std::size_t ac_deletions = 0;
    std::uint64_t backtracks = 0;
    double time_preprocess = 0; ///< seconds
    double time_search = 0;
};

/// AC, singleton elimination, the rule's engine, MAC on what remains, then
/// reconstruction. Without a rule the engine stage is skipped.
PipelineResult solve_with_preprocessing(const Instance& inst, std::optional<Rule> rule, const SearchConfig& cfg = {},
                                        std::ostream* log = nullptr);

} // namespace varelim
