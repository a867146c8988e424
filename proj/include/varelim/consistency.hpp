#pragma once

#include <vector>

#include "varelim/instance.hpp"
#include "varelim/trace.hpp"

namespace varelim {

struct PropagationResult {
    DeletionLog log;
    /// False when some active domain became (or already was) empty.
    bool sat = true;
};

/// Arc consistency over declared relations between active variables
/// (AC-4 style support counters). Mutates `inst`.
PropagationResult enforce_ac(Instance& inst);

/// True if every live value of every active variable has a support at
/// every active constraining variable.
bool is_arc_consistent(const Instance& inst);

/// Deletes every neighbour value with no support at x_i, then deactivates x_i.
PropagationResult eliminate_variable(Instance& inst, Var i);

struct SingletonResult {
    EliminationTrace trace;
    bool sat = true;
};

/// Repeatedly eliminates the smallest-index active variable with a
/// one-value domain.
SingletonResult eliminate_singletons(Instance& inst);

/// True if N(a) is a subset of N(b) at x_i, over active neighbours.
bool ns_substitutable(const Instance& inst, Var i, Value a, Value b);

/// Deletes neighbourhood-substitutable values until none remain.
/// Variables are scanned in `order` (default ascending); within a variable
/// a value is deleted when some other live value covers it, keeping the
/// smaller index when two values cover each other.
DeletionLog ns_fixpoint(Instance& inst, const std::vector<Var>& order = {});

} // namespace varelim
