#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "varelim/instance.hpp"
#include "varelim/oracle.hpp"
#include "varelim/trace.hpp"

namespace varelim {

/// A fixed number of sets over the index universe [0, universe), each a
/// boolean table plus an element counter. Every operation is O(1).
class FlatSets {
public:
    FlatSets() = default;
    FlatSets(std::size_t num_sets, std::size_t universe)
        : universe_(universe), bits_(num_sets * universe, 0), count_(num_sets, 0)
    {
    }

    std::size_t num_sets() const { return count_.size(); }
    std::size_t universe() const { return universe_; }

    bool contains(std::size_t s, std::size_t e) const { return bits_[s * universe_ + e] != 0; }
    std::size_t size(std::size_t s) const { return count_[s]; }
    bool empty(std::size_t s) const { return count_[s] == 0; }

    /// Returns true if `e` was not already present.
    bool insert(std::size_t s, std::size_t e)
    {
        auto& b = bits_[s * universe_ + e];
        if (b)
            return false;
        b = 1;
        ++count_[s];
        return true;
    }
    /// Returns true if `e` was present.
    bool erase(std::size_t s, std::size_t e)
    {
        auto& b = bits_[s * universe_ + e];
        if (!b)
            return false;
        b = 0;
        --count_[s];
        return true;
    }
    /// Smallest element of a non-empty set.
    std::size_t first(std::size_t s) const
    {
        for (std::size_t e = 0; e < universe_; ++e)
            if (bits_[s * universe_ + e])
                return e;
        return universe_;
    }

private:
    std::size_t universe_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint32_t> count_;
};

enum class AuditEvent {
    enqueue, ///< a variable entered S_ELIM (key: variable)
    branch1, ///< labelled propagation branches, keyed by their index tuple
    branch2,
    branch3,
    table_delta, ///< an element left a bad-set table
};

struct AuditRecord {
    AuditEvent event;
    bool during_init;
    std::string table;
    std::vector<std::uint32_t> key;
};

/// Event log of one engine run, for differential debugging.
class EngineAudit {
public:
    void add(AuditEvent ev, bool during_init, std::string_view table, std::vector<std::uint32_t> key)
    {
        records_.push_back({ev, during_init, std::string(table), std::move(key)});
    }
    const std::vector<AuditRecord>& records() const { return records_; }
    std::size_t count(AuditEvent ev) const;
    /// Largest number of records sharing one (table, key) for the event.
    std::size_t max_per_key(AuditEvent ev) const;

private:
    std::vector<AuditRecord> records_;
};

/// Deliberate defects for mutation testing of the verification battery.
enum class EngineFault {
    none,
    skip_branch, ///< each engine ignores one of its propagation updates
};

struct EngineOptions {
    EngineAudit* audit = nullptr;
    EngineFault fault = EngineFault::none;
};

/// Applies `rule` until convergence with the incremental algorithms.
/// Eliminations follow a FIFO queue, except for the triangle rule which
/// always takes the smallest eligible variable.
/// \throws PreconditionError if `inst` is not arc consistent or the rule
///         has no engine.
FixpointResult run_engine(const Instance& inst, Rule rule, const EngineOptions& opt = {});

} // namespace varelim
