#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "varelim/instance.hpp"

namespace varelim {

enum class Rule { exists_snake, de_snake, triangle, bt_degree, aebtp, singleton };

/// The five elimination rules that have engines, in a fixed order.
inline constexpr Rule kEngineRules[] = {Rule::exists_snake, Rule::de_snake, Rule::triangle, Rule::bt_degree,
                                        Rule::aebtp};

std::string_view rule_name(Rule r);
/// Accepts the names produced by rule_name.
std::optional<Rule> parse_rule(std::string_view s);

enum class DeletionCause { ac, elim, ns };

struct Deletion {
    Var var;
    Value value;
    DeletionCause cause;
    friend bool operator==(const Deletion&, const Deletion&) = default;
};

struct DeletionLog {
    std::vector<Deletion> entries;

    void add(Var v, Value a, DeletionCause c) { entries.push_back({v, a, c}); }
    void append(const DeletionLog& o) { entries.insert(entries.end(), o.entries.begin(), o.entries.end()); }
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

struct SnakeWitness {
    Value vi;
    friend bool operator==(const SnakeWitness&, const SnakeWitness&) = default;
};

struct DESnakeWitness {
    Value vi;
    /// (j, v_j, u_j(v_j)) for every v_j incompatible with vi.
    std::vector<std::tuple<Var, Value, Value>> u_map;
    friend bool operator==(const DESnakeWitness&, const DESnakeWitness&) = default;
};

struct TriangleWitness {
    Var j;
    /// (v_j, v_i(v_j)) for every v_j in D(x_j).
    std::vector<std::pair<Value, Value>> v_map;
    friend bool operator==(const TriangleWitness&, const TriangleWitness&) = default;
};

struct ExtensionWitness {
    friend bool operator==(const ExtensionWitness&, const ExtensionWitness&) = default;
};

struct SingletonWitness {
    Value vi;
    friend bool operator==(const SingletonWitness&, const SingletonWitness&) = default;
};

using RuleWitness = std::variant<SnakeWitness, DESnakeWitness, TriangleWitness, ExtensionWitness, SingletonWitness>;

struct RelationSnapshot {
    Var neighbor;
    /// Allowed (value of eliminated variable, value of neighbor) over live values.
    std::vector<std::pair<Value, Value>> allowed;
    friend bool operator==(const RelationSnapshot&, const RelationSnapshot&) = default;
};

struct EliminationRecord {
    Rule rule;
    Var var;
    RuleWitness witness;
    std::vector<Value> domain;
    std::vector<RelationSnapshot> relations;
    friend bool operator==(const EliminationRecord&, const EliminationRecord&) = default;
};

/// A value deletion and the number of eliminations that preceded it.
struct TracedDeletion {
    std::size_t after;
    Deletion del;
    friend bool operator==(const TracedDeletion&, const TracedDeletion&) = default;
};

struct EliminationTrace {
    std::vector<EliminationRecord> records;
    std::vector<TracedDeletion> deletions;

    void add_deletions(const DeletionLog& log)
    {
        for (const auto& d : log.entries)
            deletions.push_back({records.size(), d});
    }
    void append(const EliminationTrace& o);
    std::vector<Var> eliminated() const;
    friend bool operator==(const EliminationTrace&, const EliminationTrace&) = default;
};

/// Snapshot of x_i's live domain and its rows toward active neighbours,
/// taken before x_i is removed.
EliminationRecord make_record(const Instance& inst, Rule rule, Var i, RuleWitness w);

/// Trace text uses the instance's variable indices and value labels.
void write_trace(const Instance& inst, const EliminationTrace& t, std::ostream& out);
/// \throws ParseError on malformed text or labels unknown to `inst`.
EliminationTrace read_trace(const Instance& inst, std::istream& in);

std::string_view cause_name(DeletionCause c);

} // namespace varelim
