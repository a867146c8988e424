#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varelim/bitset.hpp"
#include "varelim/errors.hpp"

namespace varelim {

using Var = std::uint32_t;
/// Internal value index, dense per variable (0..universe_size-1).
using Value = std::uint32_t;
/// Value as written in files.
using Label = std::int64_t;

/// Binary CSP over a fixed universe of variables.
///
/// Variables are never renumbered: elimination flips an `active` flag and
/// value deletion clears a domain bit. Explicit relations are stored as rows
/// in both directions; unconstrained pairs are implicit and answer
/// `row()` with the full universe of the other variable.
class Instance {
public:
    Instance() = default;
    /// One variable per entry, with the given labels in order. No constraints.
    explicit Instance(const std::vector<std::vector<Label>>& domains);

    std::size_t num_vars() const { return labels_.size(); }
    std::size_t num_active() const { return num_active_; }
    bool active(Var i) const { return active_[i]; }
    std::vector<Var> active_vars() const;

    std::size_t universe_size(Var i) const { return labels_[i].size(); }
    const Bitset& domain(Var i) const { return domain_[i]; }
    std::size_t domain_size(Var i) const { return domain_[i].count(); }
    bool in_domain(Var i, Value a) const { return a < universe_size(i) && domain_[i].test(a); }
    std::vector<Value> values(Var i) const;
    std::size_t max_domain_size() const;

    Label label(Var i, Value a) const { return labels_[i][a]; }
    const std::vector<Label>& labels(Var i) const { return labels_[i]; }
    std::optional<Value> value_of(Var i, Label l) const;

    /// Declared relation between i and j, whatever their activity.
    bool has_relation(Var i, Var j) const { return rel_index(i, j) >= 0; }
    /// Declared relation between two active variables.
    bool constrains(Var i, Var j) const { return active_[i] && active_[j] && has_relation(i, j); }
    /// Number of declared relations between active variables.
    std::size_t num_constraints() const;

    /// Declares a relation with no allowed pairs. No-op if already declared.
    void add_relation(Var i, Var j);
    void set_allowed(Var i, Value a, Var j, Value b, bool allowed);

    /// Supports of (i,a) in the universe of j, ignoring j's domain.
    const Bitset& row(Var i, Value a, Var j) const
    {
        auto r = rel_index(i, j);
        if (r < 0)
            return full_[j];
        const auto& rel = relations_[static_cast<std::size_t>(r)];
        return i < j ? rel.lo_rows[a] : rel.hi_rows[a];
    }

    /// Unchecked compatibility test (domains ignored).
    bool allowed(Var i, Value a, Var j, Value b) const { return row(i, a, j).test(b); }

    /// Checked compatibility test.
    /// \throws PreconditionError if i == j or either value is outside its domain.
    bool compatible(Var i, Value a, Var j, Value b) const;

    /// Active variables sharing a declared relation with i (ascending).
    std::vector<Var> neighbors(Var i) const;
    /// All variables that ever shared a declared relation with i (ascending).
    const std::vector<Var>& partners(Var i) const { return partners_[i]; }

    void remove_value(Var i, Value a) { domain_[i].reset(a); }
    void deactivate(Var i);

    /// True if some active variable has an empty domain.
    bool wiped_out() const;

    /// Compatibility and activity agree on every active variable and
    /// every live value; explicit versus implicit storage is not compared.
    friend bool operator==(const Instance& a, const Instance& b);

private:
    struct Relation {
        // lo_rows[a] : supports in hi's universe for lo value a; hi_rows the transpose.
        std::vector<Bitset> lo_rows;
        std::vector<Bitset> hi_rows;
    };

    std::int32_t rel_index(Var i, Var j) const { return rel_of_[static_cast<std::size_t>(i) * num_vars() + j]; }

    std::vector<std::vector<Label>> labels_;
    std::vector<Bitset> domain_;
    std::vector<Bitset> full_;
    std::vector<bool> active_;
    std::size_t num_active_ = 0;
    std::vector<std::int32_t> rel_of_;
    std::vector<Relation> relations_;
    std::vector<std::vector<Var>> partners_;
};

/// Total or partial assignment, indexed by variable.
struct Assignment {
    std::vector<std::optional<Value>> value;

    Assignment() = default;
    explicit Assignment(std::size_t n) : value(n) {}

    bool has(Var i) const { return value[i].has_value(); }
    Value at(Var i) const { return *value[i]; }
    void set(Var i, Value a) { value[i] = a; }
    void clear(Var i) { value[i].reset(); }
    std::size_t size() const { return value.size(); }
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

using Solution = Assignment;

/// True if every active variable is assigned a live value and every
/// declared relation between active variables is satisfied.
bool is_solution(const Instance& inst, const Assignment& s);

/// Active variables renumbered 0..k-1 in ascending order, dead values dropped.
Instance compact(const Instance& inst, std::vector<Var>* origin = nullptr);

/// \throws ParseError
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
Instance parse_instance(const std::string& text);

/// Writes the compacted instance. When variables have been eliminated a
/// `# origin <new> <old>` comment line records the renumbering.
void save_instance(const Instance& inst, std::ostream& out);
std::string to_text(const Instance& inst);

} // namespace varelim
