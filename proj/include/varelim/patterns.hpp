#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "varelim/instance.hpp"
#include "varelim/trace.hpp"

namespace varelim {

// All checkers look only at active variables and live values, and never
// require arc consistency. Existentials resolve to the smallest index.

/// (v_i,v_j) incompatible, (v_i,v'_j) compatible, (v_j,v_k) compatible,
/// (v'_j,v_k) incompatible.
struct SnakeOccurrence {
    Var j;
    Value vj;
    Value vj2;
    Var k;
    Value vk;
    friend bool operator==(const SnakeOccurrence&, const SnakeOccurrence&) = default;
};

std::optional<SnakeOccurrence> snake_occurs(const Instance& inst, Var i, Value vi);
std::optional<SnakeWitness> check_exists_snake(const Instance& inst, Var i);

/// Smallest v'_j for the pair (vi, (j,vj)), or none.
std::optional<Value> de_snake_substitute(const Instance& inst, Var i, Value vi, Var j, Value vj);
std::optional<DESnakeWitness> check_de_snake(const Instance& inst, Var i);

/// Witness for x_i justified by the given x_j, or none.
std::optional<TriangleWitness> triangle_justified_by(const Instance& inst, Var i, Var j);
std::optional<TriangleWitness> check_triangle(const Instance& inst, Var i);

/// Base (i,vi),(j,vj) with i < j; apex u1 is compatible with vi only,
/// apex u2 with vj only.
struct BrokenTriangle {
    Var i;
    Value vi;
    Var j;
    Value vj;
    Value u1;
    Value u2;
    friend bool operator==(const BrokenTriangle&, const BrokenTriangle&) = default;
};

std::vector<BrokenTriangle> enumerate_broken_triangles(const Instance& inst, Var m);

std::size_t bt_degree(const Instance& inst, Var i, Value vi, Var m, Value vm);

/// \throws PreconditionError if (vi,vj) is incompatible.
bool is_3safe(const Instance& inst, Var i, Value vi, Var j, Value vj, Var m);

/// \throws PreconditionError with fewer than three active variables.
bool check_bt_degree_property(const Instance& inst, Var m);
/// Same test without the variable-count precondition (vacuous below three).
bool bt_degree_holds(const Instance& inst, Var m);

bool check_aebtp(const Instance& inst, Var m);

struct BrokenPolyhedron {
    Var m;
    std::vector<Var> base_vars;
    std::vector<Value> base_vals;
    /// apexes[h] is incompatible with base_vals[h] and compatible with the rest.
    std::vector<Value> apexes;
};

/// \throws PreconditionError if k < 2 or fewer than k active variables.
bool check_ae_broken_polyhedron(const Instance& inst, Var m, std::size_t k);
/// \throws PreconditionError if k < 2.
std::optional<BrokenPolyhedron> find_broken_polyhedron(const Instance& inst, Var m, std::size_t k);

bool pair_satisfies_1fbtp(const Instance& inst, Var m, Value u1, Value u2);
bool check_1fbtp(const Instance& inst, Var m);

/// Checker dispatch for the elimination rules (singleton included).
std::optional<RuleWitness> check_rule(const Instance& inst, Rule rule, Var i);

} // namespace varelim
