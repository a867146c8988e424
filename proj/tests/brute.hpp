#pragma once

// Quantifier-by-quantifier transcriptions of the rule definitions. They loop
// over every active variable and live value and only call `allowed`, so they
// share no code with the library checkers they are compared against.

#include <set>
#include <tuple>
#include <vector>

#include "varelim/instance.hpp"

namespace brute {

using namespace varelim;

inline std::vector<Var> others(const Instance& I, std::initializer_list<Var> excl)
{
    std::vector<Var> out;
    for (Var v : I.active_vars())
        if (std::find(excl.begin(), excl.end(), v) == excl.end())
            out.push_back(v);
    return out;
}

inline bool R(const Instance& I, Var i, Value a, Var j, Value b) { return I.allowed(i, a, j, b); }

inline bool snake_free(const Instance& I, Var i, Value vi)
{
    for (Var j : others(I, {i}))
        for (Value vj : I.values(j))
            for (Value vj2 : I.values(j))
                for (Var k : others(I, {i, j}))
                    for (Value vk : I.values(k))
                        if (!R(I, i, vi, j, vj) && R(I, i, vi, j, vj2) && R(I, j, vj, k, vk) && !R(I, j, vj2, k, vk))
                            return false;
    return true;
}

inline bool exists_snake(const Instance& I, Var i)
{
    for (Value vi : I.values(i))
        if (snake_free(I, i, vi))
            return true;
    return false;
}

inline bool de_snake(const Instance& I, Var i)
{
    for (Value vi : I.values(i)) {
        bool all = true;
        for (Var j : others(I, {i}))
            for (Value vj : I.values(j)) {
                if (R(I, i, vi, j, vj))
                    continue;
                bool some = false;
                for (Value u : I.values(j)) {
                    if (!R(I, j, u, i, vi))
                        continue;
                    bool cond2 = true;
                    for (Var k : others(I, {i, j}))
                        for (Value vk : I.values(k))
                            if (R(I, j, vj, k, vk) && !R(I, j, u, k, vk))
                                cond2 = false;
                    some = some || cond2;
                }
                all = all && some;
            }
        if (all)
            return true;
    }
    return false;
}

inline bool triangle(const Instance& I, Var i)
{
    for (Var j : others(I, {i})) {
        bool all = true;
        for (Value vj : I.values(j)) {
            bool some = false;
            for (Value vi : I.values(i)) {
                if (!R(I, i, vi, j, vj))
                    continue;
                bool impl = true;
                for (Var k : others(I, {i, j}))
                    for (Value vk : I.values(k))
                        if (R(I, j, vj, k, vk) && !R(I, i, vi, k, vk))
                            impl = false;
                some = some || impl;
            }
            all = all && some;
        }
        if (all)
            return true;
    }
    return false;
}

/// (i, vi, j, vj, u1, u2) with i < j, u1 on vi's side.
using BT = std::tuple<Var, Value, Var, Value, Value, Value>;

inline std::set<BT> broken_triangles(const Instance& I, Var m)
{
    std::set<BT> out;
    for (Var i : others(I, {m}))
        for (Var j : others(I, {m, i}))
            if (i < j)
                for (Value vi : I.values(i))
                    for (Value vj : I.values(j))
                        for (Value u1 : I.values(m))
                            for (Value u2 : I.values(m))
                                if (R(I, i, vi, j, vj) && R(I, i, vi, m, u1) && R(I, j, vj, m, u2) &&
                                    !R(I, i, vi, m, u2) && !R(I, j, vj, m, u1))
                                    out.insert({i, vi, j, vj, u1, u2});
    return out;
}

// Base <(i,vi),(j,vj)> in either variable order, apex set containing u.
inline bool bt_with(const Instance& I, Var m, Var i, Value vi, Var j, Value vj, Value u)
{
    for (Value w : I.values(m)) {
        auto check = [&](Value u1, Value u2) {
            return R(I, i, vi, j, vj) && R(I, i, vi, m, u1) && R(I, j, vj, m, u2) && !R(I, i, vi, m, u2) &&
                   !R(I, j, vj, m, u1);
        };
        if (check(u, w) || check(w, u))
            return true;
    }
    return false;
}

inline std::size_t degree(const Instance& I, Var i, Value vi, Var m, Value u)
{
    std::size_t d = 0;
    for (Var j : others(I, {i, m})) {
        bool any = false;
        for (Value vj : I.values(j))
            any = any || bt_with(I, m, i, vi, j, vj, u);
        d += any;
    }
    return d;
}

inline bool three_safe(const Instance& I, Var i, Value vi, Var j, Value vj, Var m)
{
    for (Value u1 : I.values(m))
        for (Value u2 : I.values(m))
            if (R(I, i, vi, m, u1) && R(I, j, vj, m, u2) && !R(I, i, vi, m, u2) && !R(I, j, vj, m, u1))
                if (degree(I, i, vi, m, u2) != 1 && degree(I, j, vj, m, u1) != 1)
                    return false;
    return true;
}

inline bool bt_degree_property(const Instance& I, Var m)
{
    for (Var i : others(I, {m}))
        for (Var j : others(I, {m, i}))
            for (Value vi : I.values(i))
                for (Value vj : I.values(j)) {
                    if (!R(I, i, vi, j, vj))
                        continue;
                    bool some = false;
                    for (Value vm : I.values(m))
                        if (R(I, i, vi, m, vm) && R(I, j, vj, m, vm) &&
                            (three_safe(I, i, vi, j, vj, m) || degree(I, i, vi, m, vm) == 0 ||
                             degree(I, j, vj, m, vm) == 0))
                            some = true;
                    if (!some)
                        return false;
                }
    return true;
}

inline bool aebtp(const Instance& I, Var m)
{
    for (Var i1 : others(I, {m}))
        for (Value v1 : I.values(i1)) {
            bool some = false;
            for (Value vm : I.values(m)) {
                if (!R(I, i1, v1, m, vm))
                    continue;
                bool none = true;
                for (Var i2 : others(I, {m, i1}))
                    for (Value v2 : I.values(i2))
                        if (bt_with(I, m, i1, v1, i2, v2, vm))
                            none = false;
                some = some || none;
            }
            if (!some)
                return false;
        }
    return true;
}

/// Broken 3-polyhedron with base <v1,v2,v3> on (a,b,c) and apex vm assigned to
/// the side of v3, i.e. vm is compatible with v1,v2 and not with v3.
inline bool tetra_with_apex(const Instance& I, Var m, Var a, Value va, Var b, Value vb, Var c, Value vc, Value vm)
{
    if (!(R(I, a, va, b, vb) && R(I, a, va, c, vc) && R(I, b, vb, c, vc)))
        return false;
    if (!(R(I, a, va, m, vm) && R(I, b, vb, m, vm) && !R(I, c, vc, m, vm)))
        return false;
    bool ua = false, ub = false;
    for (Value u : I.values(m)) {
        ua = ua || (!R(I, a, va, m, u) && R(I, b, vb, m, u) && R(I, c, vc, m, u));
        ub = ub || (R(I, a, va, m, u) && !R(I, b, vb, m, u) && R(I, c, vc, m, u));
    }
    return ua && ub;
}

inline bool ae_tetra(const Instance& I, Var m)
{
    for (Var a : others(I, {m}))
        for (Var b : others(I, {m, a}))
            for (Value va : I.values(a))
                for (Value vb : I.values(b)) {
                    if (!R(I, a, va, b, vb))
                        continue;
                    bool some = false;
                    for (Value vm : I.values(m)) {
                        if (!R(I, a, va, m, vm) || !R(I, b, vb, m, vm))
                            continue;
                        bool none = true;
                        for (Var c : others(I, {m, a, b}))
                            for (Value vc : I.values(c))
                                if (tetra_with_apex(I, m, a, va, b, vb, c, vc, vm))
                                    none = false;
                        some = some || none;
                    }
                    if (!some)
                        return false;
                }
    return true;
}

inline bool one_fbtp(const Instance& I, Var m)
{
    for (const auto& [i, vi, j, vj, u1, u2] : broken_triangles(I, m)) {
        bool supported = false;
        for (Var l : others(I, {i, j, m})) {
            bool no_common = true;
            for (Value vl : I.values(l))
                if (R(I, i, vi, l, vl) && R(I, j, vj, l, vl))
                    no_common = false;
            supported = supported || no_common;
        }
        if (!supported)
            return false;
    }
    return true;
}

} // namespace brute
