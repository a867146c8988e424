#include "varelim/patterns.hpp"

#include <algorithm>
#include <functional>

namespace varelim {

namespace {

// deg[i][vi * |U(m)| + u] for every i constrained with m.
struct DegreeTable {
    std::size_t um = 0;
    std::vector<std::vector<std::uint32_t>> deg;

    std::uint32_t at(Var i, Value vi, Value u) const
    {
        const auto& d = deg[i];
        return d.empty() ? 0 : d[vi * um + u];
    }
};

DegreeTable degree_table(const Instance& inst, Var m)
{
    DegreeTable t;
    t.um = inst.universe_size(m);
    t.deg.resize(inst.num_vars());
    const auto& dm = inst.domain(m);
    const auto nb = inst.neighbors(m);
    Bitset touched(t.um);
    for (Var i : nb) {
        t.deg[i].assign(inst.universe_size(i) * t.um, 0);
        for (Value vi : inst.values(i)) {
            const Bitset& ri = inst.row(i, vi, m);
            for (Var j : nb) {
                if (j == i)
                    continue;
                touched.reset_all();
                for (Value vj : inst.values(j)) {
                    if (!inst.allowed(i, vi, j, vj))
                        continue;
                    const Bitset& rj = inst.row(j, vj, m);
                    if (ri.any_and_not(rj, dm) && rj.any_and_not(ri, dm)) {
                        // the apexes are the values compatible with exactly one base point
                        Bitset only_i = ri & dm;
                        only_i.subtract(rj);
                        Bitset only_j = rj & dm;
                        only_j.subtract(ri);
                        touched |= only_i;
                        touched |= only_j;
                    }
                }
                touched.for_each([&](std::size_t u) { ++t.deg[i][vi * t.um + u]; });
            }
        }
    }
    return t;
}

bool triangles_3safe(const Instance& inst, const DegreeTable& t, Var i, Value vi, Var j, Value vj, Var m)
{
    if (!inst.has_relation(i, m) || !inst.has_relation(j, m))
        return true;
    const auto& dm = inst.domain(m);
    const Bitset& ri = inst.row(i, vi, m);
    const Bitset& rj = inst.row(j, vj, m);
    bool all_i = true, all_j = true;
    // u'' compatible with vj only: need deg(vi,u'') == 1
    (rj & dm).for_each([&](std::size_t u) {
        if (!ri.test(u) && t.at(i, vi, static_cast<Value>(u)) > 1)
            all_i = false;
    });
    (ri & dm).for_each([&](std::size_t u) {
        if (!rj.test(u) && t.at(j, vj, static_cast<Value>(u)) > 1)
            all_j = false;
    });
    return all_i || all_j;
}

void for_each_combination(const std::vector<Var>& pool, std::size_t r,
                          const std::function<bool(const std::vector<Var>&)>& f)
{
    if (r > pool.size())
        return;
    std::vector<std::size_t> idx(r);
    for (std::size_t p = 0; p < r; ++p)
        idx[p] = p;
    std::vector<Var> pick(r);
    while (true) {
        for (std::size_t p = 0; p < r; ++p)
            pick[p] = pool[idx[p]];
        if (!f(pick))
            return;
        std::size_t p = r;
        while (p > 0 && idx[p - 1] == pool.size() - r + p - 1)
            --p;
        if (p == 0)
            return;
        ++idx[p - 1];
        for (std::size_t q = p; q < r; ++q)
            idx[q] = idx[q - 1] + 1;
    }
}

// Calls f on every consistent assignment to vars (values in vals).
bool for_each_consistent(const Instance& inst, const std::vector<Var>& vars, std::vector<Value>& vals, std::size_t depth,
                         const std::function<bool()>& f)
{
    if (depth == vars.size())
        return f();
    for (Value a : inst.values(vars[depth])) {
        bool ok = true;
        for (std::size_t h = 0; h < depth && ok; ++h)
            ok = inst.allowed(vars[h], vals[h], vars[depth], a);
        if (!ok)
            continue;
        vals[depth] = a;
        if (!for_each_consistent(inst, vars, vals, depth + 1, f))
            return false;
    }
    return true;
}

// Smallest u in D(m) incompatible with vals[h] and compatible with every other base point.
std::optional<Value> side_apex(const Instance& inst, Var m, const std::vector<Var>& vars,
                               const std::vector<Value>& vals, std::size_t h)
{
    Bitset c = inst.domain(m);
    c.subtract(inst.row(vars[h], vals[h], m));
    for (std::size_t g = 0; g < vars.size() && c.any(); ++g)
        if (g != h)
            c &= inst.row(vars[g], vals[g], m);
    if (c.none())
        return std::nullopt;
    return static_cast<Value>(c.first());
}

} // namespace

std::optional<SnakeOccurrence> snake_occurs(const Instance& inst, Var i, Value vi)
{
    for (Var j : inst.neighbors(i)) {
        const Bitset& rij = inst.row(i, vi, j);
        for (Value vj : inst.values(j)) {
            if (rij.test(vj))
                continue;
            for (Value vj2 : inst.values(j)) {
                if (!rij.test(vj2))
                    continue;
                for (Var k : inst.neighbors(j)) {
                    if (k == i)
                        continue;
                    Bitset hit = inst.row(j, vj, k) & inst.domain(k);
                    hit.subtract(inst.row(j, vj2, k));
                    if (hit.any())
                        return SnakeOccurrence{j, vj, vj2, k, static_cast<Value>(hit.first())};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<SnakeWitness> check_exists_snake(const Instance& inst, Var i)
{
    for (Value vi : inst.values(i))
        if (!snake_occurs(inst, i, vi))
            return SnakeWitness{vi};
    return std::nullopt;
}

std::optional<Value> de_snake_substitute(const Instance& inst, Var i, Value vi, Var j, Value vj)
{
    const auto nj = inst.neighbors(j);
    const Bitset cand = inst.row(i, vi, j) & inst.domain(j);
    for (std::size_t u = cand.first(); u < cand.size(); u = cand.next(u + 1)) {
        bool ok = true;
        for (Var k : nj) {
            if (k == i)
                continue;
            if (!inst.row(j, vj, k).is_subset_of(inst.row(j, static_cast<Value>(u), k), inst.domain(k))) {
                ok = false;
                break;
            }
        }
        if (ok)
            return static_cast<Value>(u);
    }
    return std::nullopt;
}

std::optional<DESnakeWitness> check_de_snake(const Instance& inst, Var i)
{
    const auto ni = inst.neighbors(i);
    for (Value vi : inst.values(i)) {
        DESnakeWitness w{vi, {}};
        bool ok = true;
        for (Var j : ni) {
            for (Value vj : inst.values(j)) {
                if (inst.allowed(i, vi, j, vj))
                    continue;
                auto u = de_snake_substitute(inst, i, vi, j, vj);
                if (!u) {
                    ok = false;
                    break;
                }
                w.u_map.emplace_back(j, vj, *u);
            }
            if (!ok)
                break;
        }
        if (ok)
            return w;
    }
    return std::nullopt;
}

std::optional<TriangleWitness> triangle_justified_by(const Instance& inst, Var i, Var j)
{
    const auto ni = inst.neighbors(i);
    TriangleWitness w{j, {}};
    for (Value vj : inst.values(j)) {
        const Bitset cand = inst.row(j, vj, i) & inst.domain(i);
        bool found = false;
        for (std::size_t a = cand.first(); a < cand.size() && !found; a = cand.next(a + 1)) {
            bool ok = true;
            for (Var k : ni) {
                if (k == j)
                    continue;
                if (!inst.row(j, vj, k).is_subset_of(inst.row(i, static_cast<Value>(a), k), inst.domain(k))) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                w.v_map.emplace_back(vj, static_cast<Value>(a));
                found = true;
            }
        }
        if (!found)
            return std::nullopt;
    }
    return w;
}

std::optional<TriangleWitness> check_triangle(const Instance& inst, Var i)
{
    for (Var j = 0; j < inst.num_vars(); ++j) {
        if (j == i || !inst.active(j))
            continue;
        if (auto w = triangle_justified_by(inst, i, j))
            return w;
    }
    return std::nullopt;
}

std::vector<BrokenTriangle> enumerate_broken_triangles(const Instance& inst, Var m)
{
    std::vector<BrokenTriangle> out;
    const auto nb = inst.neighbors(m);
    const auto& dm = inst.domain(m);
    for (std::size_t p = 0; p < nb.size(); ++p) {
        const Var i = nb[p];
        for (Value vi : inst.values(i)) {
            const Bitset& ri = inst.row(i, vi, m);
            for (std::size_t q = p + 1; q < nb.size(); ++q) {
                const Var j = nb[q];
                for (Value vj : inst.values(j)) {
                    if (!inst.allowed(i, vi, j, vj))
                        continue;
                    const Bitset& rj = inst.row(j, vj, m);
                    Bitset a = ri & dm;
                    a.subtract(rj);
                    Bitset b = rj & dm;
                    b.subtract(ri);
                    a.for_each([&](std::size_t u1) {
                        b.for_each([&](std::size_t u2) {
                            out.push_back({i, vi, j, vj, static_cast<Value>(u1), static_cast<Value>(u2)});
                        });
                    });
                }
            }
        }
    }
    return out;
}

std::size_t bt_degree(const Instance& inst, Var i, Value vi, Var m, Value vm)
{
    if (!inst.has_relation(i, m) || !inst.active(i) || !inst.active(m))
        return 0;
    const auto& dm = inst.domain(m);
    const Bitset& ri = inst.row(i, vi, m);
    std::size_t deg = 0;
    for (Var j : inst.neighbors(m)) {
        if (j == i)
            continue;
        for (Value vj : inst.values(j)) {
            if (!inst.allowed(i, vi, j, vj))
                continue;
            const Bitset& rj = inst.row(j, vj, m);
            if (!ri.any_and_not(rj, dm) || !rj.any_and_not(ri, dm))
                continue;
            if (ri.test(vm) != rj.test(vm)) {
                ++deg;
                break;
            }
        }
    }
    return deg;
}

bool is_3safe(const Instance& inst, Var i, Value vi, Var j, Value vj, Var m)
{
    if (!inst.allowed(i, vi, j, vj))
        throw PreconditionError("is_3safe: base pair is not compatible");
    return triangles_3safe(inst, degree_table(inst, m), i, vi, j, vj, m);
}

bool bt_degree_holds(const Instance& inst, Var m)
{
    const auto t = degree_table(inst, m);
    const auto& dm = inst.domain(m);
    const auto vars = inst.active_vars();
    for (std::size_t p = 0; p < vars.size(); ++p) {
        const Var i = vars[p];
        if (i == m)
            continue;
        for (std::size_t q = p + 1; q < vars.size(); ++q) {
            const Var j = vars[q];
            if (j == m)
                continue;
            for (Value vi : inst.values(i)) {
                for (Value vj : inst.values(j)) {
                    if (!inst.allowed(i, vi, j, vj))
                        continue;
                    Bitset ext = inst.row(i, vi, m) & inst.row(j, vj, m);
                    ext &= dm;
                    if (ext.none())
                        return false;
                    if (triangles_3safe(inst, t, i, vi, j, vj, m))
                        continue;
                    bool ok = false;
                    ext.for_each([&](std::size_t u) {
                        if (!ok && (t.at(i, vi, static_cast<Value>(u)) == 0 || t.at(j, vj, static_cast<Value>(u)) == 0))
                            ok = true;
                    });
                    if (!ok)
                        return false;
                }
            }
        }
    }
    return true;
}

bool check_bt_degree_property(const Instance& inst, Var m)
{
    if (inst.num_active() < 3)
        throw PreconditionError("BT-degree property needs at least three variables");
    return bt_degree_holds(inst, m);
}

bool check_aebtp(const Instance& inst, Var m)
{
    const auto& dm = inst.domain(m);
    const auto vars = inst.active_vars();
    const auto nb = inst.neighbors(m);
    for (Var i1 : vars) {
        if (i1 == m)
            continue;
        for (Value v1 : inst.values(i1)) {
            const Bitset& r1 = inst.row(i1, v1, m);
            Bitset good = r1 & dm;
            if (good.none())
                return false;
            if (!inst.has_relation(i1, m))
                continue;
            for (Var i2 : nb) {
                if (i2 == i1)
                    continue;
                for (Value v2 : inst.values(i2)) {
                    if (!inst.allowed(i1, v1, i2, v2))
                        continue;
                    const Bitset& r2 = inst.row(i2, v2, m);
                    if (r2.any_and_not(r1, dm))
                        good &= r2;
                }
            }
            if (good.none())
                return false;
        }
    }
    return true;
}

std::optional<BrokenPolyhedron> find_broken_polyhedron(const Instance& inst, Var m, std::size_t k)
{
    if (k < 2)
        throw PreconditionError("broken polyhedron dimension must be at least 2");
    std::vector<Var> pool = inst.neighbors(m);
    std::optional<BrokenPolyhedron> found;
    for_each_combination(pool, k, [&](const std::vector<Var>& vars) {
        std::vector<Value> vals(k);
        for_each_consistent(inst, vars, vals, 0, [&] {
            std::vector<Value> apex(k);
            for (std::size_t h = 0; h < k; ++h) {
                auto u = side_apex(inst, m, vars, vals, h);
                if (!u)
                    return true;
                apex[h] = *u;
            }
            found = BrokenPolyhedron{m, vars, vals, apex};
            return false;
        });
        return !found;
    });
    return found;
}

bool check_ae_broken_polyhedron(const Instance& inst, Var m, std::size_t k)
{
    if (k < 2)
        throw PreconditionError("broken polyhedron dimension must be at least 2");
    if (inst.num_active() < k)
        throw PreconditionError("instance has fewer variables than the polyhedron dimension");
    std::vector<Var> pool;
    for (Var v : inst.active_vars())
        if (v != m)
            pool.push_back(v);
    bool holds = true;
    for_each_combination(pool, k - 1, [&](const std::vector<Var>& base) {
        std::vector<Value> vals(k - 1);
        for_each_consistent(inst, base, vals, 0, [&] {
            Bitset cand = inst.domain(m);
            for (std::size_t h = 0; h < base.size(); ++h)
                cand &= inst.row(base[h], vals[h], m);
            // a candidate v_m is spoiled when it is the last apex of a broken polyhedron
            std::vector<Var> vars = base;
            vars.push_back(0);
            std::vector<Value> ext = vals;
            ext.push_back(0);
            bool any_good = false;
            cand.for_each([&](std::size_t vm) {
                if (any_good)
                    return;
                bool spoiled = false;
                for (Var ik : pool) {
                    if (spoiled)
                        break;
                    if (std::find(base.begin(), base.end(), ik) != base.end())
                        continue;
                    for (Value vk : inst.values(ik)) {
                        if (inst.allowed(ik, vk, m, static_cast<Value>(vm)))
                            continue;
                        bool consistent = true;
                        for (std::size_t h = 0; h < base.size() && consistent; ++h)
                            consistent = inst.allowed(base[h], vals[h], ik, vk);
                        if (!consistent)
                            continue;
                        vars.back() = ik;
                        ext.back() = vk;
                        bool broken = true;
                        for (std::size_t h = 0; h + 1 < vars.size() && broken; ++h)
                            broken = side_apex(inst, m, vars, ext, h).has_value();
                        if (broken) {
                            spoiled = true;
                            break;
                        }
                    }
                }
                if (!spoiled)
                    any_good = true;
            });
            if (!any_good)
                holds = false;
            return holds;
        });
        return holds;
    });
    return holds;
}

bool pair_satisfies_1fbtp(const Instance& inst, Var m, Value u1, Value u2)
{
    const auto vars = inst.active_vars();
    for (const auto& bt : enumerate_broken_triangles(inst, m)) {
        if (!((bt.u1 == u1 && bt.u2 == u2) || (bt.u1 == u2 && bt.u2 == u1)))
            continue;
        bool supported = false;
        for (Var l : vars) {
            if (l == bt.i || l == bt.j || l == m)
                continue;
            if (!inst.row(bt.i, bt.vi, l).intersects(inst.row(bt.j, bt.vj, l), inst.domain(l))) {
                supported = true;
                break;
            }
        }
        if (!supported)
            return false;
    }
    return true;
}

bool check_1fbtp(const Instance& inst, Var m)
{
    const auto vars = inst.active_vars();
    for (const auto& bt : enumerate_broken_triangles(inst, m)) {
        bool supported = false;
        for (Var l : vars) {
            if (l == bt.i || l == bt.j || l == m)
                continue;
            if (!inst.row(bt.i, bt.vi, l).intersects(inst.row(bt.j, bt.vj, l), inst.domain(l))) {
                supported = true;
                break;
            }
        }
        if (!supported)
            return false;
    }
    return true;
}

std::optional<RuleWitness> check_rule(const Instance& inst, Rule rule, Var i)
{
    switch (rule) {
    case Rule::exists_snake:
        if (auto w = check_exists_snake(inst, i))
            return RuleWitness{*w};
        return std::nullopt;
    case Rule::de_snake:
        if (auto w = check_de_snake(inst, i))
            return RuleWitness{*w};
        return std::nullopt;
    case Rule::triangle:
        if (auto w = check_triangle(inst, i))
            return RuleWitness{*w};
        return std::nullopt;
    case Rule::bt_degree:
        if (bt_degree_holds(inst, i))
            return RuleWitness{ExtensionWitness{}};
        return std::nullopt;
    case Rule::aebtp:
        if (check_aebtp(inst, i))
            return RuleWitness{ExtensionWitness{}};
        return std::nullopt;
    case Rule::singleton:
        if (inst.domain_size(i) == 1)
            return RuleWitness{SingletonWitness{static_cast<Value>(inst.domain(i).first())}};
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace varelim
