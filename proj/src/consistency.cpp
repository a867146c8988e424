#include "varelim/consistency.hpp"

#include <algorithm>
#include <deque>

namespace varelim {

PropagationResult enforce_ac(Instance& inst)
{
    PropagationResult res;
    const auto n = static_cast<Var>(inst.num_vars());
    if (inst.wiped_out()) {
        res.sat = false;
        return res;
    }

    // cnt[i][s][a]: supports of (i,a) in D(partners(i)[s]).
    std::vector<std::vector<std::vector<std::uint32_t>>> cnt(n);
    std::deque<std::pair<Var, Value>> queue;

    auto remove = [&](Var i, Value a) {
        inst.remove_value(i, a);
        res.log.add(i, a, DeletionCause::ac);
        queue.emplace_back(i, a);
    };

    for (Var i = 0; i < n; ++i) {
        if (!inst.active(i))
            continue;
        const auto& ps = inst.partners(i);
        cnt[i].resize(ps.size());
        for (std::size_t s = 0; s < ps.size(); ++s) {
            const Var j = ps[s];
            if (!inst.active(j))
                continue;
            cnt[i][s].assign(inst.universe_size(i), 0);
            for (Value a = 0; a < inst.universe_size(i); ++a)
                if (inst.in_domain(i, a))
                    cnt[i][s][a] = static_cast<std::uint32_t>(inst.row(i, a, j).count_and(inst.domain(j)));
        }
    }
    for (Var i = 0; i < n; ++i) {
        if (!inst.active(i))
            continue;
        for (Value a = 0; a < inst.universe_size(i); ++a) {
            if (!inst.in_domain(i, a))
                continue;
            for (const auto& c : cnt[i])
                if (!c.empty() && c[a] == 0) {
                    remove(i, a);
                    break;
                }
        }
        if (inst.domain(i).none()) {
            res.sat = false;
            return res;
        }
    }

    while (!queue.empty()) {
        auto [j, b] = queue.front();
        queue.pop_front();
        for (Var i : inst.partners(j)) {
            if (!inst.active(i))
                continue;
            const auto& ps = inst.partners(i);
            const auto s = static_cast<std::size_t>(std::lower_bound(ps.begin(), ps.end(), j) - ps.begin());
            auto& c = cnt[i][s];
            bool wiped = false;
            (inst.row(j, b, i) & inst.domain(i)).for_each([&](std::size_t a) {
                if (--c[a] == 0 && !wiped) {
                    remove(i, static_cast<Value>(a));
                    wiped = inst.domain(i).none();
                }
            });
            if (wiped) {
                res.sat = false;
                return res;
            }
        }
    }
    return res;
}

bool is_arc_consistent(const Instance& inst)
{
    for (Var i = 0; i < inst.num_vars(); ++i) {
        if (!inst.active(i))
            continue;
        if (inst.domain(i).none())
            return false;
        for (Var j : inst.neighbors(i)) {
            bool ok = true;
            inst.domain(i).for_each([&](std::size_t a) {
                if (ok && !inst.row(i, static_cast<Value>(a), j).intersects(inst.domain(j)))
                    ok = false;
            });
            if (!ok)
                return false;
        }
    }
    return true;
}

PropagationResult eliminate_variable(Instance& inst, Var i)
{
    PropagationResult res;
    for (Var j : inst.neighbors(i)) {
        for (Value b : inst.values(j))
            if (!inst.row(j, b, i).intersects(inst.domain(i))) {
                inst.remove_value(j, b);
                res.log.add(j, b, DeletionCause::elim);
            }
    }
    inst.deactivate(i);
    res.sat = !inst.wiped_out();
    return res;
}

SingletonResult eliminate_singletons(Instance& inst)
{
    SingletonResult res;
    bool changed = true;
    while (changed && res.sat) {
        changed = false;
        for (Var i = 0; i < inst.num_vars(); ++i) {
            if (!inst.active(i) || inst.domain_size(i) != 1)
                continue;
            const auto v = static_cast<Value>(inst.domain(i).first());
            res.trace.records.push_back(make_record(inst, Rule::singleton, i, SingletonWitness{v}));
            auto r = eliminate_variable(inst, i);
            res.trace.add_deletions(r.log);
            res.sat = r.sat;
            changed = true;
            break;
        }
    }
    return res;
}

bool ns_substitutable(const Instance& inst, Var i, Value a, Value b)
{
    for (Var j : inst.neighbors(i))
        if (inst.row(i, a, j).any_and_not(inst.row(i, b, j), inst.domain(j)))
            return false;
    return true;
}

DeletionLog ns_fixpoint(Instance& inst, const std::vector<Var>& order)
{
    std::vector<Var> scan = order;
    if (scan.empty())
        for (Var i = 0; i < inst.num_vars(); ++i)
            scan.push_back(i);
    DeletionLog log;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Var i : scan) {
            if (!inst.active(i))
                continue;
            for (Value a : inst.values(i)) {
                for (Value b : inst.values(i)) {
                    if (b == a || !ns_substitutable(inst, i, a, b))
                        continue;
                    if (b > a && ns_substitutable(inst, i, b, a))
                        continue; // interchangeable: the larger index goes
                    inst.remove_value(i, a);
                    log.add(i, a, DeletionCause::ns);
                    changed = true;
                    break;
                }
            }
        }
    }
    return log;
}

} // namespace varelim
