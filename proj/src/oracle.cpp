#include "varelim/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "varelim/consistency.hpp"
#include "varelim/patterns.hpp"

namespace varelim {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::vector<Label>> plain_domains(std::size_t n, std::size_t d)
{
    std::vector<Label> dom(d);
    std::iota(dom.begin(), dom.end(), Label{0});
    return std::vector<std::vector<Label>>(n, dom);
}

void random_relation(Instance& inst, Var i, Var j, double p2, std::mt19937_64& rng)
{
    inst.add_relation(i, j);
    for (Value a = 0; a < inst.universe_size(i); ++a)
        for (Value b = 0; b < inst.universe_size(j); ++b)
            if (uniform01(rng) >= p2)
                inst.set_allowed(i, a, j, b, true);
}

void check_space(const Instance& inst)
{
    double space = 1;
    for (Var i : inst.active_vars())
        space *= static_cast<double>(inst.domain_size(i));
    if (space > kBruteForceLimit)
        throw SizeGuardError("brute-force search space exceeds the guard");
}

// Exhaustive backtracking over active variables. f returns false to stop.
template <typename F>
void enumerate_solutions(const Instance& inst, F&& f)
{
    const auto vars = inst.active_vars();
    Assignment s(inst.num_vars());
    std::vector<std::vector<Value>> vals;
    for (Var v : vars)
        vals.push_back(inst.values(v));
    bool stop = false;
    auto rec = [&](auto&& self, std::size_t depth) -> void {
        if (stop)
            return;
        if (depth == vars.size()) {
            if (!f(s))
                stop = true;
            return;
        }
        const Var x = vars[depth];
        for (Value a : vals[depth]) {
            bool ok = true;
            for (Var y : inst.partners(x))
                if (inst.active(y) && s.has(y) && !inst.allowed(x, a, y, s.at(y))) {
                    ok = false;
                    break;
                }
            if (!ok)
                continue;
            s.set(x, a);
            self(self, depth + 1);
            s.clear(x);
            if (stop)
                return;
        }
    };
    rec(rec, 0);
}

} // namespace

Instance random_instance(const GeneratorConfig& cfg)
{
    if (cfg.p1 < 0 || cfg.p1 > 1 || cfg.p2 < 0 || cfg.p2 > 1)
        throw PreconditionError("generator probabilities must lie in [0,1]");
    std::mt19937_64 rng(cfg.seed);
    Instance inst(plain_domains(cfg.n, cfg.d));
    for (Var i = 0; i < cfg.n; ++i)
        for (Var j = i + 1; j < cfg.n; ++j)
            if (uniform01(rng) < cfg.p1)
                random_relation(inst, i, j, cfg.p2, rng);
    return inst;
}

Instance random_tree_instance(std::size_t n, std::size_t d, double p2, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Instance inst(plain_domains(n, d));
    for (Var k = 1; k < n; ++k) {
        auto parent = static_cast<Var>(rng() % k);
        random_relation(inst, parent, k, p2, rng);
    }
    return inst;
}

GeneratorConfig battery_config(std::uint64_t seed)
{
    static constexpr double kP2[] = {0.3, 0.5, 0.7};
    return {4 + seed % 6, 2 + (seed / 6) % 3, 0.5, kP2[(seed / 18) % 3], seed};
}

std::vector<BatteryCase> ac_battery(std::size_t count, std::uint64_t first_seed,
                                    const std::optional<GeneratorConfig>& fixed)
{
    std::vector<BatteryCase> out;
    std::size_t misses = 0;
    for (std::uint64_t seed = first_seed; out.size() < count; ++seed) {
        GeneratorConfig cfg = fixed ? *fixed : battery_config(seed);
        cfg.seed = seed;
        auto inst = random_instance(cfg);
        if (enforce_ac(inst).sat) {
            out.push_back({cfg, std::move(inst)});
            misses = 0;
        } else if (fixed && ++misses == 1000) {
            throw PreconditionError("generator settings never survive arc consistency");
        }
    }
    return out;
}

std::optional<Solution> brute_force_solve(const Instance& inst)
{
    check_space(inst);
    if (inst.wiped_out())
        return std::nullopt;
    std::optional<Solution> out;
    enumerate_solutions(inst, [&](const Assignment& s) {
        out = s;
        return false;
    });
    return out;
}

std::uint64_t count_solutions(const Instance& inst)
{
    check_space(inst);
    if (inst.wiped_out())
        return 0;
    std::uint64_t c = 0;
    enumerate_solutions(inst, [&](const Assignment&) {
        ++c;
        return true;
    });
    return c;
}

namespace {

FixpointResult run_naive(const Instance& inst, Rule rule, bool with_ns)
{
    if (!is_arc_consistent(inst))
        throw PreconditionError("naive fixpoint requires an arc-consistent instance");
    FixpointResult res{inst, {}};
    Instance& cur = res.instance;
    if (with_ns)
        res.trace.add_deletions(ns_fixpoint(cur));
    bool changed = true;
    while (changed) {
        changed = false;
        for (Var i = 0; i < cur.num_vars(); ++i) {
            if (!cur.active(i))
                continue;
            auto w = check_rule(cur, rule, i);
            if (!w)
                continue;
            res.trace.records.push_back(make_record(cur, rule, i, std::move(*w)));
            auto r = eliminate_variable(cur, i);
            res.trace.add_deletions(r.log);
            if (with_ns)
                res.trace.add_deletions(ns_fixpoint(cur));
            changed = true;
            break;
        }
    }
    return res;
}

} // namespace

FixpointResult naive_fixpoint(const Instance& inst, Rule rule) { return run_naive(inst, rule, false); }

FixpointResult naive_fixpoint_ns(const Instance& inst, Rule rule) { return run_naive(inst, rule, true); }

namespace {

// Number of other variables whose relation with i, restricted to live values, is not full.
std::size_t semantic_degree(const Instance& inst, Var i)
{
    std::size_t deg = 0;
    for (Var j : inst.partners(i)) {
        bool full = true;
        for (Value a : inst.values(i))
            if (!inst.domain(j).is_subset_of(inst.row(i, a, j))) {
                full = false;
                break;
            }
        deg += full ? 0 : 1;
    }
    return deg;
}

struct IsoSearch {
    const Instance& a;
    const Instance& b;
    std::size_t n;
    std::vector<std::size_t> deg_a, deg_b;
    // support count of each value against the whole instance
    std::vector<std::vector<std::size_t>> sig_a, sig_b;
    std::vector<Var> sigma;
    std::vector<std::vector<Value>> pi;
    std::vector<bool> used;

    static std::vector<std::vector<std::size_t>> signatures(const Instance& inst)
    {
        std::vector<std::vector<std::size_t>> s(inst.num_vars());
        for (Var i = 0; i < inst.num_vars(); ++i) {
            s[i].assign(inst.universe_size(i), 0);
            for (Value v = 0; v < inst.universe_size(i); ++v)
                for (Var j = 0; j < inst.num_vars(); ++j)
                    if (j != i)
                        s[i][v] += inst.row(i, v, j).count_and(inst.domain(j));
        }
        return s;
    }

    IsoSearch(const Instance& x, const Instance& y) : a(x), b(y), n(x.num_vars())
    {
        for (Var i = 0; i < n; ++i) {
            deg_a.push_back(semantic_degree(a, i));
            deg_b.push_back(semantic_degree(b, i));
        }
        sig_a = signatures(a);
        sig_b = signatures(b);
        sigma.assign(n, 0);
        pi.assign(n, {});
        used.assign(n, false);
    }

    bool consistent(Var p) const
    {
        const Var q = sigma[p];
        for (Var r = 0; r < p; ++r)
            for (Value x = 0; x < a.universe_size(p); ++x)
                for (Value y = 0; y < a.universe_size(r); ++y)
                    if (a.allowed(p, x, r, y) != b.allowed(q, pi[p][x], sigma[r], pi[r][y]))
                        return false;
        return true;
    }

    bool search(Var p)
    {
        if (p == n)
            return true;
        const auto dp = a.universe_size(p);
        for (Var q = 0; q < n; ++q) {
            if (used[q] || b.universe_size(q) != dp || deg_b[q] != deg_a[p])
                continue;
            std::vector<Value> perm(dp);
            std::iota(perm.begin(), perm.end(), Value{0});
            used[q] = true;
            sigma[p] = q;
            do {
                bool sig_ok = true;
                for (Value x = 0; x < dp && sig_ok; ++x)
                    sig_ok = sig_a[p][x] == sig_b[q][perm[x]];
                if (!sig_ok)
                    continue;
                pi[p] = perm;
                if (consistent(p) && search(p + 1))
                    return true;
            } while (std::next_permutation(perm.begin(), perm.end()));
            used[q] = false;
        }
        return false;
    }
};

} // namespace

bool are_isomorphic(const Instance& x, const Instance& y)
{
    if (x.num_active() > 7 || y.num_active() > 7)
        throw SizeGuardError("isomorphism test limited to 7 variables");
    const Instance a = compact(x), b = compact(y);
    if (a.num_vars() != b.num_vars())
        return false;
    std::vector<std::size_t> da, db;
    for (Var i = 0; i < a.num_vars(); ++i) {
        da.push_back(a.universe_size(i));
        db.push_back(b.universe_size(i));
    }
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    if (da != db)
        return false;
    IsoSearch s(a, b);
    return s.search(0);
}

std::size_t max_eliminations_by_order(const Instance& inst, Rule rule, bool with_ns)
{
    if (inst.num_active() > 7)
        throw SizeGuardError("elimination-order search limited to 7 variables");
    Instance start = compact(inst);
    if (with_ns)
        ns_fixpoint(start);
    // Without NS and on AC input the reached instance depends only on the eliminated set.
    const bool memo_ok = !with_ns && is_arc_consistent(start);
    std::unordered_map<std::uint64_t, std::size_t> memo;

    auto rec = [&](auto&& self, const Instance& cur, std::uint64_t mask) -> std::size_t {
        if (memo_ok)
            if (auto it = memo.find(mask); it != memo.end())
                return it->second;
        std::size_t best = 0;
        for (Var i = 0; i < cur.num_vars(); ++i) {
            if (!cur.active(i) || !check_rule(cur, rule, i))
                continue;
            Instance next = cur;
            eliminate_variable(next, i);
            if (with_ns)
                ns_fixpoint(next);
            best = std::max(best, 1 + self(self, next, mask | (std::uint64_t{1} << i)));
        }
        if (memo_ok)
            memo[mask] = best;
        return best;
    };
    return rec(rec, start, 0);
}

} // namespace varelim
