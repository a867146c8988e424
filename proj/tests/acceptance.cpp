// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "varelim/consistency.hpp"
#include "varelim/engines.hpp"
#include "varelim/oracle.hpp"
#include "varelim/patterns.hpp"
#include "varelim/solver.hpp"

using namespace varelim;
using namespace fixtures;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<BatteryCase>& battery()
{
    static const auto b = ac_battery(500);
    return b;
}

std::vector<Var> sorted(std::vector<Var> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

Outcome oracle_equivalence()
{
    const auto t0 = Clock::now();
    std::size_t bad = 0, runs = 0;
    for (Rule rule : kEngineRules)
        for (const auto& c : battery()) {
            const auto naive = naive_fixpoint(c.instance, rule);
            const auto eng = run_engine(c.instance, rule);
            bad += sorted(naive.trace.eliminated()) != sorted(eng.trace.eliminated()) || !(naive.instance == eng.instance);
            ++runs;
        }
    const double t = seconds_since(t0);
    return {bad == 0 && t < 120, fmt("%zu runs, %zu mismatches, %.1fs", runs, bad, t)};
}

Outcome sat_conservation()
{
    std::size_t bad = 0, runs = 0;
    for (const auto& c : battery()) {
        const bool before = brute_force_solve(c.instance).has_value();
        for (Rule rule : kEngineRules) {
            bad += brute_force_solve(naive_fixpoint(c.instance, rule).instance).has_value() != before;
            bad += brute_force_solve(run_engine(c.instance, rule).instance).has_value() != before;
            runs += 2;
        }
    }
    return {bad == 0, fmt("%zu fixpoints, %zu verdict changes", runs, bad)};
}

Outcome solution_conservation()
{
    std::size_t bad = 0, runs = 0;
    for (const auto& c : battery())
        for (Rule rule : kEngineRules)
            for (const auto& fx : {naive_fixpoint(c.instance, rule), run_engine(c.instance, rule)}) {
                const auto s = brute_force_solve(fx.instance);
                if (!s)
                    continue;
                ++runs;
                try {
                    bad += !is_solution(c.instance, reconstruct_solution(c.instance, fx.trace, *s));
                } catch (const ReconstructionError&) {
                    ++bad;
                }
            }
    return {bad == 0 && runs > 0, fmt("%zu reconstructions, %zu failures", runs, bad)};
}

Outcome star_counts()
{
    std::string detail;
    bool ok = true;
    for (std::size_t n = 5; n <= 8; ++n) {
        auto S = star(n);
        const auto before = count_solutions(S);
        ok = ok && check_de_snake(S, 0).has_value();
        eliminate_variable(S, 0);
        const auto after = count_solutions(S);
        ok = ok && before == 2 && after == (std::uint64_t{1} << (n - 1));
        detail += fmt("%sn=%zu: %llu->%llu", n == 5 ? "" : ", ", n, static_cast<unsigned long long>(before),
                      static_cast<unsigned long long>(after));
    }
    return {ok, detail};
}

Outcome gap_separation()
{
    const auto G = aebtp_gap();
    const bool btd = check_bt_degree_property(G, 2);
    const bool ae = check_aebtp(G, 2);
    return {btd && !ae, fmt("bt-degree %d, aebtp %d on x_m", btd, ae)};
}

Outcome tetra_facts()
{
    const auto T = tetra();
    const auto n = enumerate_broken_triangles(T, TM).size();
    const auto a = bt_degree(T, TI, 0, TM, U2), b = bt_degree(T, TJ, 0, TM, U1);
    const auto c = bt_degree(T, TI, 0, TM, U), d = bt_degree(T, TJ, 0, TM, U);
    const bool f = check_1fbtp(T, TM);
    return {n == 3 && a == 2 && b == 2 && c == 1 && d == 1 && !f,
            fmt("%zu broken triangles, degrees %zu %zu %zu %zu, 1-fbtp %d", n, a, b, c, d, f)};
}

Outcome subsumption()
{
    std::size_t snake = 0, btp = 0, poly = 0, vars = 0;
    for (const auto& c : battery())
        for (Var i : c.instance.active_vars()) {
            const auto& I = c.instance;
            ++vars;
            snake += check_exists_snake(I, i) && !check_de_snake(I, i);
            const bool btd = check_bt_degree_property(I, i);
            btp += check_aebtp(I, i) && !btd;
            poly += btd && !check_ae_broken_polyhedron(I, i, 3);
        }
    return {snake + btp + poly == 0, fmt("%zu variables; counterexamples %zu %zu %zu", vars, snake, btp, poly)};
}

// Copies the relations of `inst` into a fresh instance, adding the value
// `extra` at x0 compatible with everything when requested.
Instance with_universal_value(const Instance& inst)
{
    std::vector<std::vector<Label>> doms;
    for (Var i = 0; i < inst.num_vars(); ++i)
        doms.push_back(inst.labels(i));
    const Label extra = *std::max_element(doms[0].begin(), doms[0].end()) + 1;
    doms[0].push_back(extra);
    const auto u = static_cast<Value>(doms[0].size() - 1);
    Instance J(doms);
    for (Var i = 0; i < inst.num_vars(); ++i)
        for (Var j = i + 1; j < inst.num_vars(); ++j) {
            if (!inst.has_relation(i, j))
                continue;
            J.add_relation(i, j);
            for (Value a : inst.values(i))
                for (Value b : inst.values(j))
                    J.set_allowed(i, a, j, b, inst.allowed(i, a, j, b));
            if (i == 0)
                for (Value b : inst.values(j))
                    J.set_allowed(0, u, j, b, true);
        }
    return J;
}

// Keeps only the edge x0-x_last among the relations of x_last.
Instance with_pendant(const Instance& inst)
{
    const auto last = static_cast<Var>(inst.num_vars() - 1);
    std::vector<std::vector<Label>> doms;
    for (Var i = 0; i < inst.num_vars(); ++i)
        doms.push_back(inst.labels(i));
    Instance J(doms);
    for (Var i = 0; i < inst.num_vars(); ++i)
        for (Var j = i + 1; j < inst.num_vars(); ++j) {
            if (!inst.has_relation(i, j) || (j == last && i != 0))
                continue;
            J.add_relation(i, j);
            for (Value a : inst.values(i))
                for (Value b : inst.values(j))
                    J.set_allowed(i, a, j, b, inst.allowed(i, a, j, b));
        }
    return J;
}

Outcome incomparability()
{
    const std::vector<std::pair<const char*, std::function<bool(const Instance&, Var)>>> rules{
        {"snake", [](const Instance& I, Var i) { return check_exists_snake(I, i).has_value(); }},
        {"triangle", [](const Instance& I, Var i) { return check_triangle(I, i).has_value(); }},
        {"aebtp", [](const Instance& I, Var i) { return check_aebtp(I, i); }},
        {"1-fbtp", [](const Instance& I, Var i) { return check_1fbtp(I, i); }},
    };
    const std::size_t R = rules.size();
    std::vector<bool> found(R * R, false);
    auto scan = [&](const Instance& I, Var i) {
        std::vector<bool> acc(R);
        for (std::size_t r = 0; r < R; ++r)
            acc[r] = rules[r].second(I, i);
        for (std::size_t a = 0; a < R; ++a)
            for (std::size_t b = 0; b < R; ++b)
                if (a != b && acc[a] && !acc[b])
                    found[a * R + b] = true;
    };

    std::size_t generic = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto U = with_universal_value(random_instance({5, 3, 0.7, 0.5, seed}));
        if (enforce_ac(U).sat && U.active(0)) {
            scan(U, 0);
            ++generic;
        }
        auto P = with_pendant(random_instance({5, 3, 0.6, 0.4, seed}));
        if (P.has_relation(0, 4) && enforce_ac(P).sat) {
            scan(P, 4);
            ++generic;
        }
    }
    std::size_t searched = 0;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
        GeneratorConfig cfg{3 + seed % 4, 2 + seed % 3, 0.5 + 0.1 * static_cast<double>(seed % 6),
                            0.1 + 0.1 * static_cast<double>(seed % 7), seed};
        auto I = random_instance(cfg);
        if (!enforce_ac(I).sat)
            continue;
        ++searched;
        for (Var i : I.active_vars())
            scan(I, i);
    }
    std::string missing;
    for (std::size_t a = 0; a < R; ++a)
        for (std::size_t b = 0; b < R; ++b)
            if (a != b && !found[a * R + b])
                missing += std::string(" ") + rules[a].first + ">" + rules[b].first;
    const auto hits = static_cast<std::size_t>(std::count(found.begin(), found.end(), true));
    return {missing.empty(), fmt("%zu/%zu directions, %zu constructions, %zu random instances", hits, R * (R - 1),
                                 generic, searched) + (missing.empty() ? "" : ", missing" + missing)};
}

Outcome hereditary_confluence()
{
    std::size_t bad = 0, cases = 0, elim = 0;
    for (std::uint64_t seed = 1; cases < 100; ++seed) {
        auto I = random_instance({3 + seed % 4, 2 + seed % 2, 0.6, 0.2 + 0.1 * static_cast<double>(seed % 4), seed});
        if (!enforce_ac(I).sat)
            continue;
        ++cases;
        for (Rule rule : {Rule::exists_snake, Rule::de_snake, Rule::aebtp, Rule::bt_degree}) {
            const auto greedy = naive_fixpoint(I, rule).trace.records.size();
            elim += greedy;
            bad += max_eliminations_by_order(I, rule) != greedy;
        }
    }
    return {bad == 0, fmt("%zu instances, %zu greedy eliminations, %zu mismatches", cases, elim, bad)};
}

// x_last is a copy of x_0 through a random bijection, tied to it by that
// bijection, so the two justify each other.
Instance with_twin(const Instance& base, std::mt19937_64& rng)
{
    const Var n = static_cast<Var>(base.num_vars());
    std::vector<std::vector<Label>> doms;
    for (Var i = 0; i < n; ++i)
        doms.push_back(base.labels(i));
    doms.push_back(base.labels(0));
    std::vector<Value> pi(base.universe_size(0));
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    Instance J(doms);
    for (Var i = 0; i < n; ++i)
        for (Var j = i + 1; j < n; ++j) {
            if (!base.has_relation(i, j))
                continue;
            J.add_relation(i, j);
            if (i == 0)
                J.add_relation(n, j);
            for (Value a : base.values(i))
                for (Value b : base.values(j)) {
                    J.set_allowed(i, a, j, b, base.allowed(i, a, j, b));
                    if (i == 0)
                        J.set_allowed(n, pi[a], j, b, base.allowed(0, a, j, b));
                }
        }
    J.add_relation(0, n);
    for (Value a = 0; a < pi.size(); ++a)
        J.set_allowed(0, a, n, pi[a], true);
    return J;
}

Outcome triangle_ns_confluence()
{
    std::mt19937_64 rng(5);
    std::size_t pairs = 0, natural = 0, bad = 0;
    auto check_pair = [&](const Instance& I, Var i, Var m) {
        auto A = I, B = I;
        eliminate_variable(A, i);
        ns_fixpoint(A);
        eliminate_variable(B, m);
        ns_fixpoint(B);
        ++pairs;
        bad += !are_isomorphic(A, B);
    };
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        auto base = random_instance({3 + seed % 3, 2 + seed % 2, 0.6, 0.3, seed});
        if (!enforce_ac(base).sat)
            continue;
        auto I = with_twin(base, rng);
        const Var n = static_cast<Var>(I.num_vars() - 1);
        if (!enforce_ac(I).sat || !I.active(0) || !I.active(n))
            continue;
        if (!triangle_justified_by(I, 0, n) || !triangle_justified_by(I, n, 0)) {
            ++bad;
            continue;
        }
        check_pair(I, 0, n);
        for (Var i : I.active_vars())
            for (Var m : I.active_vars())
                if (i < m && !(i == 0 && m == n) && triangle_justified_by(I, i, m) && triangle_justified_by(I, m, i)) {
                    check_pair(I, i, m);
                    ++natural;
                }
    }
    return {bad == 0 && pairs > 100,
            fmt("%zu mutual pairs (%zu beyond the twins), %zu non-isomorphic", pairs, natural, bad)};
}

Outcome tree_reduction()
{
    std::size_t trees = 0, bad = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const std::size_t n = 2 + seed % 29;
        auto T = random_tree_instance(n, 2 + seed % 4, 0.2 + 0.1 * static_cast<double>(seed % 4), seed);
        if (!enforce_ac(T).sat)
            continue;
        ++trees;
        bad += run_engine(T, Rule::triangle).instance.num_active() != 1;
    }
    return {bad == 0 && trees > 100, fmt("%zu AC trees with n<=30, %zu not reduced to one variable", trees, bad)};
}

// floor(100 * 1.1^k) from 100 * 11^k in decimal digits.
std::uint64_t decimal_budget(unsigned k)
{
    std::vector<int> digits{0, 0, 1};
    for (unsigned i = 0; i < k; ++i) {
        int carry = 0;
        for (auto& d : digits) {
            const int v = d * 11 + carry;
            d = v % 10;
            carry = v / 10;
        }
        for (; carry; carry /= 10)
            digits.push_back(carry % 10);
    }
    std::uint64_t out = 0;
    for (std::size_t p = digits.size(); p-- > k;)
        out = out * 10 + static_cast<std::uint64_t>(digits[p]);
    return out;
}

Outcome mac_equivalence()
{
    std::size_t bad = 0, runs = 0;
    for (const auto& c : battery()) {
        const bool sat = brute_force_solve(c.instance).has_value();
        const auto r = mac_solve(c.instance);
        bad += (r.verdict == Verdict::sat) != sat || (r.solution && !is_solution(c.instance, *r.solution));
        ++runs;
        for (Rule rule : kEngineRules) {
            const auto p = solve_with_preprocessing(c.instance, rule);
            bad += (p.verdict == Verdict::sat) != sat || (p.solution && !is_solution(c.instance, *p.solution));
            ++runs;
        }
    }

    // the default schedule on instances that need restarts
    std::size_t logs = 0, restarts = 0, badlog = 0;
    for (std::uint64_t seed = 1; seed <= 40 && logs < 5; ++seed) {
        const auto I = random_instance({35, 8, 0.5, 0.25, seed});
        std::ostringstream log;
        const auto r = mac_solve(I, {}, &log);
        if (r.budgets.size() < 4)
            continue;
        ++logs;
        std::istringstream in(log.str());
        std::string line;
        unsigned k = 0;
        for (; std::getline(in, line) && line.rfind("restart", 0) == 0; ++k) {
            ++restarts;
            badlog += line != "restart " + std::to_string(k) + " " + std::to_string(decimal_budget(k));
        }
        badlog += k != r.budgets.size() || line != "backtracks " + std::to_string(r.backtracks);
    }
    return {bad == 0 && logs > 0 && badlog == 0,
            fmt("%zu runs, %zu verdict errors; %zu logs, %zu restart lines, %zu off-schedule", runs, bad, logs,
                restarts, badlog)};
}

Outcome scaling()
{
    // loose to tight: from almost everything eliminated to almost nothing
    bool ok = true;
    std::string detail;
    for (double p2 : {0.05, 0.1, 0.3}) {
        Instance I(std::vector<std::vector<Label>>{});
        for (std::uint64_t seed = 1;; ++seed) {
            I = random_instance({100, 10, 300.0 / 4950.0, p2, seed});
            if (enforce_ac(I).sat)
                break;
        }
        double worst = 0;
        std::size_t least = I.num_vars(), most = 0;
        for (Rule rule : kEngineRules) {
            const auto t0 = Clock::now();
            const auto n = run_engine(I, rule).trace.records.size();
            worst = std::max(worst, seconds_since(t0));
            least = std::min(least, n);
            most = std::max(most, n);
        }
        ok = ok && worst < 10.0;
        detail += fmt("%sp2=%.2f: %zu constraints, slowest %.2fs, %zu-%zu eliminated", detail.empty() ? "" : "; ", p2,
                      I.num_constraints(), worst, least, most);
    }
    return {ok, detail};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"engine fixpoints equal naive fixpoints", oracle_equivalence},
        {"fixpoints conserve satisfiability", sat_conservation},
        {"reconstructed solutions validate", solution_conservation},
        {"star solution counts after eliminating the centre", star_counts},
        {"bt-degree accepts and aebtp rejects the gap variable", gap_separation},
        {"tetrahedron broken triangles and degrees", tetra_facts},
        {"subsumption between rules", subsumption},
        {"pairwise incomparability witnesses", incomparability},
        {"hereditary rules are confluent", hereditary_confluence},
        {"mutual triangle eliminations agree after NS", triangle_ns_confluence},
        {"AC trees reduce to one variable", tree_reduction},
        {"MAC verdicts and restart schedule", mac_equivalence},
        {"engines scale to n=100, d=10", scaling},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s (%s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
