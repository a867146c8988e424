#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "varelim/consistency.hpp"
#include "varelim/engines.hpp"
#include "varelim/oracle.hpp"
#include "varelim/patterns.hpp"
#include "varelim/solver.hpp"

using namespace varelim;
using namespace fixtures;

namespace {

// floor(100 * 1.1^k) by decimal long multiplication: 100 * 11^k, then drop k digits.
std::uint64_t decimal_budget(unsigned k)
{
    std::vector<int> digits{0, 0, 1}; // least significant first
    for (unsigned i = 0; i < k; ++i) {
        int carry = 0;
        for (auto& d : digits) {
            const int v = d * 11 + carry;
            d = v % 10;
            carry = v / 10;
        }
        while (carry) {
            digits.push_back(carry % 10);
            carry /= 10;
        }
    }
    std::uint64_t out = 0;
    for (std::size_t p = digits.size(); p-- > k;)
        out = out * 10 + static_cast<std::uint64_t>(digits[p]);
    return out;
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("restart budgets")
{
    CHECK(restart_budget(100, 1.1, 0) == 100);
    CHECK(restart_budget(100, 1.1, 1) == 110);
    CHECK(restart_budget(100, 1.1, 2) == 121);
    CHECK(restart_budget(100, 1.1, 3) == 133);
    for (unsigned k = 0; k <= 60; ++k) {
        CAPTURE(k);
        CHECK(restart_budget(100, 1.1, k) == decimal_budget(k));
    }
    CHECK(restart_budget(1, 2.0, 10) == 1024);
    CHECK_THROWS_AS(restart_budget(0, 1.1, 1), PreconditionError);
    CHECK_THROWS_AS(restart_budget(100, 1.0, 1), PreconditionError);
}

TEST_CASE("MAC on fixtures")
{
    std::ostringstream log;
    auto r = mac_solve(star(5), {}, &log);
    CHECK(r.verdict == Verdict::sat);
    CHECK(r.backtracks == 0);
    REQUIRE(r.solution);
    CHECK(is_solution(star(5), *r.solution));
    CHECK(lines(log.str()) == std::vector<std::string>{"restart 0 100", "backtracks 0", "verdict sat"});

    std::ostringstream log2;
    auto u = mac_solve(bt(), {}, &log2);
    CHECK(u.verdict == Verdict::unsat);
    CHECK(u.backtracks == 0);
    CHECK(u.budgets.empty());
    CHECK(lines(log2.str()) == std::vector<std::string>{"backtracks 0", "verdict unsat"});

    Instance empty(std::vector<std::vector<Label>>{});
    CHECK(mac_solve(empty).verdict == Verdict::sat);
}

TEST_CASE("MAC agrees with brute force")
{
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        GeneratorConfig cfg{3 + seed % 8, 2 + seed % 4, 0.3 + 0.1 * static_cast<double>(seed % 5),
                            0.2 + 0.1 * static_cast<double>(seed % 6), seed};
        auto I = random_instance(cfg);
        CAPTURE(seed);
        const bool sat = brute_force_solve(I).has_value();
        for (std::uint64_t tie : {0, 7}) {
            SearchConfig sc;
            sc.seed = tie;
            auto r = mac_solve(I, sc);
            CHECK((r.verdict == Verdict::sat) == sat);
            CHECK(r.verdict != Verdict::timeout);
            if (r.solution)
                CHECK(is_solution(I, *r.solution));
        }
    }
}

TEST_CASE("search log follows the geometric schedule")
{
    // a small initial budget forces restarts on a hard instance
    auto I = random_instance({40, 6, 0.4, 0.35, 11});
    SearchConfig sc;
    sc.initial_budget = 2;
    sc.factor = 1.5;
    std::ostringstream log;
    auto r = mac_solve(I, sc, &log);
    const auto ls = lines(log.str());
    REQUIRE(ls.size() >= 3);
    std::size_t k = 0;
    for (; k + 2 < ls.size(); ++k)
        CHECK(ls[k] == "restart " + std::to_string(k) + " " + std::to_string(restart_budget(2, 1.5, k)));
    CHECK(k == r.budgets.size());
    CHECK(k > 1);
    CHECK(ls[k] == "backtracks " + std::to_string(r.backtracks));
    CHECK(ls[k + 1] == "verdict " + std::string(verdict_name(r.verdict)));
    CHECK(r.verdict != Verdict::timeout);
}

TEST_CASE("time limit")
{
    SearchConfig sc;
    sc.time_limit = 1e-9;
    auto r = mac_solve(star(8), sc);
    CHECK(r.verdict == Verdict::timeout);
    CHECK_FALSE(r.solution);
    sc.factor = 0.5;
    CHECK_THROWS_AS(mac_solve(star(8), sc), PreconditionError);
}

TEST_CASE("reconstruction on the star")
{
    auto S = star(5);
    EliminationTrace t;
    const auto w = check_de_snake(S, 0);
    REQUIRE(w);
    CHECK(w->vi == 0);
    t.records.push_back(make_record(S, Rule::de_snake, 0, *w));
    auto R = S;
    eliminate_variable(R, 0);
    Solution sp(5);
    for (Var k = 1; k < 5; ++k)
        sp.set(k, 0);
    CHECK(is_solution(R, sp));
    const auto s = reconstruct_solution(S, t, sp);
    CHECK(s.at(0) == 0);
    for (Var k = 1; k < 5; ++k)
        CHECK(s.at(k) == 1);

    CHECK(reconstruct_solution(S, {}, *brute_force_solve(S)) == *brute_force_solve(S));
}

TEST_CASE("reconstruction of a pendant")
{
    // x2 hangs on x1
    Instance I({{0, 1}, {0, 1, 2}, {0, 1}});
    I.set_allowed(0, 0, 1, 1, true);
    I.set_allowed(0, 1, 1, 0, true);
    I.set_allowed(0, 1, 1, 2, true);
    I.set_allowed(1, 0, 2, 1, true);
    I.set_allowed(1, 1, 2, 0, true);
    I.set_allowed(1, 2, 2, 0, true);
    REQUIRE(is_arc_consistent(I));
    const auto w = triangle_justified_by(I, 2, 1);
    REQUIRE(w);
    EliminationTrace t;
    t.records.push_back(make_record(I, Rule::triangle, 2, *w));
    auto R = I;
    eliminate_variable(R, 2);
    for (Value a : {0U, 1U})
        for (Value b : {0U, 1U, 2U}) {
            Solution sp(3);
            sp.set(0, a);
            sp.set(1, b);
            if (!is_solution(R, sp))
                continue;
            const auto s = reconstruct_solution(I, t, sp);
            CHECK(s.at(2) == (b == 0 ? 1U : 0U));
        }
}

TEST_CASE("corrupt traces are rejected")
{
    auto S = star(4);
    const auto w = check_de_snake(S, 0);
    EliminationTrace t;
    t.records.push_back(make_record(S, Rule::de_snake, 0, *w));
    std::get<DESnakeWitness>(t.records[0].witness).u_map.clear();
    auto R = S;
    eliminate_variable(R, 0);
    Solution sp(4);
    for (Var k = 1; k < 4; ++k)
        sp.set(k, 0);
    CHECK_THROWS_AS(reconstruct_solution(S, t, sp), ReconstructionError);

    // a record with a wrong witness value produces an invalid assignment
    EliminationTrace t2;
    t2.records.push_back(make_record(S, Rule::singleton, 0, SingletonWitness{0}));
    CHECK_THROWS_AS(reconstruct_solution(S, t2, sp), ReconstructionError);
    CHECK_THROWS_AS(reconstruct_solution(S, t, Solution(2)), ReconstructionError);
}

TEST_CASE("DE-snake reconstruction only changes conflicting variables")
{
    std::size_t steps = 0;
    for (const auto& c : ac_battery(300)) {
        const auto& I = c.instance;
        for (Var i : I.active_vars()) {
            const auto w = check_de_snake(I, i);
            if (!w)
                continue;
            EliminationTrace t;
            t.records.push_back(make_record(I, Rule::de_snake, i, *w));
            auto R = I;
            eliminate_variable(R, i);
            const auto sp = brute_force_solve(R);
            if (!sp)
                continue;
            const auto s = reconstruct_solution(I, t, *sp);
            for (Var j : R.active_vars())
                if (s.at(j) != sp->at(j))
                    CHECK_FALSE(I.allowed(i, w->vi, j, sp->at(j)));
            ++steps;
        }
    }
    CHECK(steps > 100);
}

TEST_CASE("reconstruction across the battery")
{
    for (Rule rule : kEngineRules) {
        CAPTURE(rule_name(rule));
        for (const auto& c : ac_battery(500)) {
            CAPTURE(c.config.seed);
            const auto fx = run_engine(c.instance, rule);
            const auto sp = brute_force_solve(fx.instance);
            CHECK(sp.has_value() == brute_force_solve(c.instance).has_value());
            if (!sp)
                continue;
            Solution s;
            CHECK_NOTHROW(s = reconstruct_solution(c.instance, fx.trace, *sp));
            CHECK(is_solution(c.instance, s));
        }
    }
}

TEST_CASE("pipeline")
{
    auto r = solve_with_preprocessing(bt(), Rule::triangle);
    CHECK(r.verdict == Verdict::unsat);
    CHECK(r.ac_deletions == 2);
    CHECK(r.backtracks == 0);

    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        GeneratorConfig cfg{4 + seed % 6, 2 + seed % 3, 0.5, 0.2 + 0.1 * static_cast<double>(seed % 5), seed};
        auto I = random_instance(cfg);
        CAPTURE(seed);
        const bool sat = brute_force_solve(I).has_value();
        CHECK((mac_solve(I).verdict == Verdict::sat) == sat);
        for (Rule rule : kEngineRules) {
            const auto p = solve_with_preprocessing(I, rule);
            CHECK((p.verdict == Verdict::sat) == sat);
            if (p.solution)
                CHECK(is_solution(I, *p.solution));
            CHECK(p.reduced.num_active() + p.trace.records.size() == I.num_active());
        }
        const auto p = solve_with_preprocessing(I, std::nullopt);
        CHECK((p.verdict == Verdict::sat) == sat);
    }
}
