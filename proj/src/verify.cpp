#include "varelim/verify.hpp"

#include <algorithm>
#include <ostream>

#include "varelim/errors.hpp"
#include "varelim/solver.hpp"

namespace varelim {

namespace {

std::vector<Var> sorted(std::vector<Var> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

VerifyRow verify_case(const BatteryCase& c, Rule rule, EngineFault fault)
{
    VerifyRow row;
    row.seed = c.config.seed;
    row.rule = rule;
    try {
        const auto naive = naive_fixpoint(c.instance, rule);
        const auto eng = run_engine(c.instance, rule, {nullptr, fault});
        row.n_eliminated_naive = naive.trace.records.size();
        row.n_eliminated_engine = eng.trace.records.size();
        const bool same_set = rule == Rule::triangle ? eng.trace.eliminated() == naive.trace.eliminated()
                                                     : sorted(eng.trace.eliminated()) == sorted(naive.trace.eliminated());
        row.same_result = same_set && eng.instance == naive.instance;

        row.sat_before = brute_force_solve(c.instance).has_value();
        const auto reduced = brute_force_solve(eng.instance);
        row.sat_after = reduced.has_value();
        if (reduced) {
            try {
                row.reconstruction_ok = is_solution(c.instance, reconstruct_solution(c.instance, eng.trace, *reduced));
            } catch (const ReconstructionError&) {
                row.reconstruction_ok = false;
            }
        }
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

void put(std::ostream& out, const std::optional<bool>& b)
{
    if (b)
        out << (*b ? 1 : 0);
}

} // namespace

bool VerifyRow::discrepancy() const
{
    return !error.empty() || !same_result || sat_before != sat_after ||
           (reconstruction_ok.has_value() && !*reconstruction_ok);
}

std::vector<VerifyRow> run_verification(const VerifyConfig& cfg)
{
    const auto cases = ac_battery(cfg.count, cfg.seed, cfg.generator);
    const std::size_t nr = cfg.rules.size();
    const auto total = static_cast<std::int64_t>(cases.size() * nr);
    std::vector<VerifyRow> rows(cases.size() * nr);

#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (std::int64_t t = 0; t < total; ++t) {
        const auto k = static_cast<std::size_t>(t);
        rows[k] = verify_case(cases[k / nr], cfg.rules[k % nr], cfg.fault);
    }
    return rows;
}

void write_verify_csv(const std::vector<VerifyRow>& rows, std::ostream& out)
{
    out << "seed,rule,n_eliminated_naive,n_eliminated_engine,sat_before,sat_after,reconstruction_ok\n";
    for (const auto& r : rows) {
        out << r.seed << ',' << rule_name(r.rule) << ',';
        if (r.error.empty())
            out << r.n_eliminated_naive << ',' << r.n_eliminated_engine;
        else
            out << ',';
        out << ',';
        put(out, r.sat_before);
        out << ',';
        put(out, r.sat_after);
        out << ',';
        put(out, r.reconstruction_ok);
        out << '\n';
    }
}

} // namespace varelim
