#include "varelim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "varelim/consistency.hpp"
#include "varelim/patterns.hpp"
#include "varelim/solver.hpp"
#include "varelim/verify.hpp"

namespace varelim {

namespace {

constexpr std::size_t kBuckets = 100;

std::map<std::string, Rule> engine_rule_map()
{
    std::map<std::string, Rule> m;
    for (Rule r : kEngineRules)
        m.emplace(rule_name(r), r);
    return m;
}

std::vector<Rule> parse_rule_list(const std::string& text)
{
    std::vector<Rule> out;
    std::istringstream in(text);
    for (std::string name; std::getline(in, name, ',');) {
        const auto r = parse_rule(name);
        if (!r || r == Rule::singleton)
            throw CLI::ValidationError("--rules", "unknown rule " + name);
        out.push_back(*r);
    }
    if (out.empty())
        throw CLI::ValidationError("--rules", "no rule given");
    return out;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw Error("cannot write " + path);
    return f;
}

std::string instance_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

struct PreprocessArgs {
    std::string input;
    std::string rule = "none";
    std::string out;
    std::string trace;
    bool ns = false;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out)
{
    const auto inst = load_instance_file(a.input);
    std::optional<Rule> rule;
    if (a.rule != "none")
        rule = parse_rule(a.rule);
    const auto pre = preprocess(inst, rule, a.ns);

    nlohmann::ordered_json elims = nlohmann::ordered_json::object();
    for (const auto& r : pre.trace.records) {
        auto& c = elims[std::string(rule_name(r.rule))];
        c = c.is_null() ? 1 : c.get<int>() + 1;
    }
    nlohmann::ordered_json report;
    report["instance"] = instance_id(a.input);
    report["rule"] = a.rule;
    report["ns"] = a.ns;
    report["variables_before"] = inst.num_active();
    report["variables_after"] = pre.reduced.num_active();
    report["values_deleted"] = pre.trace.deletions.size();
    report["eliminations"] = elims;
    report["time"] = {{"ac", pre.time_ac}, {"elimination", pre.time_elim}};
    report["verdict"] = pre.sat ? "reduced" : "unsat";
    out << report.dump(2) << '\n';

    if (!a.out.empty() && pre.sat) {
        auto f = open_out(a.out);
        save_instance(pre.reduced, f);
    }
    if (!a.trace.empty()) {
        auto f = open_out(a.trace);
        write_trace(inst, pre.trace, f);
    }
    return pre.sat ? kExitOk : kExitUnsat;
}

struct SolveArgs {
    std::string input;
    std::string rule = "none";
    SearchConfig search;
    std::string log;
    std::string out;
};

void write_solution(const Instance& inst, Verdict v, const std::optional<Solution>& s, std::ostream& out)
{
    out << "verdict " << verdict_name(v) << '\n';
    if (!s)
        return;
    for (Var i = 0; i < inst.num_vars(); ++i)
        out << "value " << i << ' ' << inst.label(i, s->at(i)) << '\n';
}

int cmd_solve(const SolveArgs& a, std::ostream& out)
{
    const auto inst = load_instance_file(a.input);
    std::ofstream logf;
    if (!a.log.empty())
        logf = open_out(a.log);
    std::ostream* log = a.log.empty() ? nullptr : &logf;

    Verdict verdict;
    std::optional<Solution> sol;
    if (a.rule == "none") {
        auto r = mac_solve(inst, a.search, log);
        verdict = r.verdict;
        sol = std::move(r.solution);
    } else {
        auto r = solve_with_preprocessing(inst, parse_rule(a.rule), a.search, log);
        verdict = r.verdict;
        sol = std::move(r.solution);
    }
    write_solution(inst, verdict, sol, out);
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        write_solution(inst, verdict, sol, f);
    }
    switch (verdict) {
    case Verdict::sat:
        return kExitOk;
    case Verdict::unsat:
        return kExitUnsat;
    case Verdict::timeout:
        return kExitTimeout;
    }
    return kExitError;
}

struct VerifyArgs {
    std::vector<Rule> rules{std::begin(kEngineRules), std::end(kEngineRules)};
    std::size_t count = 500;
    std::uint64_t seed = 1;
    GeneratorConfig gen;
    bool fixed = false;
    bool serial = false;
    bool fault = false;
    std::string out;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err)
{
    VerifyConfig cfg;
    cfg.rules = a.rules;
    cfg.count = a.count;
    cfg.seed = a.seed;
    if (a.fixed)
        cfg.generator = a.gen;
    cfg.parallel = !a.serial;
    cfg.fault = a.fault ? EngineFault::skip_branch : EngineFault::none;

    const auto rows = run_verification(cfg);
    if (a.out.empty()) {
        write_verify_csv(rows, out);
    } else {
        auto f = open_out(a.out);
        write_verify_csv(rows, f);
    }
    std::size_t bad = 0;
    for (const auto& r : rows) {
        if (!r.discrepancy())
            continue;
        ++bad;
        err << "discrepancy: seed " << r.seed << " rule " << rule_name(r.rule);
        if (!r.error.empty())
            err << ": " << r.error;
        err << '\n';
    }
    if (bad)
        err << bad << " of " << rows.size() << " rows disagree\n";
    return bad ? kExitError : kExitOk;
}

struct CompareArgs {
    std::vector<Rule> rules{std::begin(kEngineRules), std::end(kEngineRules)};
    std::vector<std::string> inputs;
    bool raw = false;
};

std::size_t bucket(std::size_t x) { return std::clamp<std::size_t>(x, 1, kBuckets) - 1; }

int cmd_compare(const CompareArgs& a, std::ostream& out)
{
    out << "instance,rule,n,eliminated,pct";
    for (const char* h : {"dom_", "deg_"})
        for (std::size_t b = 1; b <= kBuckets; ++b)
            out << ',' << h << b;
    out << '\n';

    for (const auto& path : a.inputs) {
        const auto inst = load_instance_file(path);
        for (Rule rule : a.rules) {
            std::vector<Var> elim;
            if (a.raw) {
                for (Var i : inst.active_vars())
                    if (check_rule(inst, rule, i))
                        elim.push_back(i);
            } else {
                for (const auto& r : preprocess(inst, rule).trace.records)
                    if (r.rule == rule)
                        elim.push_back(r.var);
            }
            std::vector<std::size_t> dom(kBuckets), deg(kBuckets);
            for (Var i : elim) {
                ++dom[bucket(inst.domain_size(i))];
                ++deg[bucket(inst.neighbors(i).size())];
            }
            const std::size_t n = inst.num_vars();
            const double pct = n ? 100.0 * static_cast<double>(elim.size()) / static_cast<double>(n) : 0.0;
            out << instance_id(path) << ',' << rule_name(rule) << ',' << n << ',' << elim.size() << ',' << pct;
            for (auto c : dom)
                out << ',' << c;
            for (auto c : deg)
                out << ',' << c;
            out << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variable elimination preprocessing for binary CSPs", "varelim"};
    app.require_subcommand(1);
    auto with_none = engine_rule_map();
    with_none.emplace("none", Rule::singleton);

    PreprocessArgs pa;
    auto* pre = app.add_subcommand("preprocess", "AC, singleton elimination and one rule's fixpoint");
    pre->add_option("input", pa.input, "BCSP instance")->required()->check(CLI::ExistingFile);
    pre->add_option("--rule", pa.rule, "elimination rule, or none")
        ->check(CLI::IsMember(with_none));
    pre->add_option("--out", pa.out, "write the reduced instance here");
    pre->add_option("--trace", pa.trace, "write the elimination trace here");
    pre->add_flag("--ns", pa.ns, "neighbourhood substitution after every elimination");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "MAC search, optionally after preprocessing");
    solve->add_option("input", sa.input, "BCSP instance")->required()->check(CLI::ExistingFile);
    solve->add_option("--rule", sa.rule, "elimination rule, or none")
        ->check(CLI::IsMember(with_none))
        ->capture_default_str();
    solve->add_option("--budget", sa.search.initial_budget, "backtracks before the first restart")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    solve->add_option("--factor", sa.search.factor, "restart budget growth")->capture_default_str();
    solve->add_option("--time-limit", sa.search.time_limit, "seconds, 0 for none")->check(CLI::NonNegativeNumber);
    solve->add_option("--seed", sa.search.seed, "tie-break seed, 0 for index order");
    solve->add_option("--search-log", sa.log, "write restart and verdict lines here");
    solve->add_option("--out", sa.out, "write the solution here");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "engines against the naive oracle on a random battery");
    verify->add_option_function<std::string>("--rules", [&](const std::string& v) { va.rules = parse_rule_list(v); },
                                      "comma-separated rules");
    verify->add_option("--count", va.count, "battery size")->capture_default_str();
    verify->add_option("--seed", va.seed, "first seed")->capture_default_str();
    auto* gn = verify->add_option("--n", va.gen.n, "variables (fixes all generator settings)");
    auto* gd = verify->add_option("--d", va.gen.d, "domain size");
    auto* g1 = verify->add_option("--p1", va.gen.p1, "constraint density")->check(CLI::Range(0.0, 1.0));
    auto* g2 = verify->add_option("--p2", va.gen.p2, "tightness")->check(CLI::Range(0.0, 1.0));
    verify->add_flag("--serial", va.serial, "disable the parallel fan-out");
    verify->add_flag("--inject-fault", va.fault)->group("");
    verify->add_option("--out", va.out, "write the CSV here instead of stdout");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "eliminated counts and histograms per rule");
    compare->add_option_function<std::string>("--rules", [&](const std::string& v) { ca.rules = parse_rule_list(v); },
                                      "comma-separated rules");
    compare->add_option("inputs", ca.inputs, "BCSP instances")->required()->check(CLI::ExistingFile);
    compare->add_flag("--raw-checkers", ca.raw, "run the checkers on the instance as given, without AC");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }
    va.fixed = gn->count() || gd->count() || g1->count() || g2->count();

    try {
        if (*pre)
            return cmd_preprocess(pa, out);
        if (*solve)
            return cmd_solve(sa, out);
        if (*verify)
            return cmd_verify(va, out, err);
        return cmd_compare(ca, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace varelim
