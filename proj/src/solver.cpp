#include "varelim/solver.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "varelim/consistency.hpp"
#include "varelim/engines.hpp"
#include "varelim/oracle.hpp"

namespace varelim {

std::string_view verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::sat:
        return "sat";
    case Verdict::unsat:
        return "unsat";
    case Verdict::timeout:
        return "timeout";
    }
    return "?";
}

std::uint64_t restart_budget(std::uint64_t initial, double factor, std::uint64_t k)
{
    if (initial < 1 || !(factor > 1))
        throw PreconditionError("restart budget needs initial >= 1 and factor > 1");
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t q : {1, 10, 100, 1000}) {
        const auto p = static_cast<std::uint64_t>(std::llround(factor * static_cast<double>(q)));
        if (std::fabs(static_cast<double>(p) / static_cast<double>(q) - factor) > 1e-12)
            continue;
        using u128 = unsigned __int128;
        const u128 limit = u128{1} << 120;
        u128 num = initial, den = 1;
        bool exact = true;
        for (std::uint64_t i = 0; i < k; ++i) {
            if (num > limit / p || den > limit / q) {
                exact = false;
                break;
            }
            num *= p;
            den *= q;
        }
        if (exact) {
            const u128 v = num / den;
            return v > kMax ? kMax : static_cast<std::uint64_t>(v);
        }
        break;
    }
    const long double x = static_cast<long double>(initial) * std::pow(static_cast<long double>(factor), k);
    if (x >= static_cast<long double>(kMax))
        return kMax;
    return static_cast<std::uint64_t>(std::floor(x));
}

namespace {

using Clock = std::chrono::steady_clock;

/// dom/wdeg order: negative if (d1,w1) is preferred. A variable without
/// weighted constraints ranks after every weighted one.
int compare_scores(std::uint64_t d1, std::uint64_t w1, std::uint64_t d2, std::uint64_t w2)
{
    if ((w1 == 0) != (w2 == 0))
        return w1 == 0 ? 1 : -1;
    if (w1 == 0)
        return d1 < d2 ? -1 : (d1 > d2 ? 1 : 0);
    using u128 = unsigned __int128;
    const u128 l = u128{d1} * w2, r = u128{d2} * w1;
    return l < r ? -1 : (l > r ? 1 : 0);
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Mac {
public:
    Mac(const Instance& inst, const SearchConfig& cfg) : inst_(inst), cfg_(cfg)
    {
        const auto n = inst.num_vars();
        vars_ = inst.active_vars();
        dom_.resize(n);
        adj_.resize(n);
        tie_.assign(n, 0);
        std::map<std::pair<Var, Var>, std::size_t> cid;
        for (Var i : vars_) {
            dom_[i] = inst.domain(i);
            for (Var j : inst.neighbors(i)) {
                auto key = std::minmax(i, j);
                auto [it, fresh] = cid.try_emplace({key.first, key.second}, cid.size());
                adj_[i].push_back({j, it->second});
            }
        }
        weight_.assign(cid.size(), 1);
        if (cfg.seed != 0) {
            std::mt19937_64 rng(cfg.seed);
            for (auto& t : tie_)
                t = rng();
        }
        if (cfg.time_limit > 0)
            deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(cfg.time_limit));
    }

    SearchResult run(std::ostream* log)
    {
        SearchResult res;
        if (inst_.wiped_out() || !propagate(vars_)) {
            res.verdict = Verdict::unsat;
        } else {
            const auto root = trail_.size();
            for (std::uint64_t k = 0;; ++k) {
                budget_ = restart_budget(cfg_.initial_budget, cfg_.factor, k);
                res.budgets.push_back(budget_);
                if (log)
                    *log << "restart " << k << ' ' << budget_ << '\n';
                run_backtracks_ = 0;
                const auto r = dfs();
                if (r != Outcome::restart) {
                    res.verdict = r == Outcome::sat ? Verdict::sat
                                  : r == Outcome::unsat ? Verdict::unsat
                                                        : Verdict::timeout;
                    break;
                }
                undo(root);
            }
        }
        res.backtracks = backtracks_;
        if (res.verdict == Verdict::sat)
            res.solution = solution_;
        if (log)
            *log << "backtracks " << res.backtracks << '\n' << "verdict " << verdict_name(res.verdict) << '\n';
        return res;
    }

private:
    enum class Outcome { sat, unsat, restart, timeout };

    struct Arc {
        Var other;
        std::size_t cid;
    };

    void save(Var x) { trail_.emplace_back(x, dom_[x]); }

    void undo(std::size_t mark)
    {
        while (trail_.size() > mark) {
            dom_[trail_.back().first] = std::move(trail_.back().second);
            trail_.pop_back();
        }
    }

    bool propagate(const std::vector<Var>& changed)
    {
        std::deque<Var> q(changed.begin(), changed.end());
        std::vector<std::uint8_t> inq(dom_.size(), 0);
        for (Var v : changed)
            inq[v] = 1;
        while (!q.empty()) {
            const Var y = q.front();
            q.pop_front();
            inq[y] = 0;
            for (const auto& [x, c] : adj_[y]) {
                Bitset nd = dom_[x];
                bool changed_x = false;
                dom_[x].for_each([&](std::size_t a) {
                    if (!inst_.row(x, static_cast<Value>(a), y).intersects(dom_[y])) {
                        nd.reset(a);
                        changed_x = true;
                    }
                });
                if (!changed_x)
                    continue;
                save(x);
                dom_[x] = std::move(nd);
                if (dom_[x].none()) {
                    ++weight_[c];
                    return false;
                }
                if (!inq[x]) {
                    inq[x] = 1;
                    q.push_back(x);
                }
            }
        }
        return true;
    }

    std::optional<Var> select() const
    {
        std::optional<Var> best;
        std::uint64_t bd = 0, bw = 0;
        for (Var x : vars_) {
            const auto d = dom_[x].count();
            if (d <= 1)
                continue;
            std::uint64_t w = 0;
            for (const auto& [y, c] : adj_[x])
                if (dom_[y].count() > 1)
                    w += weight_[c];
            if (!best) {
                best = x;
                bd = d;
                bw = w;
                continue;
            }
            const int c = compare_scores(d, w, bd, bw);
            if (c < 0 || (c == 0 && tie_[x] < tie_[*best])) {
                best = x;
                bd = d;
                bw = w;
            }
        }
        return best;
    }

    Outcome dfs()
    {
        if (deadline_ && Clock::now() > *deadline_)
            return Outcome::timeout;
        const auto x = select();
        if (!x) {
            solution_ = Solution(inst_.num_vars());
            for (Var v : vars_)
                solution_.set(v, static_cast<Value>(dom_[v].first()));
            return Outcome::sat;
        }
        const auto a = dom_[*x].first();
        for (int branch = 0; branch < 2; ++branch) {
            const auto mark = trail_.size();
            save(*x);
            if (branch == 0) {
                dom_[*x].reset_all();
                dom_[*x].set(a);
            } else {
                dom_[*x].reset(a);
            }
            if (propagate({*x})) {
                const auto r = dfs();
                if (r != Outcome::unsat)
                    return r;
            }
            undo(mark);
            ++backtracks_;
            ++run_backtracks_;
            if (branch == 0 && run_backtracks_ > budget_)
                return Outcome::restart;
        }
        return Outcome::unsat;
    }

    const Instance& inst_;
    const SearchConfig& cfg_;
    std::vector<Var> vars_;
    std::vector<Bitset> dom_;
    std::vector<std::vector<Arc>> adj_;
    std::vector<std::uint64_t> weight_;
    std::vector<std::uint64_t> tie_;
    std::vector<std::pair<Var, Bitset>> trail_;
    std::optional<Clock::time_point> deadline_;
    std::uint64_t budget_ = 0;
    std::uint64_t backtracks_ = 0;
    std::uint64_t run_backtracks_ = 0;
    Solution solution_;
};

const RelationSnapshot* snapshot_for(const EliminationRecord& r, Var j)
{
    for (const auto& s : r.relations)
        if (s.neighbor == j)
            return &s;
    return nullptr;
}

bool snap_allows(const RelationSnapshot& s, Value vi, Value vj)
{
    for (const auto& [a, b] : s.allowed)
        if (a == vi && b == vj)
            return true;
    return false;
}

/// Variables assigned in `s` whose value conflicts with vi per the snapshot.
std::vector<Var> conflicts(const EliminationRecord& r, const Solution& s, Value vi)
{
    std::vector<Var> out;
    for (const auto& snap : r.relations)
        if (s.has(snap.neighbor) && !snap_allows(snap, vi, s.at(snap.neighbor)))
            out.push_back(snap.neighbor);
    return out;
}

} // namespace

SearchResult mac_solve(const Instance& inst, const SearchConfig& cfg, std::ostream* log)
{
    if (cfg.initial_budget < 1 || !(cfg.factor > 1) || cfg.time_limit < 0)
        throw PreconditionError("invalid search configuration");
    Mac mac(inst, cfg);
    return mac.run(log);
}

Solution reconstruct_solution(const Instance& original, const EliminationTrace& trace, const Solution& reduced)
{
    if (reduced.size() != original.num_vars())
        throw ReconstructionError("solution size does not match the instance");
    Solution s = reduced;
    for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
        const auto& r = *it;
        if (r.var >= original.num_vars())
            throw ReconstructionError("trace names an unknown variable");
        for (const auto& snap : r.relations)
            if (snap.neighbor >= original.num_vars())
                throw ReconstructionError("trace names an unknown variable");
        switch (r.rule) {
        case Rule::singleton:
            s.set(r.var, std::get<SingletonWitness>(r.witness).vi);
            break;
        case Rule::triangle: {
            const auto& w = std::get<TriangleWitness>(r.witness);
            if (!s.has(w.j))
                throw ReconstructionError("justifying variable is unassigned");
            bool found = false;
            for (const auto& [vj, vi] : w.v_map)
                if (vj == s.at(w.j)) {
                    s.set(r.var, vi);
                    found = true;
                    break;
                }
            if (!found)
                throw ReconstructionError("triangle map has no entry for the justifier's value");
            break;
        }
        case Rule::bt_degree:
        case Rule::aebtp: {
            bool found = false;
            for (Value a : r.domain)
                if (conflicts(r, s, a).empty()) {
                    s.set(r.var, a);
                    found = true;
                    break;
                }
            if (!found)
                throw ReconstructionError("no compatible value for variable " + std::to_string(r.var));
            break;
        }
        case Rule::de_snake: {
            const auto& w = std::get<DESnakeWitness>(r.witness);
            std::vector<std::pair<Var, Value>> repl;
            for (Var j : conflicts(r, s, w.vi)) {
                bool found = false;
                for (const auto& [mj, mv, mu] : w.u_map)
                    if (mj == j && mv == s.at(j)) {
                        repl.emplace_back(j, mu);
                        found = true;
                        break;
                    }
                if (!found)
                    throw ReconstructionError("substitution map has no entry for variable " + std::to_string(j));
            }
            s.set(r.var, w.vi);
            for (auto [j, u] : repl)
                s.set(j, u);
            break;
        }
        case Rule::exists_snake: {
            const Value vi = std::get<SnakeWitness>(r.witness).vi;
            std::vector<std::pair<Var, Value>> repl;
            for (Var j : conflicts(r, s, vi)) {
                const auto* snap = snapshot_for(r, j);
                std::optional<Value> best;
                for (const auto& [a, b] : snap->allowed)
                    if (a == vi && (!best || b < *best))
                        best = b;
                if (!best)
                    throw ReconstructionError("no value compatible with the witness for variable " +
                                              std::to_string(j));
                repl.emplace_back(j, *best);
            }
            s.set(r.var, vi);
            for (auto [j, u] : repl)
                s.set(j, u);
            break;
        }
        }
    }
    if (!is_solution(original, s))
        throw ReconstructionError("reconstructed assignment is not a solution");
    return s;
}

PreprocessResult preprocess(const Instance& inst, std::optional<Rule> rule, bool with_ns)
{
    PreprocessResult res;
    const auto t0 = Clock::now();
    Instance work = inst;
    while (res.sat) {
        auto ac = enforce_ac(work);
        res.ac_deletions += ac.log.size();
        res.trace.add_deletions(ac.log);
        if (!(res.sat = ac.sat))
            break;
        auto sg = eliminate_singletons(work);
        const bool none = sg.trace.records.empty();
        res.trace.append(sg.trace);
        if (!(res.sat = sg.sat) || none)
            break;
    }
    res.time_ac = seconds_since(t0);
    const auto t1 = Clock::now();
    if (res.sat && rule) {
        auto fx = with_ns ? naive_fixpoint_ns(work, *rule) : run_engine(work, *rule);
        res.trace.append(fx.trace);
        work = std::move(fx.instance);
    }
    res.time_elim = seconds_since(t1);
    res.reduced = std::move(work);
    return res;
}

PipelineResult solve_with_preprocessing(const Instance& inst, std::optional<Rule> rule, const SearchConfig& cfg,
                                        std::ostream* log)
{
    PipelineResult res;
    auto pre = preprocess(inst, rule);
    res.trace = std::move(pre.trace);
    res.reduced = std::move(pre.reduced);
    res.ac_deletions = pre.ac_deletions;
    res.time_preprocess = pre.time_ac + pre.time_elim;
    if (!pre.sat) {
        if (log)
            *log << "backtracks 0\nverdict unsat\n";
        res.verdict = Verdict::unsat;
        return res;
    }
    const auto t1 = Clock::now();
    auto sr = mac_solve(res.reduced, cfg, log);
    res.time_search = seconds_since(t1);
    res.verdict = sr.verdict;
    res.backtracks = sr.backtracks;
    if (sr.solution)
        res.solution = reconstruct_solution(inst, res.trace, *sr.solution);
    return res;
}

} // namespace varelim
