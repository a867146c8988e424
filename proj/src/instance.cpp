#include "varelim/instance.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace varelim {

Instance::Instance(const std::vector<std::vector<Label>>& domains)
    : labels_(domains), active_(domains.size(), true), num_active_(domains.size()),
      rel_of_(domains.size() * domains.size(), -1), partners_(domains.size())
{
    domain_.reserve(domains.size());
    full_.reserve(domains.size());
    for (const auto& d : domains) {
        domain_.emplace_back(d.size(), true);
        full_.emplace_back(d.size(), true);
    }
}

std::vector<Var> Instance::active_vars() const
{
    std::vector<Var> out;
    out.reserve(num_active_);
    for (Var i = 0; i < num_vars(); ++i)
        if (active_[i])
            out.push_back(i);
    return out;
}

std::vector<Value> Instance::values(Var i) const
{
    std::vector<Value> out;
    domain_[i].for_each([&](std::size_t a) { out.push_back(static_cast<Value>(a)); });
    return out;
}

std::size_t Instance::max_domain_size() const
{
    std::size_t d = 0;
    for (Var i = 0; i < num_vars(); ++i)
        if (active_[i])
            d = std::max(d, domain_size(i));
    return d;
}

std::optional<Value> Instance::value_of(Var i, Label l) const
{
    const auto& ls = labels_[i];
    for (std::size_t a = 0; a < ls.size(); ++a)
        if (ls[a] == l)
            return static_cast<Value>(a);
    return std::nullopt;
}

std::size_t Instance::num_constraints() const
{
    std::size_t e = 0;
    for (Var i = 0; i < num_vars(); ++i) {
        if (!active_[i])
            continue;
        for (Var j : partners_[i])
            if (j > i && active_[j])
                ++e;
    }
    return e;
}

void Instance::add_relation(Var i, Var j)
{
    if (i == j)
        throw PreconditionError("relation on a single variable");
    if (has_relation(i, j))
        return;
    Var lo = std::min(i, j), hi = std::max(i, j);
    Relation rel;
    rel.lo_rows.assign(universe_size(lo), Bitset(universe_size(hi)));
    rel.hi_rows.assign(universe_size(hi), Bitset(universe_size(lo)));
    auto idx = static_cast<std::int32_t>(relations_.size());
    relations_.push_back(std::move(rel));
    rel_of_[static_cast<std::size_t>(i) * num_vars() + j] = idx;
    rel_of_[static_cast<std::size_t>(j) * num_vars() + i] = idx;
    auto insert_sorted = [](std::vector<Var>& v, Var x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); };
    insert_sorted(partners_[i], j);
    insert_sorted(partners_[j], i);
}

void Instance::set_allowed(Var i, Value a, Var j, Value b, bool allowed)
{
    add_relation(i, j);
    auto& rel = relations_[static_cast<std::size_t>(rel_index(i, j))];
    if (i > j) {
        std::swap(i, j);
        std::swap(a, b);
    }
    rel.lo_rows[a].assign(b, allowed);
    rel.hi_rows[b].assign(a, allowed);
}

bool Instance::compatible(Var i, Value a, Var j, Value b) const
{
    if (i == j)
        throw PreconditionError("compatible: same variable");
    if (i >= num_vars() || j >= num_vars())
        throw PreconditionError("compatible: variable out of range");
    if (!in_domain(i, a) || !in_domain(j, b))
        throw PreconditionError("compatible: value not in domain");
    return allowed(i, a, j, b);
}

std::vector<Var> Instance::neighbors(Var i) const
{
    std::vector<Var> out;
    for (Var j : partners_[i])
        if (active_[j])
            out.push_back(j);
    return out;
}

void Instance::deactivate(Var i)
{
    if (active_[i]) {
        active_[i] = false;
        --num_active_;
    }
}

bool Instance::wiped_out() const
{
    for (Var i = 0; i < num_vars(); ++i)
        if (active_[i] && domain_[i].none())
            return true;
    return false;
}

bool operator==(const Instance& a, const Instance& b)
{
    if (a.num_vars() != b.num_vars())
        return false;
    const auto n = static_cast<Var>(a.num_vars());
    for (Var i = 0; i < n; ++i) {
        if (a.active(i) != b.active(i))
            return false;
        if (!a.active(i))
            continue;
        if (a.domain_size(i) != b.domain_size(i))
            return false;
        std::vector<Label> la, lb;
        a.domain(i).for_each([&](std::size_t v) { la.push_back(a.label(i, static_cast<Value>(v))); });
        b.domain(i).for_each([&](std::size_t v) { lb.push_back(b.label(i, static_cast<Value>(v))); });
        if (la != lb)
            return false;
    }
    for (Var i = 0; i < n; ++i) {
        if (!a.active(i))
            continue;
        const auto va = a.values(i), vb = b.values(i);
        for (Var j = i + 1; j < n; ++j) {
            if (!a.active(j))
                continue;
            const auto wa = a.values(j), wb = b.values(j);
            for (std::size_t x = 0; x < va.size(); ++x)
                for (std::size_t y = 0; y < wa.size(); ++y)
                    if (a.allowed(i, va[x], j, wa[y]) != b.allowed(i, vb[x], j, wb[y]))
                        return false;
        }
    }
    return true;
}

bool is_solution(const Instance& inst, const Assignment& s)
{
    if (s.size() != inst.num_vars())
        return false;
    for (Var i = 0; i < inst.num_vars(); ++i) {
        if (!inst.active(i))
            continue;
        if (!s.has(i) || !inst.in_domain(i, s.at(i)))
            return false;
    }
    for (Var i = 0; i < inst.num_vars(); ++i) {
        if (!inst.active(i))
            continue;
        for (Var j : inst.partners(i))
            if (j > i && inst.active(j) && !inst.allowed(i, s.at(i), j, s.at(j)))
                return false;
    }
    return true;
}

Instance compact(const Instance& inst, std::vector<Var>* origin)
{
    std::vector<Var> keep = inst.active_vars();
    std::vector<std::int64_t> new_id(inst.num_vars(), -1);
    std::vector<std::vector<Value>> vals(keep.size());
    std::vector<std::vector<Label>> doms(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        new_id[keep[k]] = static_cast<std::int64_t>(k);
        vals[k] = inst.values(keep[k]);
        for (Value a : vals[k])
            doms[k].push_back(inst.label(keep[k], a));
    }
    Instance out(doms);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        Var i = keep[k];
        for (Var j : inst.partners(i)) {
            if (j < i || new_id[j] < 0)
                continue;
            auto kj = static_cast<std::size_t>(new_id[j]);
            out.add_relation(static_cast<Var>(k), static_cast<Var>(kj));
            for (std::size_t x = 0; x < vals[k].size(); ++x)
                for (std::size_t y = 0; y < vals[kj].size(); ++y)
                    if (inst.allowed(i, vals[k][x], j, vals[kj][y]))
                        out.set_allowed(static_cast<Var>(k), static_cast<Value>(x), static_cast<Var>(kj),
                                        static_cast<Value>(y), true);
        }
    }
    if (origin)
        *origin = keep;
    return out;
}

namespace {

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    // Next non-empty line with comments stripped, tokenised. False at EOF.
    bool next(std::vector<std::string>& toks)
    {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto p = line.find('#'); p != std::string::npos)
                line.erase(p);
            std::istringstream ss(line);
            toks.clear();
            std::string t;
            while (ss >> t)
                toks.push_back(t);
            if (!toks.empty())
                return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_no, msg); }

    std::int64_t integer(const std::string& s) const
    {
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            fail("expected integer, got '" + s + "'");
        }
        if (pos != s.size())
            fail("expected integer, got '" + s + "'");
        return v;
    }
};

} // namespace

Instance load_instance(std::istream& in)
{
    LineReader rd{in};
    std::vector<std::string> t;
    if (!rd.next(t) || t.size() != 2 || t[0] != "BCSP" || t[1] != "1")
        rd.fail("expected header 'BCSP 1'");
    if (!rd.next(t) || t.size() != 2 || t[0] != "vars")
        rd.fail("expected 'vars <n>'");
    auto n = rd.integer(t[1]);
    if (n < 0)
        rd.fail("negative variable count");
    const auto nv = static_cast<std::size_t>(n);

    std::vector<std::vector<Label>> doms(nv);
    std::vector<bool> seen(nv, false);
    std::size_t declared = 0;
    struct Con {
        Var i, j;
        std::vector<std::pair<Label, Label>> pairs;
        std::size_t line;
    };
    std::vector<Con> cons;
    std::map<std::pair<Var, Var>, std::size_t> con_seen;
    bool ended = false;

    auto var_index = [&](const std::string& s) {
        auto v = rd.integer(s);
        if (v < 0 || static_cast<std::size_t>(v) >= nv)
            rd.fail("variable index out of range: " + s);
        return static_cast<Var>(v);
    };

    while (rd.next(t)) {
        if (t[0] == "end") {
            if (t.size() != 1)
                rd.fail("trailing tokens after 'end'");
            ended = true;
            break;
        }
        if (t[0] == "dom") {
            if (t.size() < 3)
                rd.fail("expected 'dom <i> <k> <values...>'");
            Var i = var_index(t[1]);
            if (seen[i])
                rd.fail("duplicate domain for variable " + t[1]);
            auto k = rd.integer(t[2]);
            if (k < 0 || static_cast<std::size_t>(k) != t.size() - 3)
                rd.fail("domain size does not match value count");
            for (std::size_t p = 3; p < t.size(); ++p) {
                auto v = rd.integer(t[p]);
                if (v < 0)
                    rd.fail("negative domain value");
                if (std::find(doms[i].begin(), doms[i].end(), v) != doms[i].end())
                    rd.fail("duplicate value in domain");
                doms[i].push_back(v);
            }
            seen[i] = true;
            ++declared;
        } else if (t[0] == "con") {
            if (t.size() != 4)
                rd.fail("expected 'con <i> <j> <t>'");
            Var i = var_index(t[1]), j = var_index(t[2]);
            if (i == j)
                rd.fail("constraint on a single variable");
            if (!seen[i] || !seen[j])
                rd.fail("constraint before domain declaration");
            auto key = std::make_pair(std::min(i, j), std::max(i, j));
            if (con_seen.count(key))
                rd.fail("duplicate constraint");
            con_seen[key] = cons.size();
            auto cnt = rd.integer(t[3]);
            if (cnt < 0)
                rd.fail("negative tuple count");
            Con c{i, j, {}, rd.line_no};
            for (std::int64_t p = 0; p < cnt; ++p) {
                if (!rd.next(t))
                    rd.fail("unexpected end of input inside constraint");
                if (t.size() != 2)
                    rd.fail("expected '<a> <b>' pair");
                auto a = rd.integer(t[0]), b = rd.integer(t[1]);
                if (std::find(doms[i].begin(), doms[i].end(), a) == doms[i].end() ||
                    std::find(doms[j].begin(), doms[j].end(), b) == doms[j].end())
                    rd.fail("value not in declared domain");
                c.pairs.emplace_back(a, b);
            }
            cons.push_back(std::move(c));
        } else {
            rd.fail("unknown directive '" + t[0] + "'");
        }
    }
    if (!ended)
        rd.fail("missing 'end'");
    if (declared != nv)
        rd.fail("missing domain declaration");

    Instance inst(doms);
    for (const auto& c : cons) {
        inst.add_relation(c.i, c.j);
        for (auto [a, b] : c.pairs)
            inst.set_allowed(c.i, *inst.value_of(c.i, a), c.j, *inst.value_of(c.j, b), true);
    }
    return inst;
}

Instance parse_instance(const std::string& text)
{
    std::istringstream ss(text);
    return load_instance(ss);
}

Instance load_instance_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open " + path);
    return load_instance(f);
}

void save_instance(const Instance& inst, std::ostream& out)
{
    std::vector<Var> origin;
    Instance c = compact(inst, &origin);
    out << "BCSP 1\n";
    if (origin.size() != inst.num_vars())
        for (std::size_t k = 0; k < origin.size(); ++k)
            out << "# origin " << k << ' ' << origin[k] << '\n';
    out << "vars " << c.num_vars() << '\n';
    for (Var i = 0; i < c.num_vars(); ++i) {
        out << "dom " << i << ' ' << c.universe_size(i);
        for (Label l : c.labels(i))
            out << ' ' << l;
        out << '\n';
    }
    for (Var i = 0; i < c.num_vars(); ++i) {
        for (Var j : c.partners(i)) {
            if (j < i)
                continue;
            std::vector<std::pair<Value, Value>> pairs;
            for (Value a = 0; a < c.universe_size(i); ++a)
                c.row(i, a, j).for_each([&](std::size_t b) { pairs.emplace_back(a, static_cast<Value>(b)); });
            out << "con " << i << ' ' << j << ' ' << pairs.size() << '\n';
            for (auto [a, b] : pairs)
                out << c.label(i, a) << ' ' << c.label(j, b) << '\n';
        }
    }
    out << "end\n";
}

std::string to_text(const Instance& inst)
{
    std::ostringstream ss;
    save_instance(inst, ss);
    return ss.str();
}

} // namespace varelim
