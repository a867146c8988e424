#include "varelim/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace varelim {

std::string_view rule_name(Rule r)
{
    switch (r) {
    case Rule::exists_snake:
        return "exists-snake";
    case Rule::de_snake:
        return "de-snake";
    case Rule::triangle:
        return "triangle";
    case Rule::bt_degree:
        return "bt-degree";
    case Rule::aebtp:
        return "aebtp";
    case Rule::singleton:
        return "singleton";
    }
    return "?";
}

std::optional<Rule> parse_rule(std::string_view s)
{
    for (Rule r : {Rule::exists_snake, Rule::de_snake, Rule::triangle, Rule::bt_degree, Rule::aebtp, Rule::singleton})
        if (rule_name(r) == s)
            return r;
    return std::nullopt;
}

std::string_view cause_name(DeletionCause c)
{
    switch (c) {
    case DeletionCause::ac:
        return "ac";
    case DeletionCause::elim:
        return "elim";
    case DeletionCause::ns:
        return "ns";
    }
    return "?";
}

void EliminationTrace::append(const EliminationTrace& o)
{
    const auto base = records.size();
    records.insert(records.end(), o.records.begin(), o.records.end());
    for (auto d : o.deletions) {
        d.after += base;
        deletions.push_back(d);
    }
}

std::vector<Var> EliminationTrace::eliminated() const
{
    std::vector<Var> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back(r.var);
    return out;
}

EliminationRecord make_record(const Instance& inst, Rule rule, Var i, RuleWitness w)
{
    EliminationRecord rec{rule, i, std::move(w), inst.values(i), {}};
    for (Var j : inst.neighbors(i)) {
        RelationSnapshot snap{j, {}};
        for (Value a : rec.domain)
            (inst.row(i, a, j) & inst.domain(j)).for_each([&](std::size_t b) {
                snap.allowed.emplace_back(a, static_cast<Value>(b));
            });
        rec.relations.push_back(std::move(snap));
    }
    return rec;
}

void write_trace(const Instance& inst, const EliminationTrace& t, std::ostream& out)
{
    out << "TRACE 1\n";
    std::size_t di = 0;
    auto flush_deletions = [&](std::size_t upto) {
        for (; di < t.deletions.size() && t.deletions[di].after <= upto; ++di) {
            const auto& d = t.deletions[di].del;
            out << "del " << d.var << ' ' << inst.label(d.var, d.value) << ' ' << cause_name(d.cause) << '\n';
        }
    };
    for (std::size_t r = 0; r < t.records.size(); ++r) {
        flush_deletions(r);
        const auto& rec = t.records[r];
        const Var i = rec.var;
        out << "elim " << rule_name(rec.rule) << ' ' << i << '\n';
        out << "witness";
        std::visit(
            [&](const auto& w) {
                using W = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<W, SnakeWitness> || std::is_same_v<W, SingletonWitness>) {
                    out << ' ' << inst.label(i, w.vi);
                } else if constexpr (std::is_same_v<W, DESnakeWitness>) {
                    out << ' ' << inst.label(i, w.vi);
                    for (auto [j, vj, uj] : w.u_map)
                        out << " umap " << j << ' ' << inst.label(j, vj) << ' ' << inst.label(j, uj);
                } else if constexpr (std::is_same_v<W, TriangleWitness>) {
                    out << " just " << w.j;
                    for (auto [vj, vi] : w.v_map)
                        out << " vmap " << inst.label(w.j, vj) << ' ' << inst.label(i, vi);
                }
            },
            rec.witness);
        out << '\n';
        out << "snapvar " << i << ' ' << rec.domain.size();
        for (Value a : rec.domain)
            out << ' ' << inst.label(i, a);
        out << '\n';
        for (const auto& s : rec.relations) {
            out << "snaprel " << s.neighbor << ' ' << s.allowed.size() << '\n';
            for (auto [a, b] : s.allowed)
                out << inst.label(i, a) << ' ' << inst.label(s.neighbor, b) << '\n';
        }
    }
    flush_deletions(t.records.size());
    out << "end\n";
}

namespace {

struct TraceReader {
    const Instance& inst;
    std::istream& in;
    std::size_t line_no = 0;

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

    [[noreturn]] void fail(const std::string& m) const { throw ParseError(line_no, m); }

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

    Var var(const std::string& s) const
    {
        auto v = integer(s);
        if (v < 0 || static_cast<std::size_t>(v) >= inst.num_vars())
            fail("trace variable does not belong to the instance: " + s);
        return static_cast<Var>(v);
    }

    Value value(Var i, const std::string& s) const
    {
        auto v = inst.value_of(i, integer(s));
        if (!v)
            fail("trace value " + s + " not in domain of variable " + std::to_string(i));
        return *v;
    }
};

} // namespace

EliminationTrace read_trace(const Instance& inst, std::istream& in)
{
    TraceReader rd{inst, in};
    std::vector<std::string> t;
    if (!rd.next(t) || t.size() != 2 || t[0] != "TRACE" || t[1] != "1")
        rd.fail("expected header 'TRACE 1'");
    EliminationTrace tr;
    bool ended = false;
    while (rd.next(t)) {
        if (t[0] == "end") {
            ended = true;
            break;
        }
        if (t[0] == "del") {
            if (t.size() != 4)
                rd.fail("expected 'del <var> <value> <cause>'");
            Var v = rd.var(t[1]);
            Value a = rd.value(v, t[2]);
            DeletionCause c;
            if (t[3] == "ac")
                c = DeletionCause::ac;
            else if (t[3] == "elim")
                c = DeletionCause::elim;
            else if (t[3] == "ns")
                c = DeletionCause::ns;
            else
                rd.fail("unknown deletion cause '" + t[3] + "'");
            tr.deletions.push_back({tr.records.size(), {v, a, c}});
            continue;
        }
        if (t[0] != "elim" || t.size() != 3)
            rd.fail("expected 'elim <rule> <var>'");
        auto rule = parse_rule(t[1]);
        if (!rule)
            rd.fail("unknown rule '" + t[1] + "'");
        const Var i = rd.var(t[2]);

        if (!rd.next(t) || t[0] != "witness")
            rd.fail("expected 'witness' line");
        RuleWitness w;
        switch (*rule) {
        case Rule::exists_snake:
        case Rule::singleton: {
            if (t.size() != 2)
                rd.fail("expected 'witness <value>'");
            Value a = rd.value(i, t[1]);
            if (*rule == Rule::singleton)
                w = SingletonWitness{a};
            else
                w = SnakeWitness{a};
            break;
        }
        case Rule::de_snake: {
            if (t.size() < 2 || (t.size() - 2) % 4 != 0)
                rd.fail("malformed de-snake witness");
            DESnakeWitness d{rd.value(i, t[1]), {}};
            for (std::size_t p = 2; p < t.size(); p += 4) {
                if (t[p] != "umap")
                    rd.fail("expected 'umap'");
                Var j = rd.var(t[p + 1]);
                d.u_map.emplace_back(j, rd.value(j, t[p + 2]), rd.value(j, t[p + 3]));
            }
            w = std::move(d);
            break;
        }
        case Rule::triangle: {
            if (t.size() < 3 || t[1] != "just" || (t.size() - 3) % 3 != 0)
                rd.fail("malformed triangle witness");
            TriangleWitness tw{rd.var(t[2]), {}};
            for (std::size_t p = 3; p < t.size(); p += 3) {
                if (t[p] != "vmap")
                    rd.fail("expected 'vmap'");
                tw.v_map.emplace_back(rd.value(tw.j, t[p + 1]), rd.value(i, t[p + 2]));
            }
            w = std::move(tw);
            break;
        }
        case Rule::bt_degree:
        case Rule::aebtp:
            if (t.size() != 1)
                rd.fail("unexpected witness tokens");
            w = ExtensionWitness{};
            break;
        }

        if (!rd.next(t) || t[0] != "snapvar" || t.size() < 3)
            rd.fail("expected 'snapvar' line");
        if (rd.var(t[1]) != i)
            rd.fail("snapvar variable does not match elim");
        auto k = rd.integer(t[2]);
        if (k < 0 || static_cast<std::size_t>(k) != t.size() - 3)
            rd.fail("snapvar count mismatch");
        EliminationRecord rec{*rule, i, std::move(w), {}, {}};
        for (std::size_t p = 3; p < t.size(); ++p)
            rec.domain.push_back(rd.value(i, t[p]));

        // snaprel blocks until the next record keyword
        while (true) {
            auto pos = in.tellg();
            auto saved_line = rd.line_no;
            if (!rd.next(t))
                rd.fail("missing 'end'");
            if (t[0] != "snaprel") {
                in.seekg(pos);
                rd.line_no = saved_line;
                break;
            }
            if (t.size() != 3)
                rd.fail("expected 'snaprel <neighbor> <t>'");
            RelationSnapshot s{rd.var(t[1]), {}};
            if (s.neighbor == i)
                rd.fail("snaprel toward the eliminated variable");
            auto cnt = rd.integer(t[2]);
            if (cnt < 0)
                rd.fail("negative tuple count");
            for (std::int64_t p = 0; p < cnt; ++p) {
                if (!rd.next(t) || t.size() != 2)
                    rd.fail("expected '<a> <b>' pair");
                s.allowed.emplace_back(rd.value(i, t[0]), rd.value(s.neighbor, t[1]));
            }
            rec.relations.push_back(std::move(s));
        }
        tr.records.push_back(std::move(rec));
    }
    if (!ended)
        rd.fail("missing 'end'");
    return tr;
}

} // namespace varelim
