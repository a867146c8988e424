#include "varelim/engines.hpp"

#include <algorithm>
#include <deque>
#include <initializer_list>
#include <memory>
#include <optional>

#include "varelim/consistency.hpp"
#include "varelim/patterns.hpp"

namespace varelim {

std::size_t EngineAudit::count(AuditEvent ev) const
{
    return static_cast<std::size_t>(
        std::count_if(records_.begin(), records_.end(), [&](const AuditRecord& r) { return r.event == ev; }));
}

std::size_t EngineAudit::max_per_key(AuditEvent ev) const
{
    std::map<std::pair<std::string, std::vector<std::uint32_t>>, std::size_t> seen;
    std::size_t best = 0;
    for (const auto& r : records_)
        if (r.event == ev)
            best = std::max(best, ++seen[{r.table, r.key}]);
    return best;
}

namespace {

class EngineBase {
public:
    EngineBase(Instance& inst, const EngineOptions& opt) : inst_(inst), opt_(opt), n_(inst.num_vars())
    {
        nb_.resize(n_);
        vals_.resize(n_);
        slot_.assign(n_ * n_, -1);
        queued_.assign(n_, 0);
        for (Var i = 0; i < n_; ++i) {
            U_ = std::max(U_, inst.universe_size(i));
            if (!inst.active(i))
                continue;
            nb_[i] = inst.neighbors(i);
            vals_[i] = inst.values(i);
            for (std::size_t s = 0; s < nb_[i].size(); ++s)
                slot_[i * n_ + nb_[i][s]] = static_cast<std::int32_t>(s);
        }
    }
    virtual ~EngineBase() = default;

    void start()
    {
        init();
        in_init_ = false;
    }

    virtual std::optional<Var> pop()
    {
        while (!queue_.empty()) {
            const Var k = queue_.front();
            queue_.pop_front();
            queued_[k] = 0;
            if (inst_.active(k))
                return k;
        }
        return std::nullopt;
    }

    virtual RuleWitness witness(Var k) = 0;
    /// Propagation after x_k has been removed from the instance.
    virtual void eliminated(Var k) = 0;

protected:
    virtual void init() = 0;

    void enqueue(Var i)
    {
        if (!inst_.active(i) || queued_[i])
            return;
        queued_[i] = 1;
        queue_.push_back(i);
        audit(AuditEvent::enqueue, "S_ELIM", {i});
    }

    void audit(AuditEvent ev, std::string_view table, std::initializer_list<std::uint32_t> key)
    {
        if (opt_.audit)
            opt_.audit->add(ev, in_init_, table, std::vector<std::uint32_t>(key));
    }

    bool faulty() const { return opt_.fault == EngineFault::skip_branch; }

    std::size_t slot(Var i, Var j) const { return static_cast<std::size_t>(slot_[i * n_ + j]); }
    bool allowed(Var i, Value a, Var j, Value b) const { return inst_.allowed(i, a, j, b); }
    std::size_t usize(Var i) const { return inst_.universe_size(i); }

    Instance& inst_;
    const EngineOptions& opt_;
    std::size_t n_;
    std::size_t U_ = 0; ///< largest value universe
    std::vector<std::vector<Var>> nb_;
    std::vector<std::vector<Value>> vals_;
    std::vector<std::int32_t> slot_;
    std::deque<Var> queue_;
    std::vector<std::uint8_t> queued_;
    bool in_init_ = true;
};

// vars+-(j,vj,vj2): neighbours k of x_j with some v_k compatible with vj
// and not with vj2. Shared by both snake engines.
class SnakeBase : public EngineBase {
public:
    using EngineBase::EngineBase;

protected:
    std::size_t pair_id(Var j, Value vj, Value vj2) const { return vj * usize(j) + vj2; }

    void init_vpm()
    {
        vpm_.resize(n_);
        for (Var j = 0; j < n_; ++j) {
            if (!inst_.active(j))
                continue;
            vpm_[j] = FlatSets(usize(j) * usize(j), nb_[j].size());
            for (Value vj : vals_[j])
                for (Value vj2 : vals_[j]) {
                    if (vj2 == vj)
                        continue;
                    for (std::size_t t = 0; t < nb_[j].size(); ++t) {
                        const Var k = nb_[j][t];
                        if (inst_.row(j, vj, k).any_and_not(inst_.row(j, vj2, k), inst_.domain(k)))
                            vpm_[j].insert(pair_id(j, vj, vj2), t);
                    }
                }
        }
    }

    /// vars+-(j,vj,vj2) minus {x_i} is non-empty.
    bool outside(Var j, Value vj, Value vj2, Var i) const
    {
        const auto id = pair_id(j, vj, vj2);
        return vpm_[j].size(id) > (vpm_[j].contains(id, slot(j, i)) ? 1U : 0U);
    }

    /// Deletes k from every vars+- of its neighbours, reporting the
    /// singleton and empty transitions.
    template <class Single, class Empty>
    void drop_from_vpm(Var k, Single on_single, Empty on_empty)
    {
        for (Var j : nb_[k]) {
            if (!inst_.active(j))
                continue;
            const auto tk = slot(j, k);
            for (Value vj : vals_[j])
                for (Value vj2 : vals_[j]) {
                    if (vj2 == vj)
                        continue;
                    const auto id = pair_id(j, vj, vj2);
                    if (!vpm_[j].erase(id, tk))
                        continue;
                    if (vpm_[j].size(id) == 1)
                        on_single(j, vj, vj2, nb_[j][vpm_[j].first(id)]);
                    else if (vpm_[j].empty(id))
                        on_empty(j, vj, vj2);
                }
        }
    }

    std::vector<FlatSets> vpm_;
};

class ExistsSnakeEngine : public SnakeBase {
public:
    using SnakeBase::SnakeBase;

    RuleWitness witness(Var k) override
    {
        for (Value vi : vals_[k])
            if (bad_[k].empty(vi))
                return SnakeWitness{vi};
        throw Error("exists-snake engine: no witness value");
    }

    void eliminated(Var k) override
    {
        drop_from_vpm(
            k,
            [&](Var j, Value vj, Value vj2, Var i) {
                audit(AuditEvent::branch2, "vars+-", {j, vj, vj2});
                release(i, j, vj, vj2);
            },
            [&](Var j, Value vj, Value vj2) {
                audit(AuditEvent::branch3, "vars+-", {j, vj, vj2});
                if (faulty())
                    return;
                for (Var i : nb_[j])
                    if (inst_.active(i))
                        release(i, j, vj, vj2);
            });
        for (Var i : nb_[k]) {
            if (!inst_.active(i))
                continue;
            const auto s = slot(i, k);
            for (Value vi : vals_[i])
                if (bad_[i].erase(vi, s)) {
                    audit(AuditEvent::table_delta, "badVars", {i, vi, k});
                    if (bad_[i].empty(vi))
                        enqueue(i);
                }
        }
    }

protected:
    void init() override
    {
        init_vpm();
        count_.resize(n_);
        bad_.resize(n_);
        for (Var i = 0; i < n_; ++i) {
            if (!inst_.active(i))
                continue;
            const auto deg = nb_[i].size();
            count_[i].assign(usize(i) * deg, 0);
            bad_[i] = FlatSets(usize(i), deg);
            for (Value vi : vals_[i]) {
                for (std::size_t s = 0; s < deg; ++s) {
                    const Var j = nb_[i][s];
                    std::uint32_t c = 0;
                    for (Value vj : vals_[j]) {
                        if (allowed(j, vj, i, vi))
                            continue;
                        for (Value vj2 : vals_[j])
                            if (vj2 != vj && allowed(j, vj2, i, vi) && outside(j, vj, vj2, i))
                                ++c;
                    }
                    count_[i][vi * deg + s] = c;
                    if (c)
                        bad_[i].insert(vi, s);
                }
                if (bad_[i].empty(vi))
                    enqueue(i);
            }
        }
    }

private:
    void release(Var i, Var j, Value vj, Value vj2)
    {
        const auto s = slot(i, j);
        const auto deg = nb_[i].size();
        for (Value vi : vals_[i]) {
            if (!allowed(j, vj2, i, vi) || allowed(j, vj, i, vi))
                continue;
            if (--count_[i][vi * deg + s] == 0) {
                bad_[i].erase(vi, s);
                audit(AuditEvent::table_delta, "badVars", {i, vi, j});
                if (bad_[i].empty(vi))
                    enqueue(i);
            }
        }
    }

    std::vector<std::vector<std::uint32_t>> count_; ///< countPairs(i,vi,j) at [i][vi*deg+slot]
    std::vector<FlatSets> bad_;                     ///< badVars(i,vi) over neighbour slots
};

class DESnakeEngine : public SnakeBase {
public:
    using SnakeBase::SnakeBase;

    RuleWitness witness(Var k) override
    {
        for (Value vi : vals_[k]) {
            if (!bad_[k].empty(vi))
                continue;
            DESnakeWitness w{vi, {}};
            for (Var j : inst_.neighbors(k))
                for (Value vj : inst_.values(j)) {
                    if (allowed(k, vi, j, vj))
                        continue;
                    auto u = de_snake_substitute(inst_, k, vi, j, vj);
                    if (!u)
                        throw Error("de-snake engine: table and witness disagree");
                    w.u_map.emplace_back(j, vj, *u);
                }
            return w;
        }
        throw Error("de-snake engine: no witness value");
    }

    void eliminated(Var k) override
    {
        drop_from_vpm(
            k,
            [&](Var j, Value vj, Value vj2, Var i) {
                audit(AuditEvent::branch1, "vars+-", {j, vj, vj2});
                release(i, j, vj, vj2);
            },
            [&](Var j, Value vj, Value vj2) {
                audit(AuditEvent::branch2, "vars+-", {j, vj, vj2});
                if (faulty())
                    return;
                for (Var i : nb_[j])
                    if (inst_.active(i))
                        release(i, j, vj, vj2);
            });
        for (Var i : nb_[k]) {
            if (!inst_.active(i))
                continue;
            const auto s = slot(i, k);
            for (Value vi : vals_[i])
                for (Value vk : vals_[k])
                    if (bad_[i].erase(vi, s * U_ + vk)) {
                        audit(AuditEvent::table_delta, "badAssts", {i, vi, k, vk});
                        if (bad_[i].empty(vi))
                            enqueue(i);
                    }
        }
    }

protected:
    void init() override
    {
        init_vpm();
        bad_.resize(n_);
        for (Var i = 0; i < n_; ++i) {
            if (!inst_.active(i))
                continue;
            const auto deg = nb_[i].size();
            bad_[i] = FlatSets(usize(i), deg * U_);
            for (Value vi : vals_[i]) {
                for (std::size_t s = 0; s < deg; ++s) {
                    const Var j = nb_[i][s];
                    for (Value vj : vals_[j]) {
                        if (allowed(i, vi, j, vj))
                            continue;
                        bool sub = false;
                        for (Value vj2 : vals_[j])
                            if (vj2 != vj && allowed(i, vi, j, vj2) && !outside(j, vj, vj2, i)) {
                                sub = true;
                                break;
                            }
                        if (!sub)
                            bad_[i].insert(vi, s * U_ + vj);
                    }
                }
                if (bad_[i].empty(vi))
                    enqueue(i);
            }
        }
    }

private:
    void release(Var i, Var j, Value vj, Value vj2)
    {
        const auto e = slot(i, j) * U_ + vj;
        for (Value vi : vals_[i]) {
            if (!allowed(j, vj2, i, vi) || allowed(j, vj, i, vi))
                continue;
            if (bad_[i].erase(vi, e)) {
                audit(AuditEvent::table_delta, "badAssts", {i, vi, j, vj});
                if (bad_[i].empty(vi))
                    enqueue(i);
            }
        }
    }

    std::vector<FlatSets> bad_; ///< badAssts(i,vi) over (slot, value) pairs
};

// Candidates are the variables with at least one active justifier; the
// smallest candidate is eliminated first, one at a time, so the only
// variable ever due for elimination is the one being removed.
class TriangleEngine : public EngineBase {
public:
    using EngineBase::EngineBase;

    std::optional<Var> pop() override
    {
        for (Var i = 0; i < n_; ++i)
            if (inst_.active(i) && zero_[i] > 0)
                return i;
        return std::nullopt;
    }

    RuleWitness witness(Var k) override
    {
        for (Var j = 0; j < n_; ++j) {
            if (j == k || !inst_.active(j) || count_[k][j] != 0)
                continue;
            auto w = triangle_justified_by(inst_, k, j);
            if (!w)
                throw Error("triangle engine: table and witness disagree");
            return *w;
        }
        throw Error("triangle engine: no justifying variable");
    }

    void eliminated(Var k) override
    {
        for (Var i = 0; i < n_; ++i)
            if (inst_.active(i) && count_[i][k] == 0)
                --zero_[i];
        for (Var i : nb_[k]) {
            if (!inst_.active(i))
                continue;
            const auto s = slot(i, k);
            for (Var j = 0; j < n_; ++j) {
                if (j == i || !inst_.active(j))
                    continue;
                for (Value vj : vals_[j]) {
                    if (supported_[i][j * U_ + vj])
                        continue;
                    for (Value vi : vals_[i]) {
                        const auto id = bad_id(i, j, vj, vi);
                        if (!bad_[i].erase(id, s) || !bad_[i].empty(id))
                            continue;
                        supported_[i][j * U_ + vj] = 1;
                        audit(AuditEvent::branch1, "supported", {j, vj, i});
                        if (!faulty() && --count_[i][j] == 0)
                            justify(i);
                        break;
                    }
                }
            }
        }
    }

protected:
    void init() override
    {
        bad_.resize(n_);
        supported_.resize(n_);
        count_.resize(n_);
        zero_.assign(n_, 0);
        for (Var i = 0; i < n_; ++i) {
            if (!inst_.active(i))
                continue;
            const auto deg = nb_[i].size();
            bad_[i] = FlatSets(n_ * U_ * usize(i), deg);
            supported_[i].assign(n_ * U_, 0);
            count_[i].assign(n_, 0);
            for (Var j = 0; j < n_; ++j) {
                if (j == i || !inst_.active(j))
                    continue;
                std::uint32_t c = 0;
                for (Value vj : vals_[j]) {
                    bool sup = false;
                    for (Value vi : vals_[i]) {
                        if (!allowed(j, vj, i, vi))
                            continue;
                        const auto id = bad_id(i, j, vj, vi);
                        for (std::size_t s = 0; s < deg; ++s) {
                            const Var k = nb_[i][s];
                            if (k != j && inst_.row(j, vj, k).any_and_not(inst_.row(i, vi, k), inst_.domain(k)))
                                bad_[i].insert(id, s);
                        }
                        if (bad_[i].empty(id)) {
                            sup = true;
                            break;
                        }
                    }
                    supported_[i][j * U_ + vj] = sup;
                    if (!sup)
                        ++c;
                }
                count_[i][j] = c;
                if (c == 0)
                    justify(i);
            }
        }
    }

private:
    std::size_t bad_id(Var i, Var j, Value vj, Value vi) const { return (j * U_ + vj) * usize(i) + vi; }

    void justify(Var i)
    {
        if (zero_[i]++ == 0)
            audit(AuditEvent::enqueue, "S_ELIM", {i});
    }

    std::vector<FlatSets> bad_;                         ///< badVars(j,vj,i,vi), per i
    std::vector<std::vector<std::uint8_t>> supported_; ///< supported(j,vj,i) at [i][j*U+vj]
    std::vector<std::vector<std::uint32_t>> count_;    ///< count(j,i) at [i][j]
    std::vector<std::uint32_t> zero_;                  ///< active j with count(j,i) = 0
};

class BTDegreeEngine : public EngineBase {
public:
    using EngineBase::EngineBase;

    RuleWitness witness(Var) override { return ExtensionWitness{}; }

    void eliminated(Var e) override
    {
        for (Var m : nb_[e]) {
            if (!inst_.active(m))
                continue;
            auto& t = tab_[m];
            const auto& nbm = nb_[m];
            const auto es = slot(m, e);
            const auto& dm = inst_.domain(m);
            // bases through x_e no longer exist
            for (std::size_t is = 0; is < t.deg; ++is) {
                if (is == es)
                    continue;
                for (Value vi : vals_[nbm[is]])
                    for (Value ve : vals_[e])
                        if (t.bad.erase(0, base_elem(t, is, vi, es, ve)))
                            audit(AuditEvent::table_delta, "badBases", {m, nbm[is], vi, e, ve});
            }
            for (std::size_t is = 0; is < t.deg; ++is) {
                const Var i = nbm[is];
                if (!inst_.active(i))
                    continue;
                for (Value vi : vals_[i]) {
                    const Bitset& ri = inst_.row(i, vi, m);
                    for (Value vm : vals_[m]) {
                        const auto b = bt_id(t, is, vi, vm);
                        if (!t.btvars.erase(b, es))
                            continue;
                        const auto d = t.btvars.size(b);
                        if (d == 1) {
                            audit(AuditEvent::branch2, "BTvars", {i, vi, m, vm});
                            if (ri.test(vm))
                                continue;
                            for (std::size_t ks = 0; ks < t.deg; ++ks) {
                                const Var k = nbm[ks];
                                if (ks == is || !inst_.active(k))
                                    continue;
                                for (Value vk : vals_[k]) {
                                    if (!allowed(i, vi, k, vk) || !inst_.row(k, vk, m).test(vm))
                                        continue;
                                    if (--t.M[q(t, ks, vk, is, vi)] != 0 || t.M[q(t, is, vi, ks, vk)] == 0)
                                        continue;
                                    t.safe[q(t, is, vi, ks, vk)] = 1;
                                    t.safe[q(t, ks, vk, is, vi)] = 1;
                                    if (ri.intersects(inst_.row(k, vk, m), dm))
                                        drop_base(m, t, is, vi, ks, vk);
                                }
                            }
                        } else if (d == 0) {
                            audit(AuditEvent::branch3, "BTvars", {i, vi, m, vm});
                            if (faulty() || !ri.test(vm))
                                continue;
                            for (std::size_t ks = 0; ks < t.deg; ++ks) {
                                const Var k = nbm[ks];
                                if (ks == is || !inst_.active(k))
                                    continue;
                                for (Value vk : vals_[k])
                                    if (allowed(i, vi, k, vk) && inst_.row(k, vk, m).test(vm))
                                        drop_base(m, t, is, vi, ks, vk);
                            }
                        }
                    }
                }
            }
            if (t.bad.empty(0))
                enqueue(m);
        }
    }

protected:
    void init() override
    {
        tab_.resize(n_);
        for (Var m = 0; m < n_; ++m)
            if (inst_.active(m))
                init_var(m);
    }

private:
    struct Tables {
        std::size_t deg = 0;
        std::size_t um = 0;
        std::vector<std::uint32_t> N;    ///< N+-(i,vi,j,vj,m) at q(is,vi,js,vj)
        std::vector<std::uint32_t> M;    ///< M+-(i,vi,j,vj,m)
        std::vector<std::uint8_t> safe; ///< 3safe(i,vi,j,vj,m)
        FlatSets btvars;                 ///< BTvars(i,vi,m,vm) over slots of x_m
        FlatSets bad;                    ///< badBases(m), one set, bases with is < js
    };

    std::size_t q(const Tables& t, std::size_t is, Value vi, std::size_t js, Value vj) const
    {
        return ((is * U_ + vi) * t.deg + js) * U_ + vj;
    }
    std::size_t bt_id(const Tables& t, std::size_t is, Value vi, Value vm) const { return (is * U_ + vi) * t.um + vm; }
    std::size_t base_elem(const Tables& t, std::size_t is, Value vi, std::size_t js, Value vj) const
    {
        return is < js ? q(t, is, vi, js, vj) : q(t, js, vj, is, vi);
    }

    void drop_base(Var m, Tables& t, std::size_t is, Value vi, std::size_t ks, Value vk)
    {
        if (t.bad.erase(0, base_elem(t, is, vi, ks, vk)))
            audit(AuditEvent::table_delta, "badBases", {m, nb_[m][is], vi, nb_[m][ks], vk});
    }

    void init_var(Var m)
    {
        auto& t = tab_[m];
        const auto& nbm = nb_[m];
        const auto& dm = inst_.domain(m);
        t.deg = nbm.size();
        t.um = usize(m);
        const auto cells = t.deg * U_ * t.deg * U_;
        t.N.assign(cells, 0);
        t.M.assign(cells, 0);
        t.safe.assign(cells, 0);
        t.btvars = FlatSets(t.deg * U_ * t.um, t.deg);
        t.bad = FlatSets(1, cells);

        auto each_base = [&](auto f) {
            for (std::size_t is = 0; is < t.deg; ++is)
                for (std::size_t js = 0; js < t.deg; ++js) {
                    if (js == is)
                        continue;
                    const Var i = nbm[is], j = nbm[js];
                    for (Value vi : vals_[i])
                        for (Value vj : vals_[j])
                            if (allowed(i, vi, j, vj))
                                f(is, i, vi, js, j, vj);
                }
        };

        each_base([&](std::size_t is, Var i, Value vi, std::size_t js, Var j, Value vj) {
            Bitset plus = inst_.row(i, vi, m) & dm;
            plus.subtract(inst_.row(j, vj, m));
            t.N[q(t, is, vi, js, vj)] = static_cast<std::uint32_t>(plus.count());
        });

        for (std::size_t is = 0; is < t.deg; ++is) {
            const Var i = nbm[is];
            for (Value vi : vals_[i]) {
                const Bitset& ri = inst_.row(i, vi, m);
                for (Value vm : vals_[m]) {
                    for (std::size_t js = 0; js < t.deg; ++js) {
                        if (js == is)
                            continue;
                        const Var j = nbm[js];
                        for (Value vj : vals_[j]) {
                            if (!allowed(i, vi, j, vj))
                                continue;
                            const bool in_i = ri.test(vm), in_j = inst_.row(j, vj, m).test(vm);
                            if ((!in_i && in_j && t.N[q(t, is, vi, js, vj)] != 0) ||
                                (in_i && !in_j && t.N[q(t, js, vj, is, vi)] != 0)) {
                                t.btvars.insert(bt_id(t, is, vi, vm), js);
                                break;
                            }
                        }
                    }
                }
            }
        }

        each_base([&](std::size_t is, Var i, Value vi, std::size_t js, Var j, Value vj) {
            Bitset plus = inst_.row(i, vi, m) & dm;
            plus.subtract(inst_.row(j, vj, m));
            std::uint32_t c = 0;
            plus.for_each([&](std::size_t vm) {
                if (t.btvars.size(bt_id(t, js, vj, static_cast<Value>(vm))) > 1)
                    ++c;
            });
            t.M[q(t, is, vi, js, vj)] = c;
        });

        each_base([&](std::size_t is, Var i, Value vi, std::size_t js, Var j, Value vj) {
            const auto a = q(t, is, vi, js, vj);
            t.safe[a] = t.M[a] == 0 || t.M[q(t, js, vj, is, vi)] == 0;
            if (js < is)
                return;
            Bitset ext = inst_.row(i, vi, m) & inst_.row(j, vj, m);
            ext &= dm;
            bool good = false;
            ext.for_each([&](std::size_t vm) {
                if (good)
                    return;
                good = t.safe[a] || t.btvars.empty(bt_id(t, is, vi, static_cast<Value>(vm))) ||
                       t.btvars.empty(bt_id(t, js, vj, static_cast<Value>(vm)));
            });
            if (!good)
                t.bad.insert(0, a);
        });

        if (t.bad.empty(0))
            enqueue(m);
    }

    std::vector<Tables> tab_;
};

class AEBTPEngine : public EngineBase {
public:
    using EngineBase::EngineBase;

    RuleWitness witness(Var) override { return ExtensionWitness{}; }

    void eliminated(Var k) override
    {
        for (Var i : nb_[k]) {
            if (!inst_.active(i))
                continue;
            auto& t = tab_[i];
            const auto ks = slot(i, k);
            if (t.badv.erase(0, ks))
                audit(AuditEvent::table_delta, "badVars", {i, k});
            for (std::size_t js = 0; js < nb_[i].size(); ++js) {
                const Var j = nb_[i][js];
                if (!inst_.active(j))
                    continue;
                for (Value vj : vals_[j]) {
                    for (Value vi : vals_[i]) {
                        if (!allowed(j, vj, i, vi))
                            continue;
                        const auto id = lbt_id(t, js, vj, vi);
                        if (faulty() || !t.lbt.erase(id, ks) || !t.lbt.empty(id))
                            continue;
                        t.support.insert(js * U_ + vj, vi);
                        if (t.support.size(js * U_ + vj) != 1)
                            continue;
                        audit(AuditEvent::branch1, "support", {j, vj, i});
                        if (--t.cbv[js] == 0 && t.badv.erase(0, js))
                            audit(AuditEvent::table_delta, "badVars", {i, j});
                    }
                }
            }
            if (t.badv.empty(0))
                enqueue(i);
        }
    }

protected:
    void init() override
    {
        tab_.resize(n_);
        for (Var i = 0; i < n_; ++i) {
            if (!inst_.active(i))
                continue;
            auto& t = tab_[i];
            const auto deg = nb_[i].size();
            const auto& di = inst_.domain(i);
            t.ui = usize(i);
            t.lbt = FlatSets(deg * U_ * t.ui, deg);
            t.support = FlatSets(deg * U_, t.ui);
            t.cbv.assign(deg, 0);
            t.badv = FlatSets(1, deg);
            std::vector<std::pair<std::size_t, Value>> L;
            for (std::size_t js = 0; js < deg; ++js) {
                const Var j = nb_[i][js];
                for (Value vj : vals_[j]) {
                    L.clear();
                    const Bitset& rji = inst_.row(j, vj, i);
                    for (std::size_t ks = 0; ks < deg; ++ks) {
                        const Var k = nb_[i][ks];
                        if (ks == js)
                            continue;
                        for (Value vk : vals_[k])
                            if (allowed(j, vj, k, vk) && inst_.row(k, vk, i).any_and_not(rji, di))
                                L.emplace_back(ks, vk);
                    }
                    for (Value vi : vals_[i]) {
                        if (!rji.test(vi))
                            continue;
                        const auto id = lbt_id(t, js, vj, vi);
                        for (auto [ks, vk] : L)
                            if (!allowed(i, vi, nb_[i][ks], vk))
                                t.lbt.insert(id, ks);
                        if (t.lbt.empty(id))
                            t.support.insert(js * U_ + vj, vi);
                    }
                    if (t.support.empty(js * U_ + vj)) {
                        ++t.cbv[js];
                        t.badv.insert(0, js);
                    }
                }
            }
            if (t.badv.empty(0))
                enqueue(i);
        }
    }

private:
    struct Tables {
        std::size_t ui = 0;
        FlatSets lbt;                   ///< L_BT(j,vj,i,vi) over slots of x_i
        FlatSets support;               ///< support(j,vj,i) over values of x_i
        std::vector<std::uint32_t> cbv; ///< countBadVals(j,i) per slot
        FlatSets badv;                  ///< badVars(i), one set over slots
    };

    std::size_t lbt_id(const Tables& t, std::size_t js, Value vj, Value vi) const { return (js * U_ + vj) * t.ui + vi; }

    std::vector<Tables> tab_;
};

std::unique_ptr<EngineBase> make_engine(Rule rule, Instance& inst, const EngineOptions& opt)
{
    switch (rule) {
    case Rule::exists_snake:
        return std::make_unique<ExistsSnakeEngine>(inst, opt);
    case Rule::de_snake:
        return std::make_unique<DESnakeEngine>(inst, opt);
    case Rule::triangle:
        return std::make_unique<TriangleEngine>(inst, opt);
    case Rule::bt_degree:
        return std::make_unique<BTDegreeEngine>(inst, opt);
    case Rule::aebtp:
        return std::make_unique<AEBTPEngine>(inst, opt);
    case Rule::singleton:
        break;
    }
    throw PreconditionError("no engine for rule " + std::string(rule_name(rule)));
}

} // namespace

FixpointResult run_engine(const Instance& inst, Rule rule, const EngineOptions& opt)
{
    if (!is_arc_consistent(inst))
        throw PreconditionError("run_engine: instance is not arc consistent");
    FixpointResult res{inst, {}};
    auto engine = make_engine(rule, res.instance, opt);
    engine->start();
    while (auto k = engine->pop()) {
        res.trace.records.push_back(make_record(res.instance, rule, *k, engine->witness(*k)));
        auto r = eliminate_variable(res.instance, *k);
        // arc consistency guarantees that no value loses its last support
        if (!r.log.empty())
            throw Error("run_engine: elimination deleted values");
        engine->eliminated(*k);
    }
    return res;
}

} // namespace varelim
