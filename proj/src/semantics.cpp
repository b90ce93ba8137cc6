#include "distinguo/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "distinguo/errors.hpp"

namespace distinguo {

namespace {

Nat to_nat(std::uint64_t x) {
    if (x > std::numeric_limits<Nat>::max())
        throw Error("universe element " + std::to_string(x) + " out of range");
    return static_cast<Nat>(x);
}

// Variable environment with shadowing: set() returns the previous binding so
// quantifiers can restore it on the way out.
class Env {
public:
    bool bound(Nat v) const { return v < vals_.size() && vals_[v] >= 0; }

    Nat get(Nat v) const {
        if (!bound(v))
            throw UnboundVariable("variable v" + std::to_string(v) +
                                  " has no value");
        return static_cast<Nat>(vals_[v]);
    }

    std::int64_t set(Nat v, Nat value) {
        if (v >= vals_.size()) vals_.resize(v + 1, -1);
        std::int64_t old = vals_[v];
        vals_[v] = static_cast<std::int64_t>(value);
        return old;
    }

    std::int64_t clear(Nat v) {
        if (v >= vals_.size()) vals_.resize(v + 1, -1);
        std::int64_t old = vals_[v];
        vals_[v] = -1;
        return old;
    }

    void restore(Nat v, std::int64_t old) { vals_[v] = old; }

    // Distinct bound values, ascending.
    std::vector<Nat> named_values() const {
        std::vector<Nat> out;
        for (std::int64_t x : vals_)
            if (x >= 0) out.push_back(static_cast<Nat>(x));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::vector<std::int64_t> vals_;  // -1 marks unbound
};

// Memo key for threshold counting: the count of satisfying assignments to the
// bound variables depends only on the body, the bound-variable list, and the
// values of the remaining free variables.
struct CountKey {
    std::uintptr_t body;
    std::vector<Nat> bound;
    std::vector<Nat> context;
    friend auto operator<=>(const CountKey&, const CountKey&) = default;
};

std::vector<Nat> var_indices(const std::vector<Var>& vs) {
    std::vector<Nat> out;
    out.reserve(vs.size());
    for (Var v : vs) out.push_back(v.index());
    return out;
}

std::vector<Nat> values_of(const std::vector<Var>& vs, const Env& env) {
    std::vector<Nat> out;
    out.reserve(vs.size());
    for (Var v : vs) out.push_back(env.get(v.index()));
    return out;
}

class FiniteEval {
public:
    explicit FiniteEval(const FiniteStructure& m) : m_(m) {}

    bool eval(const Formula& f, Env& env) {
        switch (f.kind()) {
            case FormulaKind::Atom: {
                Tuple t;
                t.reserve(f.variables().size());
                for (Var v : f.variables()) t.push_back(env.get(v.index()));
                return m_.holds(m_.signature().index_of(f.relation()), t);
            }
            case FormulaKind::Equal:
                return env.get(f.variables()[0].index()) ==
                       env.get(f.variables()[1].index());
            case FormulaKind::Not:
                return !eval(f.body(), env);
            case FormulaKind::And:
                for (const Formula& g : f.operands())
                    if (!eval(g, env)) return false;
                return true;
            case FormulaKind::Or:
                for (const Formula& g : f.operands())
                    if (eval(g, env)) return true;
                return false;
            case FormulaKind::Exists:
            case FormulaKind::Forall: {
                const bool want = f.kind() == FormulaKind::Exists;
                const Nat v = f.bound_variable().index();
                std::int64_t old = env.clear(v);
                bool result = !want;
                for (Nat x = 0; x < m_.size(); ++x) {
                    env.set(v, x);
                    if (eval(f.body(), env) == want) {
                        result = want;
                        break;
                    }
                }
                env.restore(v, old);
                return result;
            }
            case FormulaKind::ExistsAtLeast: {
                if (f.threshold() == 0) return true;
                return threshold_count(f, env) >= Count::finite(f.threshold());
            }
        }
        throw Error("unreachable formula kind");
    }

    // Exact number of assignments to f's counted variables satisfying the
    // body, with all other free variables read from env. Memoized: the star
    // encodings compare many thresholds against the same underlying count.
    Count threshold_count(const Formula& f, Env& env) {
        const std::vector<Var>& bound = f.variables();
        if (bound.empty())
            return Count::finite(eval(f.body(), env) ? 1 : 0);

        CountKey key{reinterpret_cast<std::uintptr_t>(f.body().id()),
                     var_indices(bound), values_of(f.free_variables(), env)};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        std::vector<std::int64_t> olds;
        olds.reserve(bound.size());
        for (Var v : bound) olds.push_back(env.clear(v.index()));

        std::uint64_t cnt = 0;
        std::vector<Nat> odo(bound.size(), 0);
        for (bool done = false; !done;) {
            for (std::size_t i = 0; i < bound.size(); ++i)
                env.set(bound[i].index(), odo[i]);
            if (eval(f.body(), env)) ++cnt;
            std::size_t pos = odo.size();
            for (;;) {
                if (pos == 0) {
                    done = true;
                    break;
                }
                --pos;
                if (++odo[pos] < m_.size()) break;
                odo[pos] = 0;
            }
        }

        for (std::size_t i = bound.size(); i > 0; --i)
            env.restore(bound[i - 1].index(), olds[i - 1]);

        Count c = Count::finite(cnt);
        memo_.emplace(std::move(key), c);
        return c;
    }

    const FiniteStructure& structure() const { return m_; }

private:
    const FiniteStructure& m_;
    std::map<CountKey, Count> memo_;
};

class PeriodicEval {
public:
    explicit PeriodicEval(const PeriodicUnaryStructure& m)
        : m_(m), classes_(color_classes(m)) {}

    const std::vector<ColorClass>& classes() const { return classes_; }

    bool eval(const Formula& f, Env& env) {
        switch (f.kind()) {
            case FormulaKind::Atom: {
                Nat val = env.get(f.variables()[0].index());
                return m_.set_of(m_.signature().index_of(f.relation()))
                    .contains(val);
            }
            case FormulaKind::Equal:
                return env.get(f.variables()[0].index()) ==
                       env.get(f.variables()[1].index());
            case FormulaKind::Not:
                return !eval(f.body(), env);
            case FormulaKind::And:
                for (const Formula& g : f.operands())
                    if (!eval(g, env)) return false;
                return true;
            case FormulaKind::Or:
                for (const Formula& g : f.operands())
                    if (eval(g, env)) return true;
                return false;
            case FormulaKind::Exists:
            case FormulaKind::Forall: {
                const bool want = f.kind() == FormulaKind::Exists;
                const Nat v = f.bound_variable().index();
                std::int64_t old = env.clear(v);
                bool result = !want;
                for (Nat x : witness_set(env)) {
                    env.set(v, x);
                    if (eval(f.body(), env) == want) {
                        result = want;
                        break;
                    }
                }
                env.restore(v, old);
                return result;
            }
            case FormulaKind::ExistsAtLeast: {
                if (f.threshold() == 0) return true;
                return threshold_count(f, env) >= Count::finite(f.threshold());
            }
        }
        throw Error("unreachable formula kind");
    }

    // Named values plus one fresh representative per nonempty color class.
    // Quantifying over this finite set is sound: elements of one class outside
    // the named set are exchanged by automorphisms fixing the named set.
    std::vector<Nat> witness_set(const Env& env) const {
        std::vector<Nat> named = env.named_values();
        std::vector<std::uint64_t> excluded(named.begin(), named.end());
        std::vector<Nat> out = named;
        for (const ColorClass& c : classes_) {
            std::uint64_t fresh;
            if (c.members.first_member_not_in(excluded, fresh))
                out.push_back(to_nat(fresh));
        }
        return out;
    }

    // Exact count of assignments to the counted variables satisfying the
    // body. Assignments are grouped by orbit descriptor (equality pattern
    // with each other and with the named values, plus color class); one
    // representative per descriptor decides satisfaction for the whole group,
    // whose size is a product of falling factorials.
    Count threshold_count(const Formula& f, Env& env) {
        const std::vector<Var>& bound = f.variables();
        if (bound.empty())
            return Count::finite(eval(f.body(), env) ? 1 : 0);

        CountKey key{reinterpret_cast<std::uintptr_t>(f.body().id()),
                     var_indices(bound), values_of(f.free_variables(), env)};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        std::vector<std::int64_t> olds;
        olds.reserve(bound.size());
        for (Var v : bound) olds.push_back(env.clear(v.index()));

        const std::vector<Nat> named = env.named_values();
        Count total = Count::finite(0);

        // Coordinate labels: 0..|named|-1 link the coordinate to that named
        // value; |named|+b puts it in fresh block b (restricted growth).
        const std::size_t d = bound.size();
        std::vector<std::size_t> label(d, 0);
        std::function<void(std::size_t, std::size_t)> coords =
            [&](std::size_t i, std::size_t used_blocks) {
                if (i == d) {
                    total = count_add(
                        total, blocks_count(f, env, bound, named, label,
                                            used_blocks));
                    return;
                }
                for (std::size_t l = 0; l < named.size() + used_blocks + 1;
                     ++l) {
                    label[i] = l;
                    std::size_t nb = used_blocks;
                    if (l >= named.size() && l - named.size() == used_blocks)
                        ++nb;
                    coords(i + 1, nb);
                }
            };
        coords(0, 0);

        for (std::size_t i = bound.size(); i > 0; --i)
            env.restore(bound[i - 1].index(), olds[i - 1]);

        memo_.emplace(std::move(key), total);
        return total;
    }

private:
    // Sum over class assignments to the fresh blocks of one labeling.
    Count blocks_count(const Formula& f, Env& env,
                       const std::vector<Var>& bound,
                       const std::vector<Nat>& named,
                       const std::vector<std::size_t>& label,
                       std::size_t num_blocks) {
        std::vector<std::size_t> cls(num_blocks, 0);
        Count total = Count::finite(0);
        std::function<void(std::size_t)> rec = [&](std::size_t b) {
            if (b == num_blocks) {
                total = count_add(total,
                                  one_descriptor(f, env, bound, named, label,
                                                 cls));
                return;
            }
            for (std::size_t c = 0; c < classes_.size(); ++c) {
                if (classes_[c].members.is_empty()) continue;
                cls[b] = c;
                rec(b + 1);
            }
        };
        rec(0);
        return total;
    }

    Count one_descriptor(const Formula& f, Env& env,
                         const std::vector<Var>& bound,
                         const std::vector<Nat>& named,
                         const std::vector<std::size_t>& label,
                         const std::vector<std::size_t>& cls) {
        // Group size: for each class, falling factorial of the members not
        // named, taken per fresh block in that class.
        std::vector<std::size_t> blocks_in(classes_.size(), 0);
        for (std::size_t c : cls) ++blocks_in[c];
        Count size = Count::finite(1);
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            if (blocks_in[c] == 0) continue;
            Count card = classes_[c].members.cardinality();
            std::uint64_t named_in = 0;
            for (Nat v : named)
                if (classes_[c].members.contains(v)) ++named_in;
            Count avail = card.is_infinite()
                              ? Count::infinite()
                              : Count::finite(card.value() >= named_in
                                                  ? card.value() - named_in
                                                  : 0);
            size = count_mul(size, falling_factorial(avail, blocks_in[c]));
            if (size == Count::finite(0)) return size;
        }

        // One representative: linked coordinates take their named value,
        // fresh blocks take distinct class members outside the named set.
        std::vector<std::uint64_t> excluded(named.begin(), named.end());
        std::vector<std::optional<Nat>> block_val(cls.size());
        for (std::size_t b = 0; b < cls.size(); ++b) {
            std::uint64_t fresh;
            if (!classes_[cls[b]].members.first_member_not_in(excluded, fresh))
                return Count::finite(0);  // unreachable when size > 0
            block_val[b] = to_nat(fresh);
            excluded.push_back(fresh);
        }
        for (std::size_t i = 0; i < bound.size(); ++i) {
            Nat value = label[i] < named.size()
                            ? named[label[i]]
                            : *block_val[label[i] - named.size()];
            env.set(bound[i].index(), value);
        }
        bool sat = eval(f.body(), env);
        for (Var v : bound) env.clear(v.index());
        return sat ? size : Count::finite(0);
    }

    const PeriodicUnaryStructure& m_;
    std::vector<ColorClass> classes_;
    std::map<CountKey, Count> memo_;
};

}  // namespace

std::vector<ColorClass> color_classes(const PeriodicUnaryStructure& s) {
    const std::size_t k = s.signature().relations().size();
    if (k > 20)
        throw BudgetExceeded("color classes: 2^" + std::to_string(k) +
                             " exceeds the supported signature size");
    std::vector<ColorClass> out;
    out.reserve(std::size_t{1} << k);
    for (Nat mask = 0; mask < (Nat{1} << k); ++mask) {
        PeriodicSet members = PeriodicSet::all();
        for (std::size_t r = 0; r < k; ++r) {
            const PeriodicSet& rel = s.set_of(r);
            members = members.intersect((mask >> r) & 1 ? rel : rel.complement());
        }
        out.push_back(ColorClass{mask, std::move(members)});
    }
    return out;
}

bool satisfies(const Structure& m, const Formula& f, const Assignment& env) {
    validate_against(f, m.signature());
    const std::vector<Var>& fv = f.free_variables();
    if (env.size() != fv.size())
        throw UnboundVariable("assignment has " + std::to_string(env.size()) +
                              " entries for " + std::to_string(fv.size()) +
                              " free variables");
    Env e;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        if (m.is_finite() && env[i] >= m.finite().size())
            throw OutOfUniverse("assignment value " + std::to_string(env[i]) +
                                " leaves universe of size " +
                                std::to_string(m.finite().size()));
        e.set(fv[i].index(), env[i]);
    }
    if (m.is_finite()) {
        FiniteEval ev(m.finite());
        return ev.eval(f, e);
    }
    PeriodicEval ev(m.periodic());
    return ev.eval(f, e);
}

RealizationSet RealizationSet::explicit_set(Nat dimension,
                                            std::vector<Tuple> tuples) {
    for (const Tuple& t : tuples)
        if (t.size() != dimension)
            throw ArityMismatch("realization tuple of length " +
                                std::to_string(t.size()) + " in a set of arity " +
                                std::to_string(dimension));
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    RealizationSet s;
    s.rep_ = RealizationRep::Explicit;
    s.dimension_ = dimension;
    s.tuples_ = std::move(tuples);
    return s;
}

RealizationSet RealizationSet::periodic_unary(PeriodicSet members) {
    RealizationSet s;
    s.rep_ = RealizationRep::PeriodicUnary;
    s.dimension_ = 1;
    s.set_ = std::move(members);
    return s;
}

RealizationSet RealizationSet::symbolic(Nat dimension,
                                        std::vector<ColorClass> classes,
                                        std::vector<OrbitDescriptor> satisfied) {
    if (dimension < 2)
        throw ArityMismatch("symbolic realization sets need arity >= 2");
    std::sort(satisfied.begin(), satisfied.end());
    satisfied.erase(std::unique(satisfied.begin(), satisfied.end()),
                    satisfied.end());
    RealizationSet s;
    s.rep_ = RealizationRep::SymbolicProduct;
    s.dimension_ = dimension;
    s.classes_ = std::move(classes);
    s.satisfied_ = std::move(satisfied);
    return s;
}

namespace {

// Group size of one descriptor: distinct values for same-class blocks, so a
// falling factorial per class.
Count descriptor_count(const std::vector<ColorClass>& classes,
                       const OrbitDescriptor& d) {
    std::vector<std::size_t> blocks_in(classes.size(), 0);
    for (std::size_t c : d.class_of) ++blocks_in[c];
    Count size = Count::finite(1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (blocks_in[c] == 0) continue;
        size = count_mul(size, falling_factorial(classes[c].members.cardinality(),
                                                 blocks_in[c]));
    }
    return size;
}

// The descriptor of a concrete tuple: blocks of equal coordinates in
// first-use order, each labeled with its value's color class (= mask).
OrbitDescriptor descriptor_of(const std::vector<ColorClass>& classes,
                              const Tuple& t) {
    OrbitDescriptor d;
    std::vector<Nat> block_value;
    for (Nat v : t) {
        std::size_t b = 0;
        while (b < block_value.size() && block_value[b] != v) ++b;
        if (b == block_value.size()) {
            block_value.push_back(v);
            std::size_t cls = 0;  // classes partition N: exactly one contains v
            for (std::size_t c = 0; c < classes.size(); ++c)
                if (classes[c].members.contains(v)) {
                    cls = c;
                    break;
                }
            d.class_of.push_back(cls);
        }
        d.block_of.push_back(b);
    }
    return d;
}

}  // namespace

Count RealizationSet::cardinality() const {
    switch (rep_) {
        case RealizationRep::Explicit:
            return Count::finite(tuples_.size());
        case RealizationRep::PeriodicUnary:
            return set_.cardinality();
        case RealizationRep::SymbolicProduct: {
            Count total = Count::finite(0);
            for (const OrbitDescriptor& d : satisfied_)
                total = count_add(total, descriptor_count(classes_, d));
            return total;
        }
    }
    throw Error("unreachable realization representation");
}

bool RealizationSet::contains(const Tuple& t) const {
    if (t.size() != dimension_) return false;
    switch (rep_) {
        case RealizationRep::Explicit:
            return std::binary_search(tuples_.begin(), tuples_.end(), t);
        case RealizationRep::PeriodicUnary:
            return set_.contains(t[0]);
        case RealizationRep::SymbolicProduct: {
            OrbitDescriptor d = descriptor_of(classes_, t);
            return std::binary_search(satisfied_.begin(), satisfied_.end(), d);
        }
    }
    throw Error("unreachable realization representation");
}

std::vector<Tuple> RealizationSet::tuples() const {
    if (cardinality().is_infinite())
        throw Error("cannot enumerate an infinite realization set");
    switch (rep_) {
        case RealizationRep::Explicit:
            return tuples_;
        case RealizationRep::PeriodicUnary: {
            std::vector<Tuple> out;
            for (std::uint64_t v : set_.members()) out.push_back({to_nat(v)});
            return out;
        }
        case RealizationRep::SymbolicProduct: {
            std::vector<Tuple> out;
            for (const OrbitDescriptor& d : satisfied_) {
                // Assign distinct members of each class to its blocks, in
                // every order.
                std::vector<Nat> block_val(d.class_of.size());
                std::function<void(std::size_t)> rec = [&](std::size_t b) {
                    if (b == d.class_of.size()) {
                        Tuple t;
                        t.reserve(d.block_of.size());
                        for (std::size_t bl : d.block_of)
                            t.push_back(block_val[bl]);
                        out.push_back(std::move(t));
                        return;
                    }
                    for (std::uint64_t v :
                         classes_[d.class_of[b]].members.members()) {
                        bool used = false;
                        for (std::size_t b2 = 0; b2 < b; ++b2)
                            if (d.class_of[b2] == d.class_of[b] &&
                                block_val[b2] == v)
                                used = true;
                        if (used) continue;
                        block_val[b] = to_nat(v);
                        rec(b + 1);
                    }
                };
                rec(0);
            }
            std::sort(out.begin(), out.end());
            return out;
        }
    }
    throw Error("unreachable realization representation");
}

bool RealizationSet::has_infinite_family() const {
    switch (rep_) {
        case RealizationRep::Explicit:
            return false;
        case RealizationRep::PeriodicUnary:
            return set_.cardinality().is_infinite();
        case RealizationRep::SymbolicProduct:
            for (const OrbitDescriptor& d : satisfied_)
                for (std::size_t c : d.class_of)
                    if (classes_[c].members.cardinality().is_infinite())
                        return true;
            return false;
    }
    throw Error("unreachable realization representation");
}

Tuple RealizationSet::unbounded_family_member(std::uint64_t k) const {
    if (!has_infinite_family())
        throw NoCertificate("realization set certifies no unbounded family");
    if (rep_ == RealizationRep::PeriodicUnary) return {to_nat(set_.nth_member(k))};

    for (const OrbitDescriptor& d : satisfied_) {
        bool unbounded = false;
        for (std::size_t c : d.class_of)
            if (classes_[c].members.cardinality().is_infinite()) unbounded = true;
        if (!unbounded) continue;
        // Finite-class blocks take fixed small members; infinite-class blocks
        // take members at rank k and up, so the tuple grows with k.
        std::vector<std::size_t> offset(classes_.size(), 0);
        std::vector<Nat> block_val(d.class_of.size());
        for (std::size_t b = 0; b < d.class_of.size(); ++b) {
            const std::size_t c = d.class_of[b];
            const bool inf = classes_[c].members.cardinality().is_infinite();
            const std::uint64_t rank = (inf ? k : 0) + offset[c]++;
            block_val[b] = to_nat(classes_[c].members.nth_member(rank));
        }
        Tuple t;
        t.reserve(d.block_of.size());
        for (std::size_t bl : d.block_of) t.push_back(block_val[bl]);
        return t;
    }
    throw NoCertificate("realization set certifies no unbounded family");
}

std::uint64_t RealizationSet::finite_entry_bound() const {
    switch (rep_) {
        case RealizationRep::Explicit: {
            std::uint64_t bound = 0;
            for (const Tuple& t : tuples_)
                for (Nat v : t) bound = std::max<std::uint64_t>(bound, v + 1);
            return bound;
        }
        case RealizationRep::PeriodicUnary:
            // In normal form a finite set has an all-zero cycle, so every
            // member lies inside the prefix.
            return set_.prefix().size();
        case RealizationRep::SymbolicProduct: {
            std::uint64_t bound = 0;
            for (const ColorClass& c : classes_)
                bound = std::max<std::uint64_t>(bound, c.members.prefix().size());
            return bound;
        }
    }
    throw Error("unreachable realization representation");
}

const PeriodicSet& RealizationSet::periodic_set() const {
    if (rep_ != RealizationRep::PeriodicUnary)
        throw BackendMismatch("realization set is not a periodic unary set");
    return set_;
}

namespace {

RealizationSet finite_realizations(const FiniteStructure& m, const Formula& f) {
    FiniteEval ev(m);
    const std::vector<Var>& fv = f.free_variables();
    const std::size_t d = fv.size();
    std::vector<Tuple> out;
    Env env;
    Tuple t(d, 0);
    for (bool done = false; !done;) {
        for (std::size_t i = 0; i < d; ++i) env.set(fv[i].index(), t[i]);
        if (ev.eval(f, env)) out.push_back(t);
        std::size_t pos = d;
        for (;;) {
            if (pos == 0) {
                done = true;
                break;
            }
            --pos;
            if (++t[pos] < m.size()) break;
            t[pos] = 0;
        }
    }
    return RealizationSet::explicit_set(static_cast<Nat>(d), std::move(out));
}

RealizationSet periodic_realizations(const PeriodicUnaryStructure& m,
                                     const Formula& f) {
    PeriodicEval ev(m);
    const std::vector<Var>& fv = f.free_variables();
    const std::size_t d = fv.size();

    if (d == 0) {
        Env env;
        std::vector<Tuple> out;
        if (ev.eval(f, env)) out.push_back(Tuple{});
        return RealizationSet::explicit_set(0, std::move(out));
    }

    if (d == 1) {
        PeriodicSet result = PeriodicSet::empty();
        for (const ColorClass& c : ev.classes()) {
            std::uint64_t rep;
            if (!c.members.first_member_not_in({}, rep)) continue;
            Env env;
            env.set(fv[0].index(), to_nat(rep));
            if (ev.eval(f, env)) result = result.unite(c.members);
        }
        return RealizationSet::periodic_unary(std::move(result));
    }

    // d >= 2: one representative per feasible orbit descriptor.
    const std::vector<ColorClass>& classes = ev.classes();
    std::vector<OrbitDescriptor> satisfied;
    std::vector<std::size_t> block_of(d, 0);

    std::function<void(std::size_t, std::size_t)> coords =
        [&](std::size_t i, std::size_t used) {
            if (i < d) {
                for (std::size_t b = 0; b <= used; ++b) {
                    block_of[i] = b;
                    coords(i + 1, std::max(used, b + 1));
                }
                return;
            }
            std::vector<std::size_t> class_of(used, 0);
            std::function<void(std::size_t)> pick = [&](std::size_t b) {
                if (b < used) {
                    for (std::size_t c = 0; c < classes.size(); ++c) {
                        if (classes[c].members.is_empty()) continue;
                        class_of[b] = c;
                        pick(b + 1);
                    }
                    return;
                }
                OrbitDescriptor desc{block_of, class_of};
                if (descriptor_count(classes, desc) == Count::finite(0)) return;
                // Representative: distinct members per class, in block order.
                std::vector<std::uint64_t> excluded;
                std::vector<Nat> block_val(used);
                for (std::size_t bb = 0; bb < used; ++bb) {
                    std::uint64_t v;
                    if (!classes[class_of[bb]].members.first_member_not_in(
                            excluded, v))
                        return;  // unreachable: count > 0
                    block_val[bb] = to_nat(v);
                    excluded.push_back(v);
                }
                Env env;
                for (std::size_t i2 = 0; i2 < d; ++i2)
                    env.set(fv[i2].index(), block_val[block_of[i2]]);
                if (ev.eval(f, env)) satisfied.push_back(std::move(desc));
            };
            pick(0);
        };
    coords(0, 0);

    return RealizationSet::symbolic(static_cast<Nat>(d), classes,
                                    std::move(satisfied));
}

}  // namespace

RealizationSet realizations(const Structure& m, const Formula& f) {
    validate_against(f, m.signature());
    if (m.is_finite()) return finite_realizations(m.finite(), f);
    return periodic_realizations(m.periodic(), f);
}

Count count(const Structure& m, const Formula& f) {
    if (f.free_variables().empty()) {
        validate_against(f, m.signature());
        Env env;
        bool sat;
        if (m.is_finite()) {
            FiniteEval ev(m.finite());
            sat = ev.eval(f, env);
        } else {
            PeriodicEval ev(m.periodic());
            sat = ev.eval(f, env);
        }
        return Count::finite(sat ? 1 : 0);
    }
    return realizations(m, f).cardinality();
}

}  // namespace distinguo
