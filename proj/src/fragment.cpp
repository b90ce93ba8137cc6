#include "distinguo/fragment.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "distinguo/errors.hpp"

namespace distinguo {

FormulaSet::FormulaSet(Signature sig, std::vector<Formula> formulas)
    : sig_(std::move(sig)) {
    std::set<Formula, FormulaLess> seen;
    formulas_.reserve(formulas.size());
    for (Formula& f : formulas) {
        validate_against(f, sig_);
        if (seen.insert(f).second) formulas_.push_back(std::move(f));
    }
}

bool FormulaSet::contains(const Formula& f) const {
    for (const Formula& g : formulas_)
        if (g == f) return true;
    return false;
}

namespace {

// Output order: rank first so cheap quantifier-free formulas are tried first,
// then size, then structural order for determinism.
bool fragment_order(const Formula& x, const Formula& y) {
    if (x.quantifier_rank() != y.quantifier_rank())
        return x.quantifier_rank() < y.quantifier_rank();
    if (x.ast_size() != y.ast_size()) return x.ast_size() < y.ast_size();
    return compare(x, y) == std::strong_ordering::less;
}

class Pool {
public:
    explicit Pool(std::size_t budget) : budget_(budget) {}

    // Returns true when f was new.
    bool add(const Formula& f) {
        if (!set_.insert(f).second) return false;
        if (set_.size() > budget_)
            throw BudgetExceeded("fragment generation exceeded its budget of " +
                                 std::to_string(budget_) + " formulas");
        return true;
    }

    std::vector<Formula> sorted() const {
        std::vector<Formula> out(set_.begin(), set_.end());
        std::sort(out.begin(), out.end(), fragment_order);
        return out;
    }

    std::vector<Formula> snapshot() const {
        return std::vector<Formula>(set_.begin(), set_.end());
    }

private:
    std::size_t budget_;
    std::set<Formula, FormulaLess> set_;
};

// All var tuples of the given arity drawn from v0..v{max_vars-1}.
void each_arg_tuple(Nat arity, Nat max_vars,
                    const std::function<void(std::vector<Var>&)>& fn) {
    std::vector<Nat> idx(arity, 0);
    std::vector<Var> args;
    for (;;) {
        args.clear();
        for (Nat i : idx) args.push_back(Var(i));
        fn(args);
        Nat pos = arity;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < max_vars) break;
            idx[pos] = 0;
            if (pos == 0) return;
        }
        if (arity == 0) return;
    }
}

// x != y for tuples of block variables, componentwise.
Formula block_diff(const Signature& sig, const std::vector<Var>& a,
                   const std::vector<Var>& b) {
    std::vector<Formula> eqs;
    for (std::size_t i = 0; i < a.size(); ++i)
        eqs.push_back(Formula::equal(sig, a[i], b[i]));
    return Formula::negate(Formula::conj(std::move(eqs)));
}

// "At least k distinct tuples satisfy lit", spelled as nested guarded
// existentials: each block asserts the literal and inequality with every
// earlier block before introducing the next.
Formula threshold_chain(const Signature& sig, const Relation& rel, bool positive,
                        Nat k) {
    const Nat a = rel.arity;
    std::vector<std::vector<Var>> blocks(k);
    for (Nat j = 0; j < k; ++j)
        for (Nat i = 0; i < a; ++i) blocks[j].push_back(Var(j * a + i));

    std::optional<Formula> chain;
    for (Nat jj = k; jj > 0; --jj) {
        const Nat j = jj - 1;
        Formula lit = Formula::atom(sig, rel.name, blocks[j]);
        if (!positive) lit = Formula::negate(std::move(lit));
        std::vector<Formula> parts;
        parts.push_back(std::move(lit));
        for (Nat i = 0; i < j; ++i)
            parts.push_back(block_diff(sig, blocks[j], blocks[i]));
        if (chain) parts.push_back(std::move(*chain));
        Formula level = Formula::conj(std::move(parts));
        for (Nat i = a; i > 0; --i)
            level = Formula::exists(blocks[j][i - 1], std::move(level));
        chain = std::move(level);
    }
    return std::move(*chain);
}

}  // namespace

FormulaSet generate_fragment(const Signature& sig, Nat max_rank, Nat max_vars,
                             const FragmentOptions& opts) {
    if (max_vars < sig.max_arity())
        throw ArityMismatch("fragment needs at least " +
                            std::to_string(sig.max_arity()) +
                            " variables to form atoms, got " +
                            std::to_string(max_vars));

    Pool pool(opts.budget);

    // 1. Literal base: relation atoms over every argument tuple, equality
    //    atoms vi = vj with i <= j.
    std::vector<Formula> atoms;
    for (const Relation& r : sig.relations()) {
        each_arg_tuple(r.arity, max_vars, [&](std::vector<Var>& args) {
            Formula f = Formula::atom(sig, r.name, args);
            if (pool.add(f)) atoms.push_back(std::move(f));
        });
    }
    if (sig.with_equality()) {
        for (Nat i = 0; i < max_vars; ++i)
            for (Nat j = i; j < max_vars; ++j) {
                Formula f = Formula::equal(sig, Var(i), Var(j));
                if (pool.add(f)) atoms.push_back(std::move(f));
            }
    }

    // 2. Negated literals.
    for (const Formula& f : atoms) pool.add(Formula::negate(f));

    // 3. One binary round: conjunction and disjunction of distinct atom pairs.
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            pool.add(Formula::conj({atoms[i], atoms[j]}));
            pool.add(Formula::disj({atoms[i], atoms[j]}));
        }

    // 4. Stratified quantification: stratum r quantifies stratum r-1 over each
    //    free variable, both ways. Only the newest stratum is re-quantified,
    //    which keeps the pool linear in max_rank instead of exponential.
    std::vector<Formula> stratum = pool.snapshot();
    for (Nat r = 1; r <= max_rank; ++r) {
        std::vector<Formula> next;
        for (const Formula& f : stratum)
            for (Var v : f.free_variables()) {
                Formula e = Formula::exists(v, f);
                Formula a = Formula::forall(v, f);
                if (pool.add(e)) next.push_back(std::move(e));
                if (pool.add(a)) next.push_back(std::move(a));
            }
        stratum = std::move(next);
    }

    // 5. Counting thresholds: with equality available, "at least k tuples"
    //    sentences for each relation and polarity, as deep as rank and
    //    variable budgets allow.
    if (sig.with_equality()) {
        for (const Relation& r : sig.relations()) {
            for (Nat k = 1; k * r.arity <= max_vars && k * r.arity <= max_rank;
                 ++k) {
                pool.add(threshold_chain(sig, r, true, k));
                pool.add(threshold_chain(sig, r, false, k));
            }
        }
    }

    // 6. Close under subformulas, then under one negation. Subformulas of
    //    subformulas are subformulas, and the complement of a fresh ~f is f
    //    itself, so a single pass of each suffices in this order.
    for (const Formula& f : pool.snapshot())
        for (const Formula& g : subformulas(f)) pool.add(g);
    for (const Formula& f : pool.snapshot()) {
        if (f.kind() == FormulaKind::Not) continue;  // complement is body()
        pool.add(Formula::negate(f));
    }

    return FormulaSet(sig, pool.sorted());
}

bool subformula_closed(const FormulaSet& a) {
    std::set<Formula, FormulaLess> members(a.formulas().begin(),
                                           a.formulas().end());
    for (const Formula& f : a.formulas())
        for (const Formula& g : subformulas(f))
            if (!members.count(g)) return false;
    return true;
}

bool negation_closed(const FormulaSet& a) {
    std::set<Formula, FormulaLess> members(a.formulas().begin(),
                                           a.formulas().end());
    for (const Formula& f : a.formulas()) {
        if (f.kind() == FormulaKind::Not) {
            if (!members.count(f.body())) return false;
        } else {
            if (!members.count(Formula::negate(f))) return false;
        }
    }
    return true;
}

}  // namespace distinguo
