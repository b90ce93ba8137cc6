#pragma once

#include <cstddef>
#include <vector>

#include "distinguo/formula.hpp"
#include "distinguo/signature.hpp"

namespace distinguo {

// An ordered, duplicate-free set of well-formed formulas over one signature.
// Order is the set's iteration and reporting order: membership queries and
// "first distinguishing formula" results refer to it.
class FormulaSet {
public:
    FormulaSet(Signature sig, std::vector<Formula> formulas);

    const Signature& signature() const { return sig_; }
    const std::vector<Formula>& formulas() const { return formulas_; }
    std::size_t size() const { return formulas_.size(); }
    const Formula& operator[](std::size_t i) const { return formulas_[i]; }

    bool contains(const Formula& f) const;

private:
    Signature sig_;
    std::vector<Formula> formulas_;
};

struct FragmentOptions {
    // Hard cap on the number of formulas the generator may create while
    // working (intermediate pool included). Exceeding it throws BudgetExceeded.
    std::size_t budget = 1'000'000;
};

// Generates the bounded fragment used throughout: every formula has
// quantifier rank <= max_rank and uses only variables v0..v{max_vars-1}.
//
// Construction, deterministic and closed:
//   1. atoms over all argument tuples, plus vi = vj (i <= j) when the
//      signature enables equality;
//   2. negations of those literals;
//   3. one conjunction and one disjunction for each unordered pair of
//      distinct atoms;
//   4. guarded quantification, stratified by rank: each new stratum
//      quantifies every formula of the previous stratum over each of its
//      free variables, with both E and A;
//   5. counting-threshold chains E^k when equality is enabled: for each
//      relation and polarity, the nested "at least k distinct tuples"
//      sentences for every k that fits in max_vars and max_rank;
//   6. closure under subformulas, then under single negation;
//   7. sort by (quantifier rank, ast size, structural order) and dedupe.
//
// Requires max_vars >= the largest relation arity (ArityMismatch otherwise).
FormulaSet generate_fragment(const Signature& sig, Nat max_rank, Nat max_vars,
                             const FragmentOptions& opts = {});

// True if every subformula of every member is itself a member.
bool subformula_closed(const FormulaSet& a);

// True if for every member f, either ~f or the g with f == ~g is a member.
bool negation_closed(const FormulaSet& a);

}  // namespace distinguo
