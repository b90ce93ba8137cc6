#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distinguo/count.hpp"
#include "distinguo/fragment.hpp"
#include "distinguo/semantics.hpp"
#include "distinguo/structure.hpp"

namespace distinguo {

// A formula telling two structures apart, with the diverging counts.
struct DistinguishWitness {
    Formula formula;
    Count count_first;
    Count count_second;
};

// A bijection of {0..n-1}; image[i] = g(i).
class FinitePermutation {
public:
    explicit FinitePermutation(std::vector<Nat> image);  // throws NotABijection
    static FinitePermutation identity(Nat n);

    Nat size() const { return static_cast<Nat>(image_.size()); }
    Nat operator()(Nat x) const;
    Tuple apply(const Tuple& t) const;

    // (g.compose(h))(x) = g(h(x)).
    FinitePermutation compose(const FinitePermutation& h) const;
    FinitePermutation inverse() const;

    const std::vector<Nat>& image() const { return image_; }
    friend bool operator==(const FinitePermutation&, const FinitePermutation&) = default;

private:
    std::vector<Nat> image_;
};

// A permutation of N assembled from order-preserving bijections between
// paired sets: part (from, to) maps the k-th member of `from` to the k-th
// member of `to`. Valid when the from-parts partition N, the to-parts
// partition N, and paired parts have equal cardinality.
class ClassBijection {
public:
    explicit ClassBijection(std::vector<std::pair<PeriodicSet, PeriodicSet>> parts);

    std::uint64_t apply(std::uint64_t x) const;
    const std::vector<std::pair<PeriodicSet, PeriodicSet>>& parts() const {
        return parts_;
    }

private:
    std::vector<std::pair<PeriodicSet, PeriodicSet>> parts_;
};

using Permutation = std::variant<FinitePermutation, ClassBijection>;

// One round of an Ehrenfeucht-Fraisse game trace: where the spoiler played,
// which element, and the duplicator's best reply (absent when every reply
// already breaks the partial isomorphism).
struct EfMove {
    bool spoiler_in_first;
    Nat spoiler_element;
    std::optional<Nat> duplicator_reply;
};

// Verdict of one equivalence check plus the witness its polarity calls for:
// a distinguishing formula when an E_A check fails, a permutation when an
// isomorphism check succeeds, a spoiler trace when an EF check fails.
struct EquivReport {
    std::string relation;
    bool verdict = false;
    std::optional<DistinguishWitness> distinguishing;
    std::optional<Permutation> witness;
    std::optional<std::vector<EfMove>> spoiler_trace;
};

// Node budget for backtracking searches; exceeding it throws BudgetExceeded.
struct SearchLimits {
    std::uint64_t max_nodes = 50'000'000;
};

// The first formula of a (in list order) whose realization counts differ
// between m and n, or absent when every count agrees.
std::optional<DistinguishWitness> distinguishable(const Structure& m,
                                                  const Structure& n,
                                                  const FormulaSet& a);

// Equal realization counts over every formula of a.
EquivReport e_equiv(const Structure& m, const Structure& n, const FormulaSet& a);

// Isomorphism with witness. Finite backend: backtracking over candidate maps
// pruned by per-element incidence invariants. Periodic backend: structures are
// isomorphic iff every color class has the same cardinality on both sides; the
// witness maps each class onto its counterpart order-preservingly.
EquivReport isomorphic(const Structure& m, const Structure& n,
                       const SearchLimits& limits = {});

// The structure with every relation tuple relabeled through g. Finite
// permutations act on both backends (on the periodic one as the
// finite-support extension by the identity); class bijections are not
// finitely supported and are rejected.
Structure act(const Permutation& g, const Structure& m);

// q-round Ehrenfeucht-Fraisse game: verdict true iff the duplicator wins.
// The winning condition is the injective partial-isomorphism condition
// (pebble pairs must preserve equality and every relation, both ways).
// Finite backend: exhaustive game search, memoized. Periodic backend (unary):
// decided from color-class counts capped at q.
EquivReport ef_equiv(const Structure& m, const Structure& n, Nat q,
                     const SearchLimits& limits = {});

// Partition of the input into equivalence classes: each class holds input
// indices ascending; classes are ordered by their smallest member.
struct Classification {
    std::vector<std::vector<std::size_t>> classes;
};

Classification classify_ea(const std::vector<Structure>& structures,
                           const FormulaSet& a);
Classification classify_iso(const std::vector<Structure>& structures,
                            const SearchLimits& limits = {});
Classification classify_ef(const std::vector<Structure>& structures, Nat q,
                           const SearchLimits& limits = {});

}  // namespace distinguo
