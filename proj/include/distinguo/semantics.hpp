#pragma once

#include <cstdint>
#include <vector>

#include "distinguo/count.hpp"
#include "distinguo/formula.hpp"
#include "distinguo/periodic.hpp"
#include "distinguo/structure.hpp"

namespace distinguo {

// Values for the free variables of a formula, in increasing variable order:
// entry i is the value of free_variables()[i].
using Assignment = Tuple;

// Truth of f in m under env.
//
// Finite backend: direct recursion, quantifiers range over the universe.
// Periodic backend: quantifiers range over a finite witness set, the values
// already named by the assignment plus one fresh representative per nonempty
// color class. Soundness of that reduction: two elements of the same class
// outside the named set are exchanged by an automorphism fixing the named set
// pointwise, so they satisfy exactly the same formulas.
//
// ExistsAtLeast compares an exact realization count against the threshold.
// Throws UnboundVariable (env length mismatch), SignatureMismatch,
// OutOfUniverse (finite backend, env entry outside the universe).
bool satisfies(const Structure& m, const Formula& f, const Assignment& env = {});

// A color class: the elements realizing exactly the relation subset `mask`
// (bit r set = relation r holds). Classes partition the universe.
struct ColorClass {
    Nat mask;
    PeriodicSet members;
};

// All 2^k classes of a unary periodic structure, indexed by mask (so the
// class of mask m sits at position m). Empty classes are included.
// Throws BudgetExceeded for signatures with more than 20 relations.
std::vector<ColorClass> color_classes(const PeriodicUnaryStructure& s);

// Which tuples "look alike" over a unary periodic structure: coordinates are
// partitioned into blocks of equal value (block_of is the restricted-growth
// labeling: block ids appear in first-use order), and each block carries the
// color-class index of its shared value. Tuples with equal descriptors are
// exchanged by an automorphism, hence realize the same formulas.
struct OrbitDescriptor {
    std::vector<std::size_t> block_of;  // coordinate -> block id
    std::vector<std::size_t> class_of;  // block id -> color-class index
    friend auto operator<=>(const OrbitDescriptor&, const OrbitDescriptor&) = default;
};

enum class RealizationRep { Explicit, PeriodicUnary, SymbolicProduct };

// The set of assignments realizing a formula in a structure.
//   Explicit        finite backend (any arity) and all sentences: tuple list.
//   PeriodicUnary   periodic backend, one free variable: a PeriodicSet.
//   SymbolicProduct periodic backend, d >= 2 free variables: the satisfying
//                   orbit descriptors over the structure's color classes.
// Membership and cardinality are decidable in every representation.
class RealizationSet {
public:
    static RealizationSet explicit_set(Nat dimension, std::vector<Tuple> tuples);
    static RealizationSet periodic_unary(PeriodicSet members);
    static RealizationSet symbolic(Nat dimension, std::vector<ColorClass> classes,
                                   std::vector<OrbitDescriptor> satisfied);

    Nat dimension() const { return dimension_; }
    RealizationRep representation() const { return rep_; }

    Count cardinality() const;

    // Total membership test: tuples of the wrong length are simply absent.
    bool contains(const Tuple& t) const;

    // Every member, sorted lexicographically. Throws Error when infinite.
    std::vector<Tuple> tuples() const;

    // True when the representation certifies an unbounded member family.
    bool has_infinite_family() const;

    // The k-th member of one such family: distinct k give distinct tuples,
    // and every coordinate drawn from an infinite class grows with k.
    // Throws NoCertificate when has_infinite_family() is false.
    Tuple unbounded_family_member(std::uint64_t k) const;

    // If the set is finite, every entry of every member is < this bound.
    std::uint64_t finite_entry_bound() const;

    // PeriodicUnary representation only (BackendMismatch otherwise).
    const PeriodicSet& periodic_set() const;

    const std::vector<OrbitDescriptor>& descriptors() const { return satisfied_; }

private:
    RealizationSet() = default;

    RealizationRep rep_ = RealizationRep::Explicit;
    Nat dimension_ = 0;
    std::vector<Tuple> tuples_;               // Explicit (sorted)
    PeriodicSet set_ = PeriodicSet::empty();  // PeriodicUnary
    std::vector<ColorClass> classes_;         // SymbolicProduct
    std::vector<OrbitDescriptor> satisfied_;  // SymbolicProduct (sorted)
};

// The realization set of f in m: all env with satisfies(m, f, env), over the
// free variables of f ascending. A sentence yields {()} or {}.
RealizationSet realizations(const Structure& m, const Formula& f);

// cardinality(realizations(m, f)) without materializing tuple lists.
Count count(const Structure& m, const Formula& f);

}  // namespace distinguo
