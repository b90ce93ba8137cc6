#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "distinguo/fragment.hpp"
#include "distinguo/semantics.hpp"
#include "distinguo/structure.hpp"

namespace distinguo {

// Bijection between N and finite sequences of naturals:
//   code(()) = 0
//   code(t), |t| = k >= 1:  1 + pair(k - 1, pack(t))
// where pair is the Cantor pairing function and pack folds the entries
// through pair from the right. Strictly monotone in every entry, which the
// infinitude witnesses below rely on. Throws Error when a code would
// overflow 64 bits.
std::vector<std::uint64_t> mu(std::uint64_t m);
std::uint64_t mu_inv(const std::vector<std::uint64_t>& t);

// mu_inv on a realization tuple.
std::uint64_t tuple_code(const Tuple& t);

// The criterion "x is infinite iff every n is exceeded by the code of some
// member", evaluated with the universal quantifier bounded by a bound B
// computed from x's certificate: if x were finite, every member's code would
// be at most B, so one verified member with code above B settles every
// n <= B, and a finite set fails at n = B already.
bool is_infinite_via_mu(const RealizationSet& x);

// Equal-cardinality witness: injective maps f, g from {0..n-1} into finite
// sequences with t in X iff g(f^-1(t)) in Y and symmetrically. f[i], g[i] are
// the images of i.
struct InjectionWitness {
    std::vector<Tuple> f;
    std::vector<Tuple> g;
    std::size_t n() const { return f.size(); }
};

// The canonical witness (f enumerates X, g enumerates Y, n = |X|) when
// |X| = |Y|, verified before returning; absent when |X| != |Y|, since any
// witness forces equal cardinality. Inputs are treated as sets.
std::optional<InjectionWitness> equal_finite_card_witness(
    const std::vector<Tuple>& x, const std::vector<Tuple>& y);

// Checks both pointwise conditions over X, Y and both ranges, plus
// injectivity and equal domains. Independent of construction so that
// tampered witnesses fail.
bool verify_card_witness(const InjectionWitness& w, const std::vector<Tuple>& x,
                         const std::vector<Tuple>& y);

// Doubled signature: each relation R of the base yields R0 and R1, adjacent
// and in base order. Equality setting carries over.
Signature product_signature(const Signature& base);

// One structure over the doubled signature holding m in the 0-copies and n in
// the 1-copies. Finite backend: universes must agree in size (SizeMismatch).
Structure product_structure(const Structure& m, const Structure& n);

// Extracts the 0-copy (first = true) or 1-copy component back to the base
// signature. Inverse of product_structure on its component.
Structure reduct(const Structure& product, bool first, const Signature& base);

// The truncated comparison sentence for f over the doubled signature:
//   AND over 1 <= n <= n_max of  (E^n free(f). f0)  <->  (E^n free(f). f1)
// with <-> spelled (a & b) | (~a & ~b) and f0, f1 the relabelings of f. For a
// sentence f this is the single biconditional f0 <-> f1 (thresholds past one
// add nothing when the only counts are zero and one). n_max = 0 throws
// TruncationTooSmall.
Formula star_encode(const Signature& base, const Formula& f, Nat n_max);

// Star encodings of a whole formula set, built once for scanning many pairs.
class StarSet {
public:
    StarSet(const FormulaSet& a, Nat n_max);

    const Signature& base_signature() const { return base_; }
    const Signature& product_sig() const { return product_; }
    const std::vector<Formula>& stars() const { return stars_; }
    Nat n_max() const { return n_max_; }
    Nat max_dimension() const { return max_dim_; }

private:
    Signature base_;
    Signature product_;
    std::vector<Formula> stars_;
    Nat n_max_;
    Nat max_dim_;
};

// Satisfaction of every star sentence on product_structure(m, n). On the
// finite backend the truncation must be lossless: n_max >= s^d + 1 for
// universe size s and d the largest free-variable count in a
// (TruncationTooSmall otherwise). On the periodic backend exact counts decide
// each threshold and n_max is the caller's choice of how far to compare.
bool remark_check(const Structure& m, const Structure& n, const FormulaSet& a,
                  Nat n_max);
bool remark_check(const Structure& m, const Structure& n, const StarSet& stars);

// Membership of the pair (m, n) in the intersection over all formulas of
// "some injection witness equates the two finite realization sets, or both
// realization sets are infinite", the two branches matching the cardinality
// case split finite-and-equal vs both-infinite.
bool borel_membership(const Structure& m, const Structure& n,
                      const FormulaSet& a);

// Bulk pairwise checker over one list of finite structures: packs every
// realization set into a bitmask over tuple slots, interns distinct
// (dimension, size, mask) values, and runs the witness machinery once per
// distinct value pair, so that pair queries are table lookups. Requires the
// finite backend and n^d <= 32 tuple slots per formula.
class BorelChecker {
public:
    BorelChecker(const std::vector<Structure>& structures, FormulaSet a);

    std::size_t size() const { return sizes_.size(); }
    const FormulaSet& formula_set() const { return a_; }

    Nat universe_size(std::size_t i) const { return sizes_[i]; }
    Count formula_count(std::size_t i, std::size_t k) const;

    // Equal counts over every formula.
    bool e_equivalent(std::size_t i, std::size_t j) const;

    // The intersection-of-clauses membership; every distinct realization-set
    // pair was decided by the real witness construction and verification.
    bool membership(std::size_t i, std::size_t j) const;

    // Truncated star comparison through the reduct identity (counts on the
    // product's components equal counts on the operands). Universe sizes must
    // match (SizeMismatch); n_max must be lossless (TruncationTooSmall).
    bool remark(std::size_t i, std::size_t j, Nat n_max) const;

private:
    FormulaSet a_;
    std::vector<Nat> sizes_;
    std::vector<Nat> dims_;                         // per formula
    std::vector<std::uint8_t> counts_;    // [i * |A| + k]
    std::vector<std::uint32_t> val_of_;   // [i * |A| + k] interned id
    std::vector<std::uint8_t> witness_ok_;  // [vi * nvals_ + vj]
    std::size_t nvals_ = 0;
};

}  // namespace distinguo
