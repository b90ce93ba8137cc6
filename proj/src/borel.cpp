#include "distinguo/borel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "distinguo/formula.hpp"

namespace distinguo {

namespace {

// Cantor pairing. Guards keep every code inside 64 bits.
std::uint64_t pair2(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        throw Error("sequence code overflows 64 bits");
    unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
    unsigned __int128 code = s * (s + 1) / 2 + b;
    if (code > std::numeric_limits<std::uint64_t>::max())
        throw Error("sequence code overflows 64 bits");
    return static_cast<std::uint64_t>(code);
}

std::pair<std::uint64_t, std::uint64_t> unpair2(std::uint64_t m) {
    // Largest s with s(s+1)/2 <= m, found from a float estimate and adjusted.
    std::uint64_t s = static_cast<std::uint64_t>(
        (std::sqrt(8.0L * static_cast<long double>(m) + 1.0L) - 1.0L) / 2.0L);
    auto tri = [](std::uint64_t v) -> unsigned __int128 {
        return static_cast<unsigned __int128>(v) * (v + 1) / 2;
    };
    while (s > 0 && tri(s) > m) --s;
    while (tri(s + 1) <= m) ++s;
    std::uint64_t b = m - static_cast<std::uint64_t>(tri(s));
    return {s - b, b};
}

std::vector<std::uint64_t> widen(const Tuple& t) {
    return std::vector<std::uint64_t>(t.begin(), t.end());
}

}  // namespace

std::vector<std::uint64_t> mu(std::uint64_t m) {
    if (m == 0) return {};
    auto [k1, pack] = unpair2(m - 1);
    std::vector<std::uint64_t> t;
    t.reserve(k1 + 1);
    for (std::uint64_t i = 0; i < k1; ++i) {
        auto [head, rest] = unpair2(pack);
        t.push_back(head);
        pack = rest;
    }
    t.push_back(pack);
    return t;
}

std::uint64_t mu_inv(const std::vector<std::uint64_t>& t) {
    if (t.empty()) return 0;
    std::uint64_t pack = t.back();
    for (std::size_t i = t.size() - 1; i-- > 0;) pack = pair2(t[i], pack);
    std::uint64_t body = pair2(t.size() - 1, pack);
    if (body == std::numeric_limits<std::uint64_t>::max())
        throw Error("sequence code overflows 64 bits");
    return 1 + body;
}

std::uint64_t tuple_code(const Tuple& t) { return mu_inv(widen(t)); }

bool is_infinite_via_mu(const RealizationSet& x) {
    const Nat d = x.dimension();
    const std::uint64_t entry_bound = x.finite_entry_bound();

    // If x were finite, every member would have entries below entry_bound, so
    // no code could exceed b. One verified member above b therefore witnesses
    // "some member code exceeds n" for every n <= b, and a finite set fails
    // that already at n = b.
    std::uint64_t b = 0;
    if (d > 0 && entry_bound > 0)
        b = mu_inv(std::vector<std::uint64_t>(d, entry_bound - 1));

    if (x.has_infinite_family()) {
        // Family member codes grow strictly with k, so the scan terminates.
        for (std::uint64_t k = 0; k <= b + 1; ++k) {
            Tuple t = x.unbounded_family_member(k);
            std::uint64_t code = tuple_code(t);
            if (code > b) return mu(code) == widen(t) && x.contains(t);
        }
        throw Error("unbounded family failed to clear its own code bound");
    }
    for (const Tuple& t : x.tuples())
        if (tuple_code(t) > b) return true;
    return false;
}

namespace {

std::vector<Tuple> sorted_set(std::vector<Tuple> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool member(const std::vector<Tuple>& sorted, const Tuple& t) {
    return std::binary_search(sorted.begin(), sorted.end(), t);
}

// Index of t in the (unsorted) image list, or npos.
std::size_t image_index(const std::vector<Tuple>& image, const Tuple& t) {
    for (std::size_t i = 0; i < image.size(); ++i)
        if (image[i] == t) return i;
    return static_cast<std::size_t>(-1);
}

}  // namespace

bool verify_card_witness(const InjectionWitness& w, const std::vector<Tuple>& x,
                         const std::vector<Tuple>& y) {
    if (w.f.size() != w.g.size()) return false;
    if (sorted_set(w.f).size() != w.f.size()) return false;
    if (sorted_set(w.g).size() != w.g.size()) return false;

    const std::vector<Tuple> xs = sorted_set(x);
    const std::vector<Tuple> ys = sorted_set(y);

    std::vector<Tuple> support = xs;
    support.insert(support.end(), ys.begin(), ys.end());
    support.insert(support.end(), w.f.begin(), w.f.end());
    support.insert(support.end(), w.g.begin(), w.g.end());
    support = sorted_set(std::move(support));

    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    for (const Tuple& t : support) {
        // t in X iff t is some f(i) whose partner g(i) lies in Y.
        std::size_t i = image_index(w.f, t);
        bool forward = i != npos && member(ys, w.g[i]);
        if (member(xs, t) != forward) return false;

        std::size_t j = image_index(w.g, t);
        bool backward = j != npos && member(xs, w.f[j]);
        if (member(ys, t) != backward) return false;
    }
    return true;
}

std::optional<InjectionWitness> equal_finite_card_witness(
    const std::vector<Tuple>& x, const std::vector<Tuple>& y) {
    const std::vector<Tuple> xs = sorted_set(x);
    const std::vector<Tuple> ys = sorted_set(y);
    // The witness conditions force a bijection between X and Y, so unequal
    // cardinalities admit none.
    if (xs.size() != ys.size()) return std::nullopt;
    InjectionWitness w{xs, ys};
    if (!verify_card_witness(w, xs, ys)) return std::nullopt;
    return w;
}

namespace {

bool same_signature(const Signature& a, const Signature& b) {
    if (a.with_equality() != b.with_equality()) return false;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.relations()[i].name != b.relations()[i].name ||
            a.relations()[i].arity != b.relations()[i].arity)
            return false;
    return true;
}

std::string copy_name(const std::string& base, bool first) {
    return base + (first ? "0" : "1");
}

// Rebuilds f over the doubled signature with every relation renamed to its
// chosen copy.
Formula relabel(const Signature& prod, const Formula& f, bool first) {
    switch (f.kind()) {
        case FormulaKind::Atom:
            return Formula::atom(prod, copy_name(f.relation(), first),
                                 f.variables());
        case FormulaKind::Equal:
            return Formula::equal(prod, f.variables()[0], f.variables()[1]);
        case FormulaKind::Not:
            return Formula::negate(relabel(prod, f.body(), first));
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> parts;
            parts.reserve(f.operands().size());
            for (const Formula& g : f.operands())
                parts.push_back(relabel(prod, g, first));
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts))
                                                : Formula::disj(std::move(parts));
        }
        case FormulaKind::Exists:
            return Formula::exists(f.bound_variable(),
                                   relabel(prod, f.body(), first));
        case FormulaKind::Forall:
            return Formula::forall(f.bound_variable(),
                                   relabel(prod, f.body(), first));
        case FormulaKind::ExistsAtLeast:
            return Formula::exists_at_least(f.threshold(), f.variables(),
                                            relabel(prod, f.body(), first));
    }
    throw Error("relabel: unhandled formula kind");
}

Formula iff(const Formula& a, const Formula& b) {
    return Formula::disj(
        {Formula::conj({a, b}),
         Formula::conj({Formula::negate(a), Formula::negate(b)})});
}

}  // namespace

Signature product_signature(const Signature& base) {
    std::vector<Relation> rels;
    rels.reserve(2 * base.size());
    for (const Relation& r : base.relations()) {
        rels.push_back({copy_name(r.name, true), r.arity});
        rels.push_back({copy_name(r.name, false), r.arity});
    }
    return Signature(std::move(rels), base.with_equality());
}

Structure product_structure(const Structure& m, const Structure& n) {
    if (!same_signature(m.signature(), n.signature()))
        throw SignatureMismatch("product operands use different signatures");
    if (m.backend() != n.backend())
        throw BackendMismatch("product operands use different backends");
    Signature prod = product_signature(m.signature());

    if (m.is_finite()) {
        const FiniteStructure& fm = m.finite();
        const FiniteStructure& fn = n.finite();
        if (fm.size() != fn.size())
            throw SizeMismatch("product needs equal universe sizes");
        std::vector<std::vector<Tuple>> interp;
        interp.reserve(2 * m.signature().size());
        for (std::size_t i = 0; i < m.signature().size(); ++i) {
            interp.push_back(fm.tuples(i));
            interp.push_back(fn.tuples(i));
        }
        return Structure(FiniteStructure(std::move(prod), fm.size(), std::move(interp)));
    }

    const PeriodicUnaryStructure& pm = m.periodic();
    const PeriodicUnaryStructure& pn = n.periodic();
    std::vector<PeriodicSet> interp;
    interp.reserve(2 * m.signature().size());
    for (std::size_t i = 0; i < m.signature().size(); ++i) {
        interp.push_back(pm.set_of(i));
        interp.push_back(pn.set_of(i));
    }
    return Structure(PeriodicUnaryStructure(std::move(prod), std::move(interp)));
}

Structure reduct(const Structure& product, bool first, const Signature& base) {
    if (!same_signature(product.signature(), product_signature(base)))
        throw SignatureMismatch("structure is not over the doubled signature");
    const std::size_t offset = first ? 0 : 1;

    if (product.is_finite()) {
        const FiniteStructure& fu = product.finite();
        std::vector<std::vector<Tuple>> interp;
        interp.reserve(base.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            interp.push_back(fu.tuples(2 * i + offset));
        return Structure(FiniteStructure(base, fu.size(), std::move(interp)));
    }

    const PeriodicUnaryStructure& pu = product.periodic();
    std::vector<PeriodicSet> interp;
    interp.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        interp.push_back(pu.set_of(2 * i + offset));
    return Structure(PeriodicUnaryStructure(base, std::move(interp)));
}

Formula star_encode(const Signature& base, const Formula& f, Nat n_max) {
    if (n_max == 0)
        throw TruncationTooSmall("comparison depth must be positive");
    validate_against(f, base);
    Signature prod = product_signature(base);
    Formula f0 = relabel(prod, f, true);
    Formula f1 = relabel(prod, f, false);

    const std::vector<Var>& free = f.free_variables();
    if (free.empty()) return iff(f0, f1);

    std::vector<Formula> clauses;
    clauses.reserve(n_max);
    for (Nat n = 1; n <= n_max; ++n)
        clauses.push_back(iff(Formula::exists_at_least(n, free, f0),
                              Formula::exists_at_least(n, free, f1)));
    return Formula::conj(std::move(clauses));
}

StarSet::StarSet(const FormulaSet& a, Nat n_max)
    : base_(a.signature()),
      product_(product_signature(base_)),
      n_max_(n_max),
      max_dim_(0) {
    if (n_max == 0)
        throw TruncationTooSmall("comparison depth must be positive");
    stars_.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        max_dim_ = std::max(max_dim_,
                            static_cast<Nat>(a[k].free_variables().size()));
        stars_.push_back(star_encode(base_, a[k], n_max));
    }
}

namespace {

// s^d with saturation; realization counts over a finite universe never exceed
// this, so n_max past it loses nothing.
std::uint64_t count_ceiling(std::uint64_t s, Nat d) {
    std::uint64_t v = 1;
    for (Nat i = 0; i < d; ++i) {
        if (s > 1 && v > std::numeric_limits<std::uint64_t>::max() / s)
            return std::numeric_limits<std::uint64_t>::max();
        v *= s;
    }
    return v;
}

void require_lossless(Nat n_max, std::uint64_t size, Nat max_dim) {
    std::uint64_t ceiling = count_ceiling(size, max_dim);
    if (ceiling == std::numeric_limits<std::uint64_t>::max() ||
        n_max < ceiling + 1)
        throw TruncationTooSmall(
            "comparison depth " + std::to_string(n_max) +
            " cannot separate all counts; need at least " +
            (ceiling == std::numeric_limits<std::uint64_t>::max()
                 ? std::string("more than 2^64")
                 : std::to_string(ceiling + 1)));
}

}  // namespace

bool remark_check(const Structure& m, const Structure& n, const StarSet& stars) {
    if (!same_signature(m.signature(), stars.base_signature()))
        throw SignatureMismatch("structures do not match the formula set");
    if (m.is_finite() && n.is_finite())
        require_lossless(stars.n_max(), m.finite().size(), stars.max_dimension());
    Structure u = product_structure(m, n);
    for (const Formula& star : stars.stars())
        if (!satisfies(u, star)) return false;
    return true;
}

bool remark_check(const Structure& m, const Structure& n, const FormulaSet& a,
                  Nat n_max) {
    return remark_check(m, n, StarSet(a, n_max));
}

bool borel_membership(const Structure& m, const Structure& n,
                      const FormulaSet& a) {
    if (!same_signature(m.signature(), a.signature()) ||
        !same_signature(n.signature(), a.signature()))
        throw SignatureMismatch("structures do not match the formula set");
    for (std::size_t k = 0; k < a.size(); ++k) {
        RealizationSet x = realizations(m, a[k]);
        RealizationSet y = realizations(n, a[k]);
        if (x.cardinality().is_finite() && y.cardinality().is_finite()) {
            if (!equal_finite_card_witness(x.tuples(), y.tuples()).has_value())
                return false;
        } else if (!is_infinite_via_mu(x) || !is_infinite_via_mu(y)) {
            return false;
        }
    }
    return true;
}

namespace {

// Tuple slot in lexicographic order over {0..size-1}^d.
std::uint32_t slot_of(const Tuple& t, Nat size) {
    std::uint32_t slot = 0;
    for (Nat v : t) slot = slot * size + v;
    return slot;
}

std::vector<Tuple> unpack_mask(Nat dim, Nat size, std::uint32_t mask) {
    std::vector<Tuple> out;
    std::uint64_t slots = 1;
    for (Nat i = 0; i < dim; ++i) slots *= size;
    for (std::uint32_t s = 0; s < slots; ++s) {
        if (!(mask >> s & 1u)) continue;
        Tuple t(dim);
        std::uint32_t rest = s;
        for (Nat p = dim; p-- > 0;) {
            t[p] = rest % size;
            rest /= size;
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

BorelChecker::BorelChecker(const std::vector<Structure>& structures,
                           FormulaSet a)
    : a_(std::move(a)) {
    const std::size_t na = a_.size();
    dims_.reserve(na);
    for (std::size_t k = 0; k < na; ++k)
        dims_.push_back(static_cast<Nat>(a_[k].free_variables().size()));

    sizes_.reserve(structures.size());
    counts_.reserve(structures.size() * na);
    val_of_.reserve(structures.size() * na);

    // Intern each (dimension, universe size, member mask) once.
    std::map<std::tuple<Nat, Nat, std::uint32_t>, std::uint32_t> ids;
    std::vector<std::tuple<Nat, Nat, std::uint32_t>> vals;

    for (const Structure& s : structures) {
        if (!s.is_finite())
            throw BackendMismatch("bulk checker needs the finite backend");
        if (!same_signature(s.signature(), a_.signature()))
            throw SignatureMismatch("structure does not match the formula set");
        const Nat size = s.finite().size();
        sizes_.push_back(size);
        for (std::size_t k = 0; k < na; ++k) {
            std::uint64_t slots = 1;
            for (Nat i = 0; i < dims_[k]; ++i) slots *= size;
            if (slots > 32)
                throw BudgetExceeded(
                    "bulk checker caps realization slots at 32 per formula");
            std::uint32_t mask = 0;
            for (const Tuple& t : realizations(s, a_[k]).tuples())
                mask |= 1u << slot_of(t, size);
            counts_.push_back(static_cast<std::uint8_t>(std::popcount(mask)));
            auto key = std::make_tuple(dims_[k], size, mask);
            auto [it, fresh] =
                ids.emplace(key, static_cast<std::uint32_t>(vals.size()));
            if (fresh) {
                vals.push_back(key);
                if (vals.size() > 2048)
                    throw BudgetExceeded(
                        "bulk checker caps distinct realization sets at 2048");
            }
            val_of_.push_back(it->second);
        }
    }

    // Decide every same-dimension value pair with the real witness machinery;
    // pair queries below are then lookups.
    nvals_ = vals.size();
    witness_ok_.assign(nvals_ * nvals_, 0);
    std::vector<std::vector<Tuple>> unpacked;
    unpacked.reserve(nvals_);
    for (const auto& [dim, size, mask] : vals)
        unpacked.push_back(unpack_mask(dim, size, mask));
    for (std::size_t vi = 0; vi < nvals_; ++vi)
        for (std::size_t vj = 0; vj < nvals_; ++vj) {
            if (std::get<0>(vals[vi]) != std::get<0>(vals[vj])) continue;
            witness_ok_[vi * nvals_ + vj] =
                equal_finite_card_witness(unpacked[vi], unpacked[vj])
                    .has_value();
        }
}

Count BorelChecker::formula_count(std::size_t i, std::size_t k) const {
    return Count::finite(counts_[i * a_.size() + k]);
}

bool BorelChecker::e_equivalent(std::size_t i, std::size_t j) const {
    const std::size_t na = a_.size();
    const std::uint8_t* ci = counts_.data() + i * na;
    const std::uint8_t* cj = counts_.data() + j * na;
    return std::equal(ci, ci + na, cj);
}

bool BorelChecker::membership(std::size_t i, std::size_t j) const {
    const std::size_t na = a_.size();
    const std::uint32_t* vi = val_of_.data() + i * na;
    const std::uint32_t* vj = val_of_.data() + j * na;
    for (std::size_t k = 0; k < na; ++k)
        if (!witness_ok_[vi[k] * nvals_ + vj[k]]) return false;
    return true;
}

bool BorelChecker::remark(std::size_t i, std::size_t j, Nat n_max) const {
    if (sizes_[i] != sizes_[j])
        throw SizeMismatch("truncated comparison needs equal universe sizes");
    Nat max_dim = 0;
    for (Nat d : dims_) max_dim = std::max(max_dim, d);
    require_lossless(n_max, sizes_[i], max_dim);

    // Counts on the product's two copies equal counts on the operands, so
    // each star clause compares thresholds of the packed counts.
    const std::size_t na = a_.size();
    for (std::size_t k = 0; k < na; ++k) {
        std::uint8_t ci = counts_[i * na + k];
        std::uint8_t cj = counts_[j * na + k];
        for (Nat n = 1; n <= n_max; ++n)
            if ((ci >= n) != (cj >= n)) return false;
    }
    return true;
}

}  // namespace distinguo
