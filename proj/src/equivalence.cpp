#include "distinguo/equivalence.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "distinguo/errors.hpp"

namespace distinguo {

namespace {

Nat to_nat(std::uint64_t x) {
    if (x > std::numeric_limits<Nat>::max())
        throw Error("universe element " + std::to_string(x) + " out of range");
    return static_cast<Nat>(x);
}

void require_same_signature(const Structure& m, const Structure& n) {
    if (!(m.signature() == n.signature()))
        throw SignatureMismatch("structures use different signatures");
}

void require_same_backend(const Structure& m, const Structure& n) {
    if (m.backend() != n.backend())
        throw BackendMismatch("structures live on different backends");
}

}  // namespace

FinitePermutation::FinitePermutation(std::vector<Nat> image)
    : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (Nat v : image_) {
        if (v >= image_.size() || seen[v])
            throw NotABijection("image is not a permutation of {0.." +
                                std::to_string(image_.size()) + "-1}");
        seen[v] = true;
    }
}

FinitePermutation FinitePermutation::identity(Nat n) {
    std::vector<Nat> image(n);
    std::iota(image.begin(), image.end(), Nat{0});
    return FinitePermutation(std::move(image));
}

Nat FinitePermutation::operator()(Nat x) const {
    if (x >= image_.size())
        throw OutOfUniverse("permutation of size " +
                            std::to_string(image_.size()) + " applied to " +
                            std::to_string(x));
    return image_[x];
}

Tuple FinitePermutation::apply(const Tuple& t) const {
    Tuple out;
    out.reserve(t.size());
    for (Nat v : t) out.push_back((*this)(v));
    return out;
}

FinitePermutation FinitePermutation::compose(const FinitePermutation& h) const {
    if (size() != h.size())
        throw NotABijection("composing permutations of different sizes");
    std::vector<Nat> image(size());
    for (Nat x = 0; x < size(); ++x) image[x] = image_[h.image_[x]];
    return FinitePermutation(std::move(image));
}

FinitePermutation FinitePermutation::inverse() const {
    std::vector<Nat> image(size());
    for (Nat x = 0; x < size(); ++x) image[image_[x]] = x;
    return FinitePermutation(std::move(image));
}

ClassBijection::ClassBijection(
    std::vector<std::pair<PeriodicSet, PeriodicSet>> parts)
    : parts_(std::move(parts)) {
    PeriodicSet from_union = PeriodicSet::empty();
    PeriodicSet to_union = PeriodicSet::empty();
    for (const auto& [from, to] : parts_) {
        if (!(from.cardinality() == to.cardinality()))
            throw NotABijection(
                "paired parts of a class bijection differ in cardinality");
        if (!from.intersect(from_union).is_empty() ||
            !to.intersect(to_union).is_empty())
            throw NotABijection("class bijection parts overlap");
        from_union = from_union.unite(from);
        to_union = to_union.unite(to);
    }
    if (!(from_union == PeriodicSet::all()) || !(to_union == PeriodicSet::all()))
        throw NotABijection("class bijection parts do not cover N");
}

std::uint64_t ClassBijection::apply(std::uint64_t x) const {
    for (const auto& [from, to] : parts_)
        if (from.contains(x)) return to.nth_member(from.rank_of(x));
    throw NotABijection("element outside every part");  // parts cover N
}

std::optional<DistinguishWitness> distinguishable(const Structure& m,
                                                  const Structure& n,
                                                  const FormulaSet& a) {
    require_same_signature(m, n);
    require_same_backend(m, n);
    if (!(m.signature() == a.signature()))
        throw SignatureMismatch("formula set signature differs from structures");
    for (const Formula& f : a.formulas()) {
        Count cm = count(m, f);
        Count cn = count(n, f);
        if (!(cm == cn)) return DistinguishWitness{f, cm, cn};
    }
    return std::nullopt;
}

EquivReport e_equiv(const Structure& m, const Structure& n, const FormulaSet& a) {
    EquivReport report;
    report.relation = "E_A";
    auto witness = distinguishable(m, n, a);
    report.verdict = !witness.has_value();
    report.distinguishing = std::move(witness);
    return report;
}

namespace {

// Per-element incidence profile: for each relation and argument position, how
// many tuples put the element there. Isomorphisms preserve it.
std::vector<std::vector<Nat>> incidence_profiles(const FiniteStructure& s) {
    std::size_t slots = 0;
    for (const Relation& r : s.signature().relations()) slots += r.arity;
    std::vector<std::vector<Nat>> prof(s.size(), std::vector<Nat>(slots, 0));
    std::size_t base = 0;
    for (std::size_t r = 0; r < s.signature().relations().size(); ++r) {
        for (const Tuple& t : s.tuples(r))
            for (std::size_t p = 0; p < t.size(); ++p) ++prof[t[p]][base + p];
        base += s.signature().relations()[r].arity;
    }
    return prof;
}

// Full relation-preservation check for a completed candidate map.
bool is_isomorphism(const FiniteStructure& m, const FiniteStructure& n,
                    const FinitePermutation& g) {
    for (std::size_t r = 0; r < m.signature().relations().size(); ++r) {
        if (m.tuples(r).size() != n.tuples(r).size()) return false;
        for (const Tuple& t : m.tuples(r))
            if (!n.holds(r, g.apply(t))) return false;
    }
    return true;
}

class IsoSearch {
public:
    IsoSearch(const FiniteStructure& m, const FiniteStructure& n,
              const SearchLimits& limits)
        : m_(m), n_(n), limits_(limits) {}

    std::optional<FinitePermutation> run() {
        if (m_.size() != n_.size()) return std::nullopt;
        for (std::size_t r = 0; r < m_.signature().relations().size(); ++r)
            if (m_.tuples(r).size() != n_.tuples(r).size()) return std::nullopt;

        prof_m_ = incidence_profiles(m_);
        prof_n_ = incidence_profiles(n_);
        {
            auto sm = prof_m_;
            auto sn = prof_n_;
            std::sort(sm.begin(), sm.end());
            std::sort(sn.begin(), sn.end());
            if (sm != sn) return std::nullopt;
        }

        // Rarest candidate sets first.
        order_.resize(m_.size());
        std::iota(order_.begin(), order_.end(), Nat{0});
        std::vector<std::size_t> cand_count(m_.size(), 0);
        for (Nat a = 0; a < m_.size(); ++a)
            for (Nat b = 0; b < n_.size(); ++b)
                if (prof_m_[a] == prof_n_[b]) ++cand_count[a];
        std::sort(order_.begin(), order_.end(), [&](Nat a, Nat b) {
            if (cand_count[a] != cand_count[b])
                return cand_count[a] < cand_count[b];
            return a < b;
        });

        map_.assign(m_.size(), -1);
        used_.assign(n_.size(), false);
        if (!extend(0)) return std::nullopt;

        std::vector<Nat> image(m_.size());
        for (Nat a = 0; a < m_.size(); ++a)
            image[a] = static_cast<Nat>(map_[a]);
        FinitePermutation g(std::move(image));
        if (!is_isomorphism(m_, n_, g)) return std::nullopt;  // defensive
        return g;
    }

private:
    bool extend(std::size_t depth) {
        if (++nodes_ > limits_.max_nodes)
            throw BudgetExceeded("isomorphism search exceeded " +
                                 std::to_string(limits_.max_nodes) + " nodes");
        if (depth == order_.size()) return true;
        Nat a = order_[depth];
        for (Nat b = 0; b < n_.size(); ++b) {
            if (used_[b] || prof_m_[a] != prof_n_[b]) continue;
            map_[a] = static_cast<std::int64_t>(b);
            used_[b] = true;
            if (consistent(a) && extend(depth + 1)) return true;
            map_[a] = -1;
            used_[b] = false;
        }
        return false;
    }

    // Tuples whose entries are all mapped must hold on both sides or neither.
    // Checking both directions keeps pruning sound without counting arguments.
    bool consistent(Nat last) const {
        for (std::size_t r = 0; r < m_.signature().relations().size(); ++r) {
            for (const Tuple& t : m_.tuples(r)) {
                bool touches = false, total = true;
                Tuple image(t.size());
                for (std::size_t p = 0; p < t.size(); ++p) {
                    if (t[p] == last) touches = true;
                    if (map_[t[p]] < 0) {
                        total = false;
                        break;
                    }
                    image[p] = static_cast<Nat>(map_[t[p]]);
                }
                if (touches && total && !n_.holds(r, image)) return false;
            }
            for (const Tuple& u : n_.tuples(r)) {
                bool touches = false, total = true;
                Tuple pre(u.size());
                for (std::size_t p = 0; p < u.size(); ++p) {
                    if (inv(u[p]) < 0) {
                        total = false;
                        break;
                    }
                    pre[p] = static_cast<Nat>(inv(u[p]));
                    if (pre[p] == last) touches = true;
                }
                if (touches && total && !m_.holds(r, pre)) return false;
            }
        }
        return true;
    }

    std::int64_t inv(Nat b) const {
        for (Nat a = 0; a < m_.size(); ++a)
            if (map_[a] == static_cast<std::int64_t>(b)) return a;
        return -1;
    }

    const FiniteStructure& m_;
    const FiniteStructure& n_;
    SearchLimits limits_;
    std::vector<std::vector<Nat>> prof_m_, prof_n_;
    std::vector<Nat> order_;
    std::vector<std::int64_t> map_;
    std::vector<bool> used_;
    std::uint64_t nodes_ = 0;
};

EquivReport periodic_isomorphic(const PeriodicUnaryStructure& m,
                                const PeriodicUnaryStructure& n) {
    EquivReport report;
    report.relation = "iso";
    auto cm = color_classes(m);
    auto cn = color_classes(n);
    for (std::size_t i = 0; i < cm.size(); ++i)
        if (!(cm[i].members.cardinality() == cn[i].members.cardinality())) {
            report.verdict = false;
            return report;
        }
    // Same cardinality in every class: map each class onto its counterpart
    // order-preservingly. The union is a permutation of N.
    std::vector<std::pair<PeriodicSet, PeriodicSet>> parts;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        if (cm[i].members.is_empty()) continue;
        parts.emplace_back(cm[i].members, cn[i].members);
    }
    report.verdict = true;
    report.witness = Permutation{ClassBijection(std::move(parts))};
    return report;
}

}  // namespace

EquivReport isomorphic(const Structure& m, const Structure& n,
                       const SearchLimits& limits) {
    require_same_signature(m, n);
    require_same_backend(m, n);
    if (!m.is_finite()) return periodic_isomorphic(m.periodic(), n.periodic());

    EquivReport report;
    report.relation = "iso";
    IsoSearch search(m.finite(), n.finite(), limits);
    auto g = search.run();
    report.verdict = g.has_value();
    if (g) report.witness = Permutation{std::move(*g)};
    return report;
}

namespace {

Structure act_finite(const FinitePermutation& g, const FiniteStructure& m) {
    if (g.size() != m.size())
        throw NotABijection("permutation size " + std::to_string(g.size()) +
                            " does not match universe size " +
                            std::to_string(m.size()));
    std::vector<std::vector<Tuple>> interp;
    interp.reserve(m.signature().relations().size());
    for (std::size_t r = 0; r < m.signature().relations().size(); ++r) {
        std::vector<Tuple> tuples;
        tuples.reserve(m.tuples(r).size());
        for (const Tuple& t : m.tuples(r)) tuples.push_back(g.apply(t));
        interp.push_back(std::move(tuples));
    }
    return Structure(FiniteStructure(m.signature(), m.size(), std::move(interp)));
}

// Finite-support action on a periodic structure: relabel the first g.size()
// elements, leave the tail alone.
Structure act_periodic(const FinitePermutation& g,
                       const PeriodicUnaryStructure& m) {
    std::vector<PeriodicSet> interp;
    for (const PeriodicSet& s : m.interpretations()) {
        const std::size_t p = s.prefix().size();
        const std::size_t c = s.cycle().size();
        const std::size_t len = std::max<std::size_t>(p, g.size());
        PeriodicSet::Bits bits(len, 0);
        for (std::size_t i = 0; i < len; ++i) bits[i] = s.contains(i) ? 1 : 0;
        PeriodicSet::Bits moved = bits;
        for (Nat i = 0; i < g.size(); ++i) moved[g(i)] = bits[i];
        // Membership above len still follows the cycle, now offset by len - p.
        PeriodicSet::Bits cyc(s.cycle());
        std::rotate(cyc.begin(),
                    cyc.begin() + static_cast<std::ptrdiff_t>((len - p) % c),
                    cyc.end());
        interp.emplace_back(std::move(moved), std::move(cyc));
    }
    return Structure(PeriodicUnaryStructure(m.signature(), std::move(interp)));
}

}  // namespace

Structure act(const Permutation& g, const Structure& m) {
    if (std::holds_alternative<ClassBijection>(g))
        throw NotABijection(
            "class bijections are not finitely supported; act needs a finite "
            "permutation");
    const FinitePermutation& fp = std::get<FinitePermutation>(g);
    if (m.is_finite()) return act_finite(fp, m.finite());
    return act_periodic(fp, m.periodic());
}

namespace {

using PebblePairs = std::vector<std::pair<Nat, Nat>>;

// Injective partial-isomorphism condition over the pebbled pairs: equalities
// must match in both directions and every relation must agree on every tuple
// assembled from pebbles.
bool partial_iso(const FiniteStructure& m, const FiniteStructure& n,
                 const PebblePairs& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j)
            if ((pairs[i].first == pairs[j].first) !=
                (pairs[i].second == pairs[j].second))
                return false;
    const auto& rels = m.signature().relations();
    for (std::size_t r = 0; r < rels.size(); ++r) {
        const Nat ar = rels[r].arity;
        std::vector<std::size_t> idx(ar, 0);
        if (pairs.empty()) continue;
        for (bool done = false; !done;) {
            Tuple tm(ar), tn(ar);
            for (Nat p = 0; p < ar; ++p) {
                tm[p] = pairs[idx[p]].first;
                tn[p] = pairs[idx[p]].second;
            }
            if (m.holds(r, tm) != n.holds(r, tn)) return false;
            std::size_t pos = ar;
            for (;;) {
                if (pos == 0) {
                    done = true;
                    break;
                }
                --pos;
                if (++idx[pos] < pairs.size()) break;
                idx[pos] = 0;
            }
        }
    }
    return true;
}

// Color mask of an element of a finite structure over an all-unary signature.
Nat unary_mask(const FiniteStructure& s, Nat e) {
    Nat mask = 0;
    for (std::size_t r = 0; r < s.signature().relations().size(); ++r)
        if (s.holds(r, {e})) mask |= Nat{1} << r;
    return mask;
}

class EfGame {
public:
    EfGame(const FiniteStructure& m, const FiniteStructure& n,
           const SearchLimits& limits)
        : m_(m), n_(n), limits_(limits), unary_(m.signature().all_unary()) {}

    bool spoiler_wins(PebblePairs pairs, Nat rounds) {
        normalize(pairs);
        if (rounds == 0) return false;
        auto key = std::make_pair(pairs, rounds);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (++nodes_ > limits_.max_nodes)
            throw BudgetExceeded("game search exceeded " +
                                 std::to_string(limits_.max_nodes) + " nodes");

        bool wins = false;
        for (bool in_first : {true, false}) {
            for (Nat a : moves(in_first, pairs)) {
                bool survivable = false;
                for (Nat b : moves(!in_first, pairs)) {
                    PebblePairs next = pairs;
                    next.emplace_back(in_first ? a : b, in_first ? b : a);
                    if (!partial_iso(m_, n_, next)) continue;
                    if (!spoiler_wins(std::move(next), rounds - 1)) {
                        survivable = true;
                        break;
                    }
                }
                if (!survivable) {
                    wins = true;
                    break;
                }
            }
            if (wins) break;
        }
        memo_.emplace(std::make_pair(std::move(pairs), rounds), wins);
        return wins;
    }

    // Principal variation of a spoiler win: his winning move each round, the
    // duplicator's best reply, until no reply preserves the condition.
    std::vector<EfMove> trace(PebblePairs pairs, Nat rounds) {
        std::vector<EfMove> out;
        while (rounds > 0 && spoiler_wins(pairs, rounds)) {
            std::optional<EfMove> round_move;
            for (bool in_first : {true, false}) {
                if (round_move) break;
                for (Nat a : moves(in_first, pairs)) {
                    bool survivable = false;
                    std::optional<Nat> reply;
                    for (Nat b : moves(!in_first, pairs)) {
                        PebblePairs next = pairs;
                        next.emplace_back(in_first ? a : b, in_first ? b : a);
                        if (!partial_iso(m_, n_, next)) continue;
                        if (!spoiler_wins(std::move(next), rounds - 1)) {
                            survivable = true;
                            break;
                        }
                        if (!reply) reply = b;
                    }
                    if (survivable) continue;
                    round_move = EfMove{in_first, a, reply};
                    break;
                }
            }
            if (!round_move) break;  // unreachable: spoiler_wins promised a move
            out.push_back(*round_move);
            if (!round_move->duplicator_reply) break;
            Nat a = round_move->spoiler_element;
            Nat b = *round_move->duplicator_reply;
            pairs.emplace_back(round_move->spoiler_in_first ? a : b,
                               round_move->spoiler_in_first ? b : a);
            --rounds;
        }
        return out;
    }

private:
    // Spoiler and duplicator move candidates. Over an all-unary signature,
    // unpebbled elements of one color class are interchangeable by an
    // automorphism, so one representative per class suffices (replaying a
    // pebbled element never helps either player).
    std::vector<Nat> moves(bool in_first, const PebblePairs& pairs) const {
        const FiniteStructure& s = in_first ? m_ : n_;
        if (!unary_) {
            std::vector<Nat> all(s.size());
            std::iota(all.begin(), all.end(), Nat{0});
            return all;
        }
        std::vector<bool> pebbled(s.size(), false);
        for (const auto& [a, b] : pairs) pebbled[in_first ? a : b] = true;
        std::vector<Nat> out;
        std::vector<bool> seen_mask(std::size_t{1}
                                        << s.signature().relations().size(),
                                    false);
        for (Nat e = 0; e < s.size(); ++e) {
            if (pebbled[e]) continue;
            Nat mask = unary_mask(s, e);
            if (seen_mask[mask]) continue;
            seen_mask[mask] = true;
            out.push_back(e);
        }
        return out;
    }

    static void normalize(PebblePairs& pairs) {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }

    const FiniteStructure& m_;
    const FiniteStructure& n_;
    SearchLimits limits_;
    bool unary_;
    std::map<std::pair<PebblePairs, Nat>, bool> memo_;
    std::uint64_t nodes_ = 0;
};

Count capped(const Count& c, Nat q) {
    if (c.is_infinite()) return Count::finite(q);
    return Count::finite(std::min<std::uint64_t>(c.value(), q));
}

EquivReport periodic_ef(const PeriodicUnaryStructure& m,
                        const PeriodicUnaryStructure& n, Nat q) {
    EquivReport report;
    report.relation = "ef_rank_" + std::to_string(q);
    auto cm = color_classes(m);
    auto cn = color_classes(n);
    for (std::size_t i = 0; i < cm.size(); ++i) {
        Count a = capped(cm[i].members.cardinality(), q);
        Count b = capped(cn[i].members.cardinality(), q);
        if (a == b) continue;

        // Spoiler strategy: keep playing fresh elements of the larger class;
        // the duplicator runs out after `small` distinct replies.
        report.verdict = false;
        bool first_larger = a > b;
        const PeriodicSet& big =
            (first_larger ? cm[i] : cn[i]).members;
        const PeriodicSet& small_side =
            (first_larger ? cn[i] : cm[i]).members;
        std::uint64_t small = (first_larger ? b : a).value();
        std::vector<EfMove> moves;
        for (std::uint64_t k = 0; k <= small; ++k) {
            EfMove mv;
            mv.spoiler_in_first = first_larger;
            mv.spoiler_element = to_nat(big.nth_member(k));
            if (k < small) mv.duplicator_reply = to_nat(small_side.nth_member(k));
            moves.push_back(mv);
        }
        report.spoiler_trace = std::move(moves);
        return report;
    }
    report.verdict = true;
    return report;
}

}  // namespace

EquivReport ef_equiv(const Structure& m, const Structure& n, Nat q,
                     const SearchLimits& limits) {
    require_same_signature(m, n);
    require_same_backend(m, n);
    if (!m.is_finite()) return periodic_ef(m.periodic(), n.periodic(), q);

    EquivReport report;
    report.relation = "ef_rank_" + std::to_string(q);
    EfGame game(m.finite(), n.finite(), limits);
    bool spoiler = game.spoiler_wins({}, q);
    report.verdict = !spoiler;
    if (spoiler) report.spoiler_trace = game.trace({}, q);
    return report;
}

namespace {

void require_uniform(const std::vector<Structure>& structures) {
    for (std::size_t i = 1; i < structures.size(); ++i) {
        require_same_signature(structures[0], structures[i]);
        require_same_backend(structures[0], structures[i]);
    }
}

Classification from_buckets(std::vector<std::vector<std::size_t>> classes) {
    for (auto& c : classes) std::sort(c.begin(), c.end());
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return Classification{std::move(classes)};
}

}  // namespace

Classification classify_ea(const std::vector<Structure>& structures,
                           const FormulaSet& a) {
    require_uniform(structures);
    std::map<std::vector<Count>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < structures.size(); ++i) {
        std::vector<Count> vec;
        vec.reserve(a.size());
        for (const Formula& f : a.formulas())
            vec.push_back(count(structures[i], f));
        buckets[std::move(vec)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> classes;
    classes.reserve(buckets.size());
    for (auto& [key, members] : buckets) classes.push_back(std::move(members));
    return from_buckets(std::move(classes));
}

Classification classify_iso(const std::vector<Structure>& structures,
                            const SearchLimits& limits) {
    require_uniform(structures);
    if (structures.empty()) return Classification{};

    if (!structures[0].is_finite()) {
        // Color-class cardinalities are a complete isomorphism invariant for
        // unary structures, so bucketing by them is the whole classification.
        std::map<std::vector<Count>, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < structures.size(); ++i) {
            std::vector<Count> key;
            for (const ColorClass& c : color_classes(structures[i].periodic()))
                key.push_back(c.members.cardinality());
            buckets[std::move(key)].push_back(i);
        }
        std::vector<std::vector<std::size_t>> classes;
        for (auto& [key, members] : buckets) classes.push_back(std::move(members));
        return from_buckets(std::move(classes));
    }

    // Bucket by a cheap invariant, then pairwise checks against class
    // representatives inside each bucket.
    std::map<std::vector<std::vector<Nat>>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < structures.size(); ++i) {
        auto prof = incidence_profiles(structures[i].finite());
        std::sort(prof.begin(), prof.end());
        prof.push_back({structures[i].finite().size()});
        buckets[std::move(prof)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> classes;
    for (auto& [key, members] : buckets) {
        std::vector<std::pair<std::size_t, std::size_t>> reps;  // (index, class)
        for (std::size_t i : members) {
            bool placed = false;
            for (auto [r, ci] : reps) {
                if (isomorphic(structures[i], structures[r], limits).verdict) {
                    classes[ci].push_back(i);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                reps.emplace_back(i, classes.size());
                classes.push_back({i});
            }
        }
    }
    return from_buckets(std::move(classes));
}

Classification classify_ef(const std::vector<Structure>& structures, Nat q,
                           const SearchLimits& limits) {
    require_uniform(structures);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < structures.size(); ++i) {
        bool placed = false;
        for (auto& c : classes) {
            if (ef_equiv(structures[i], structures[c.front()], q, limits)
                    .verdict) {
                c.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) classes.push_back({i});
    }
    return from_buckets(std::move(classes));
}

}  // namespace distinguo
