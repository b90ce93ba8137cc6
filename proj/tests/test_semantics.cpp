// Evaluation, realization sets, and counting, checked against a test-local
// brute-force evaluator that relativizes quantifiers to a bounded universe.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string_view>
#include <vector>

#include "distinguo/equivalence.hpp"
#include "distinguo/fragment.hpp"
#include "distinguo/parser.hpp"
#include "distinguo/semantics.hpp"

#include "doctest.h"

using namespace distinguo;

namespace {

Formula parse_formula(const Signature& sig, std::string_view text) { return parse(text, sig); }

Signature sig_r() { return Signature({{"R", 1}}, false); }
Signature sig_r_eq() { return Signature({{"R", 1}}, true); }
Signature sig_rs() { return Signature({{"R", 1}, {"S", 2}}, true); }

// Reference evaluator: quantifiers range over {0..universe-1}, atoms are
// answered by a callback. Correct for finite structures with universe = n.
// For ultimately periodic unary structures it is correct once universe is
// at least prefix + cycle * (rank + named variables): past the prefix every
// element has unboundedly many automorphic copies, so a large enough initial
// segment supplies fresh representatives for every quantifier.
struct BruteEval {
    Signature sig;
    std::function<bool(std::size_t, const Tuple&)> holds;
    std::uint64_t universe = 0;

    bool eval(const Formula& f, std::map<std::uint64_t, std::uint64_t>& env) const {
        switch (f.kind()) {
            case FormulaKind::Atom: {
                Tuple t;
                for (Var v : f.variables()) t.push_back(env.at(v.index()));
                return holds(sig.index_of(f.relation()), t);
            }
            case FormulaKind::Equal:
                return env.at(f.variables()[0].index()) == env.at(f.variables()[1].index());
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
                std::uint64_t x = f.bound_variable().index();
                auto prev = env.find(x);
                bool had = prev != env.end();
                std::uint64_t old = had ? prev->second : 0;
                bool want = f.kind() == FormulaKind::Exists;
                bool out = !want;
                for (std::uint64_t a = 0; a < universe; ++a) {
                    env[x] = a;
                    if (eval(f.body(), env) == want) {
                        out = want;
                        break;
                    }
                }
                if (had)
                    env[x] = old;
                else
                    env.erase(x);
                return out;
            }
            case FormulaKind::ExistsAtLeast: {
                const std::vector<Var>& bound = f.variables();
                std::vector<std::uint64_t> saved(bound.size());
                std::vector<bool> had(bound.size());
                for (std::size_t i = 0; i < bound.size(); ++i) {
                    auto it = env.find(bound[i].index());
                    had[i] = it != env.end();
                    if (had[i]) saved[i] = it->second;
                }
                std::uint64_t found = 0;
                Tuple t(bound.size(), 0);
                // odometer over universe^|bound|; the empty product is {()}
                bool done = false;
                while (!done) {
                    for (std::size_t i = 0; i < bound.size(); ++i)
                        env[bound[i].index()] = t[i];
                    if (eval(f.body(), env)) ++found;
                    if (found >= f.threshold()) break;
                    done = true;
                    for (std::size_t i = bound.size(); i-- > 0;) {
                        if (++t[i] < universe) {
                            done = false;
                            break;
                        }
                        t[i] = 0;
                    }
                }
                for (std::size_t i = 0; i < bound.size(); ++i) {
                    if (had[i])
                        env[bound[i].index()] = saved[i];
                    else
                        env.erase(bound[i].index());
                }
                return found >= f.threshold();
            }
        }
        return false;
    }

    bool operator()(const Formula& f, const Assignment& a) const {
        std::map<std::uint64_t, std::uint64_t> env;
        const std::vector<Var>& free = f.free_variables();
        REQUIRE(free.size() == a.size());
        for (std::size_t i = 0; i < free.size(); ++i) env[free[i].index()] = a[i];
        return eval(f, env);
    }
};

BruteEval brute_for(const Structure& m, std::uint64_t universe) {
    if (m.is_finite()) {
        const FiniteStructure* s = &m.finite();
        return {m.signature(), [s](std::size_t r, const Tuple& t) { return s->holds(r, t); },
                universe};
    }
    const PeriodicUnaryStructure* s = &m.periodic();
    return {m.signature(),
            [s](std::size_t r, const Tuple& t) { return s->set_of(r).contains(t.at(0)); },
            universe};
}

FiniteStructure fin_r(Nat n, std::vector<Tuple> r) {
    return make_finite(sig_r(), n, {{"R", std::move(r)}});
}

Structure evens() {
    return Structure(PeriodicUnaryStructure(sig_r(), {PeriodicSet({}, {1, 0})}));
}

// Every ultimately periodic unary structure with prefix length <= max_p and
// cycle length <= max_c over {R}.
std::vector<PeriodicUnaryStructure> all_periodic_r(const Signature& sig, std::size_t max_p,
                                                   std::size_t max_c) {
    std::vector<PeriodicUnaryStructure> out;
    for (std::size_t pl = 0; pl <= max_p; ++pl) {
        for (std::uint64_t pb = 0; pb < (1ull << pl); ++pb) {
            PeriodicSet::Bits prefix(pl);
            for (std::size_t i = 0; i < pl; ++i) prefix[i] = (pb >> i) & 1;
            for (std::size_t cl = 1; cl <= max_c; ++cl) {
                for (std::uint64_t cb = 0; cb < (1ull << cl); ++cb) {
                    PeriodicSet::Bits cycle(cl);
                    for (std::size_t i = 0; i < cl; ++i) cycle[i] = (cb >> i) & 1;
                    out.emplace_back(sig, std::vector<PeriodicSet>{PeriodicSet(prefix, cycle)});
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("satisfies on the finite backend matches direct evaluation") {
    Structure m(fin_r(3, {{0}, {2}}));
    Formula r0 = parse_formula(sig_r(), "R(v0)");

    CHECK(satisfies(m, r0, {2}));
    CHECK(satisfies(m, r0, {0}));
    CHECK_FALSE(satisfies(m, r0, {1}));

    CHECK(satisfies(m, parse_formula(sig_r(), "E v0. R(v0)")));
    CHECK_FALSE(satisfies(m, parse_formula(sig_r(), "A v0. R(v0)")));
    CHECK(satisfies(m, parse_formula(sig_r(), "E^2 (v0). R(v0)")));
    CHECK_FALSE(satisfies(m, parse_formula(sig_r(), "E^3 (v0). R(v0)")));
}

TEST_CASE("binary relation example: E v1. S(v0,v1) fails at a sink") {
    FiniteStructure s = make_finite(sig_rs(), 2, {{"R", {}}, {"S", {{0, 1}}}});
    Structure m(s);
    Formula f = parse_formula(sig_rs(), "E v1. S(v0,v1)");

    CHECK(satisfies(m, f, {0}));
    CHECK_FALSE(satisfies(m, f, {1}));

    BruteEval oracle = brute_for(m, 2);
    CHECK(oracle(f, {0}) == satisfies(m, f, {0}));
    CHECK(oracle(f, {1}) == satisfies(m, f, {1}));
}

TEST_CASE("satisfies on the periodic backend: spot checks") {
    Structure m = evens();
    CHECK(satisfies(m, parse_formula(sig_r(), "A v0. (R(v0) | ~R(v0))")));
    CHECK(satisfies(m, parse_formula(sig_r(), "E v0. R(v0)")));
    CHECK(satisfies(m, parse_formula(sig_r(), "E v0. ~R(v0)")));
    CHECK(satisfies(m, parse_formula(sig_r(), "R(v0)"), {4}));
    CHECK_FALSE(satisfies(m, parse_formula(sig_r(), "R(v0)"), {5}));

    Signature eq = sig_r_eq();
    // every element has a distinct element of the same color
    CHECK(satisfies(Structure(PeriodicUnaryStructure(eq, {PeriodicSet({}, {1, 0})})),
                    parse_formula(eq, "A v0. E v1. (~v0 = v1 & (~R(v0) | R(v1)) & (R(v0) | ~R(v1)))")));
    // but not when the color is carried by a single element
    CHECK_FALSE(satisfies(Structure(PeriodicUnaryStructure(eq, {PeriodicSet({1}, {0})})),
                          parse_formula(eq, "A v0. E v1. (~v0 = v1 & (~R(v0) | R(v1)) & (R(v0) | ~R(v1)))")));
}

TEST_CASE("periodic evaluation agrees with a stabilized bounded-universe oracle") {
    Signature sig = sig_r_eq();
    std::vector<PeriodicUnaryStructure> structures = all_periodic_r(sig, 4, 3);
    std::vector<Formula> formulas = generate_fragment(sig, 2, 2).formulas();
    // thin both lists to keep the product affordable
    std::vector<Formula> sample;
    for (std::size_t i = 0; i < formulas.size(); i += 7) sample.push_back(formulas[i]);

    std::size_t checked = 0;
    for (std::size_t si = 0; si < structures.size(); si += 5) {
        const PeriodicUnaryStructure& p = structures[si];
        Structure m(p);
        Nat prefix = static_cast<Nat>(p.set_of(0).prefix().size());
        Nat cycle = static_cast<Nat>(p.set_of(0).cycle().size());
        for (const Formula& f : sample) {
            std::uint64_t d = f.free_variables().size();
            std::uint64_t b1 = prefix + cycle * (f.quantifier_rank() + d + 1);
            BruteEval o1 = brute_for(m, b1);
            BruteEval o2 = brute_for(m, b1 + cycle);
            std::vector<Assignment> probes;
            if (d == 0) {
                probes.push_back({});
            } else {
                std::vector<Nat> vals = {0, 1, prefix, prefix + 1, prefix + cycle};
                for (Nat a : vals) {
                    if (d == 1) {
                        probes.push_back({a});
                    } else {
                        for (Nat b : vals) probes.push_back({a, b});
                    }
                }
            }
            for (const Assignment& asg : probes) {
                bool got = satisfies(m, f, asg);
                bool ref = o1(f, asg);
                REQUIRE(ref == o2(f, asg));  // oracle has stabilized
                REQUIRE(got == ref);
                ++checked;
            }
        }
    }
    CHECK(checked > 5000);
}

TEST_CASE("finite evaluation agrees with the reference evaluator") {
    Signature sig = sig_rs();
    std::vector<Formula> formulas = generate_fragment(sig, 2, 2).formulas();
    std::vector<Formula> sample;
    for (std::size_t i = 0; i < formulas.size(); i += 11) sample.push_back(formulas[i]);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        Nat n = 2 + trial % 3;
        std::vector<Tuple> r, s;
        for (Nat a = 0; a < n; ++a) {
            if (rng() & 1) r.push_back({a});
            for (Nat b = 0; b < n; ++b)
                if (rng() & 1) s.push_back({a, b});
        }
        Structure m(make_finite(sig, n, {{"R", r}, {"S", s}}));
        BruteEval oracle = brute_for(m, n);
        for (const Formula& f : sample) {
            std::uint64_t d = f.free_variables().size();
            Tuple asg(d, 0);
            for (auto& v : asg) v = rng() % n;
            CHECK(satisfies(m, f, asg) == oracle(f, asg));
        }
    }
}

TEST_CASE("realizations: explicit sets on the finite backend") {
    Structure m(fin_r(3, {{0}, {2}}));
    RealizationSet r = realizations(m, parse_formula(sig_r(), "R(v0)"));
    CHECK(r.representation() == RealizationRep::Explicit);
    CHECK(r.dimension() == 1);
    CHECK(r.tuples() == std::vector<Tuple>{{0}, {2}});
    CHECK(r.cardinality() == Count::finite(2));
    CHECK(r.contains({2}));
    CHECK_FALSE(r.contains({1}));
    CHECK_FALSE(r.contains({0, 0}));  // wrong length is absent, not an error
    CHECK_FALSE(r.has_infinite_family());

    RealizationSet s = realizations(m, parse_formula(sig_r(), "E v0. R(v0)"));
    CHECK(s.dimension() == 0);
    CHECK(s.tuples() == std::vector<Tuple>{{}});
    CHECK(s.cardinality() == Count::finite(1));
    CHECK(s.contains({}));

    RealizationSet e = realizations(m, parse_formula(sig_r(), "A v0. R(v0)"));
    CHECK(e.tuples().empty());
    CHECK(e.cardinality() == Count::finite(0));
}

TEST_CASE("realizations: periodic unary representation and the odd complement") {
    Structure m = evens();
    RealizationSet r = realizations(m, parse_formula(sig_r(), "~R(v0)"));
    CHECK(r.representation() == RealizationRep::PeriodicUnary);
    CHECK(r.cardinality() == Count::infinite());
    CHECK(r.periodic_set() == PeriodicSet({}, {0, 1}));
    CHECK(r.contains({1}));
    CHECK(r.contains({3}));
    CHECK_FALSE(r.contains({0}));
    CHECK(r.has_infinite_family());
    CHECK_THROWS_AS(r.tuples(), Error);

    // an unbounded family really is unbounded and really is inside the set
    std::uint64_t last = 0;
    for (std::uint64_t k = 0; k < 6; ++k) {
        Tuple t = r.unbounded_family_member(k);
        REQUIRE(t.size() == 1);
        CHECK(r.contains(t));
        if (k > 0) CHECK(t[0] > last);
        last = t[0];
    }
}

TEST_CASE("realizations: symbolic product representation for two free variables") {
    Signature sig = sig_r();
    Structure m(PeriodicUnaryStructure(sig, {PeriodicSet({1, 1, 1}, {0})}));
    Formula f = parse_formula(sig, "(R(v0) & R(v1))");
    RealizationSet r = realizations(m, f);
    CHECK(r.representation() == RealizationRep::SymbolicProduct);
    CHECK(r.dimension() == 2);
    CHECK(r.cardinality() == Count::finite(9));

    // brute force over pairs below the prefix+cycle bound
    std::vector<Tuple> expect;
    for (Nat a = 0; a < 3; ++a)
        for (Nat b = 0; b < 3; ++b) expect.push_back({a, b});
    CHECK(r.tuples() == expect);
    for (Nat a = 0; a < 8; ++a)
        for (Nat b = 0; b < 8; ++b)
            CHECK(r.contains({a, b}) == (a < 3 && b < 3));

    std::uint64_t bound = r.finite_entry_bound();
    for (const Tuple& t : r.tuples())
        for (std::uint64_t v : t) CHECK(v < bound);
}

TEST_CASE("realizations: infinite symbolic product") {
    Structure m = evens();
    Formula f = parse_formula(sig_r(), "(R(v0) & R(v1))");
    RealizationSet r = realizations(m, f);
    CHECK(r.representation() == RealizationRep::SymbolicProduct);
    CHECK(r.cardinality() == Count::infinite());
    CHECK(r.contains({0, 2}));
    CHECK(r.contains({4, 4}));
    CHECK_FALSE(r.contains({0, 1}));
    CHECK_THROWS_AS(r.tuples(), Error);
    CHECK(r.has_infinite_family());
    std::uint64_t prev = 0;
    for (std::uint64_t k = 0; k < 5; ++k) {
        Tuple t = r.unbounded_family_member(k);
        CHECK(r.contains(t));
        std::uint64_t mx = *std::max_element(t.begin(), t.end());
        if (k > 0) CHECK(mx > prev);
        prev = mx;
    }
}

TEST_CASE("realizations membership is exhaustively correct on periodic structures") {
    Signature sig = sig_r_eq();
    std::vector<PeriodicUnaryStructure> structures = all_periodic_r(sig, 3, 2);
    std::vector<Formula> formulas = generate_fragment(sig, 1, 2).formulas();
    std::size_t checked = 0;
    for (std::size_t si = 0; si < structures.size(); si += 3) {
        Structure m(structures[si]);
        for (std::size_t fi = 0; fi < formulas.size(); fi += 5) {
            const Formula& f = formulas[fi];
            std::uint64_t d = f.free_variables().size();
            if (d == 0) continue;
            RealizationSet r = realizations(m, f);
            std::uint64_t probe = 7;
            Tuple t(d, 0);
            bool done = false;
            while (!done) {
                REQUIRE(r.contains(t) == satisfies(m, f, t));
                ++checked;
                done = true;
                for (std::size_t i = d; i-- > 0;) {
                    if (++t[i] < probe) {
                        done = false;
                        break;
                    }
                    t[i] = 0;
                }
            }
        }
    }
    CHECK(checked > 2000);
}

TEST_CASE("count: examples on both backends") {
    Structure fin(fin_r(3, {{0}, {2}}));
    CHECK(count(fin, parse_formula(sig_r(), "R(v0)")) == Count::finite(2));

    Structure inf = evens();
    CHECK(count(inf, parse_formula(sig_r(), "R(v0)")) == Count::infinite());
    CHECK(count(inf, parse_formula(sig_r(), "(R(v0) & ~R(v0))")) == Count::finite(0));

    Structure m(PeriodicUnaryStructure(sig_r(), {PeriodicSet({1, 1, 1}, {0})}));
    CHECK(count(m, parse_formula(sig_r(), "(R(v0) & R(v1))")) == Count::finite(9));
}

TEST_CASE("count on sentences is 0 or 1 and tracks satisfies") {
    Signature sig = sig_r_eq();
    std::vector<Formula> sentences;
    FormulaSet frag = generate_fragment(sig, 2, 1);
    for (const Formula& f : frag.formulas())
        if (f.free_variables().empty()) sentences.push_back(f);
    REQUIRE(!sentences.empty());

    std::vector<Structure> ms;
    ms.emplace_back(make_finite(sig, 3, {{"R", {{1}}}}));
    ms.emplace_back(PeriodicUnaryStructure(sig, {PeriodicSet({1, 0}, {1, 1, 0})}));
    for (const Structure& m : ms) {
        for (const Formula& f : sentences) {
            Count c = count(m, f);
            bool sat = satisfies(m, f);
            CHECK(c == (sat ? Count::finite(1) : Count::finite(0)));
        }
    }
}

TEST_CASE("count respects complementation on the finite backend") {
    Signature sig = sig_rs();
    FiniteStructure s = make_finite(sig, 3, {{"R", {{0}, {2}}}, {"S", {{0, 1}, {1, 2}, {2, 2}}}});
    Structure m(s);
    FormulaSet frag = generate_fragment(sig, 1, 2);
    for (const Formula& f : frag.formulas()) {
        Formula neg = Formula::negate(f);
        if (neg.free_variables() != f.free_variables()) continue;
        std::uint64_t d = f.free_variables().size();
        std::uint64_t total = 1;
        for (std::uint64_t i = 0; i < d; ++i) total *= 3;
        Count a = count(m, f);
        Count b = count(m, neg);
        REQUIRE(a.value() + b.value() == total);
    }
}

TEST_CASE("counts agree between periodic structures and big finite restrictions") {
    // for a formula whose realizations are finite, a large enough finite
    // restriction of the periodic structure contains all of them
    Signature sig = sig_r();
    PeriodicSet r({1, 0, 1, 1}, {0});
    Structure p(PeriodicUnaryStructure(sig, {r}));
    Nat n = 24;
    std::vector<Tuple> rt;
    for (Nat a = 0; a < n; ++a)
        if (r.contains(a)) rt.push_back({a});
    Structure fin(make_finite(sig, n, {{"R", rt}}));

    for (const char* text : {"R(v0)", "(R(v0) & R(v1))", "E v1. (R(v0) & R(v1))"}) {
        Formula f = parse_formula(sig, text);
        Count cp = count(p, f);
        REQUIRE(cp.is_finite());
        CHECK(cp == count(fin, f));
        RealizationSet rp = realizations(p, f);
        RealizationSet rf = realizations(fin, f);
        CHECK(rp.tuples() == rf.tuples());
    }
}

TEST_CASE("assignment validation errors") {
    Structure m(fin_r(3, {{0}}));
    Formula f = parse_formula(sig_r(), "R(v0)");
    CHECK_THROWS_AS(satisfies(m, f, {}), UnboundVariable);
    CHECK_THROWS_AS(satisfies(m, f, {0, 1}), UnboundVariable);
    CHECK_THROWS_AS(satisfies(m, f, {3}), OutOfUniverse);

    Structure p = evens();
    CHECK_THROWS_AS(satisfies(p, f, {0, 1}), UnboundVariable);
    CHECK(satisfies(p, f, {100}));  // periodic universe is all of the naturals

    Signature other({{"Q", 1}}, false);
    Formula g = parse_formula(other, "Q(v0)");
    CHECK_THROWS_AS(satisfies(m, g, {0}), SignatureMismatch);
}

TEST_CASE("exists-at-least thresholds count distinct tuples") {
    Signature sig = sig_rs();
    FiniteStructure s = make_finite(sig, 3, {{"R", {{0}, {1}}}, {"S", {{0, 0}, {0, 1}, {1, 2}}}});
    Structure m(s);

    CHECK(satisfies(m, parse_formula(sig, "E^3 (v0,v1). S(v0,v1)")));
    CHECK_FALSE(satisfies(m, parse_formula(sig, "E^4 (v0,v1). S(v0,v1)")));
    CHECK(satisfies(m, parse_formula(sig, "E^2 (v1). S(v0,v1)"), {0}));
    CHECK_FALSE(satisfies(m, parse_formula(sig, "E^2 (v1). S(v0,v1)"), {1}));

    // empty bound list: the only candidate is the empty tuple
    Formula e1 = Formula::exists_at_least(1, {}, parse_formula(sig, "R(v0)"));
    CHECK(satisfies(m, e1, {0}));
    CHECK_FALSE(satisfies(m, e1, {2}));
    Formula e2 = Formula::exists_at_least(2, {}, parse_formula(sig, "R(v0)"));
    CHECK_FALSE(satisfies(m, e2, {0}));

    // threshold is an exact-count comparison, also on the periodic backend
    Structure p(PeriodicUnaryStructure(sig_r(), {PeriodicSet({1, 1, 0, 1}, {0})}));
    CHECK(satisfies(p, parse_formula(sig_r(), "E^3 (v0). R(v0)")));
    CHECK_FALSE(satisfies(p, parse_formula(sig_r(), "E^4 (v0). R(v0)")));
    CHECK(satisfies(evens(), parse_formula(sig_r(), "E^1000 (v0). R(v0)")));
}
