#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "distinguo/formula.hpp"
#include "distinguo/fragment.hpp"
#include "distinguo/parser.hpp"

using namespace distinguo;

namespace {

const Signature& sig_rs() {
    static Signature sig({{"R", 1}, {"S", 2}}, true);
    return sig;
}

const Signature& sig_r() {
    static Signature sig({{"R", 1}}, false);
    return sig;
}

// Random AST over sig_rs() staying within the concrete grammar.
Formula random_formula(std::mt19937& rng, int depth) {
    auto var = [&] { return Var(rng() % 3); };
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 2 : 7);
    switch (kind(rng)) {
        case 0:
            return Formula::atom(sig_rs(), "R", {var()});
        case 1:
            return Formula::atom(sig_rs(), "S", {var(), var()});
        case 2:
            return Formula::equal(sig_rs(), var(), var());
        case 3:
            return Formula::negate(random_formula(rng, depth - 1));
        case 4:
        case 5: {
            std::vector<Formula> parts;
            std::size_t n = 2 + rng() % 2;
            for (std::size_t i = 0; i < n; ++i)
                parts.push_back(random_formula(rng, depth - 1));
            return kind(rng) % 2 ? Formula::conj(std::move(parts))
                                 : Formula::disj(std::move(parts));
        }
        case 6:
            return rng() % 2
                       ? Formula::exists(var(), random_formula(rng, depth - 1))
                       : Formula::forall(var(), random_formula(rng, depth - 1));
        default: {
            std::vector<Var> bound;
            if (rng() % 4 != 0) {
                bound.push_back(Var(rng() % 2));
                if (rng() % 2) bound.push_back(Var(2 + rng() % 2));
            }
            return Formula::exists_at_least(1 + rng() % 3, std::move(bound),
                                            random_formula(rng, depth - 1));
        }
    }
}

bool set_contains(const FormulaSet& a, const Formula& f) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == f) return true;
    return false;
}

}  // namespace

TEST_CASE("parser builds the documented trees") {
    Formula e = parse("E v0. R(v0)", sig_rs());
    CHECK(e.kind() == FormulaKind::Exists);
    CHECK(e.bound_variable() == Var(0));
    CHECK(e.body().kind() == FormulaKind::Atom);
    CHECK(e.body().relation() == "R");

    Formula n = parse("~(R(v0) & S(v0,v1))", sig_rs());
    REQUIRE(n.kind() == FormulaKind::Not);
    REQUIRE(n.body().kind() == FormulaKind::And);
    CHECK(n.body().operands().size() == 2);
    CHECK(n.body().operands()[0].relation() == "R");
    CHECK(n.body().operands()[1].relation() == "S");

    CHECK_THROWS_AS(parse("R(v0,v1)", sig_r()), ArityError);
    CHECK_THROWS_AS(parse("T(v0)", sig_rs()), UnknownRelation);
    CHECK_THROWS_AS(parse("v0 = v1", sig_r()), EqualityNotEnabled);
    CHECK(parse("v0 = v1", sig_rs()).kind() == FormulaKind::Equal);

    Formula t = parse("E^2 (v0,v1). S(v0,v1)", sig_rs());
    REQUIRE(t.kind() == FormulaKind::ExistsAtLeast);
    CHECK(t.threshold() == 2);
    CHECK(t.variables() == std::vector<Var>{Var(0), Var(1)});

    Formula chain = parse("(R(v0) & R(v1) & R(v2))", sig_rs());
    CHECK(chain.operands().size() == 3);
    CHECK_THROWS_AS(parse("(R(v0) & R(v1) | R(v2))", sig_rs()), SyntaxError);

    CHECK_THROWS_AS(parse("", sig_rs()), SyntaxError);
    CHECK_THROWS_AS(parse("R(v0) R(v1)", sig_rs()), SyntaxError);
    CHECK_THROWS_AS(parse("E v0 R(v0)", sig_rs()), SyntaxError);

    try {
        parse("(R(v0) &", sig_rs());
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 8);
    }
}

TEST_CASE("free variables follow binding") {
    Formula s = parse("S(v0,v1)", sig_rs());
    CHECK(free_vars(s) == std::vector<Var>{Var(0), Var(1)});

    Formula e = parse("E v0. S(v0,v1)", sig_rs());
    CHECK(free_vars(e) == std::vector<Var>{Var(1)});

    Formula sentence = parse("A v1. E v0. S(v0,v1)", sig_rs());
    CHECK(free_vars(sentence).empty());

    Formula n = Formula::negate(s);
    CHECK(free_vars(n) == free_vars(s));

    // The threshold quantifier binds its whole list.
    Formula t = parse("E^2 (v0,v1). S(v0,v1)", sig_rs());
    CHECK(free_vars(t).empty());
    Formula t2 = parse("E^2 (v0). S(v0,v1)", sig_rs());
    CHECK(free_vars(t2) == std::vector<Var>{Var(1)});

    CHECK(parse("E v0. R(v0)", sig_rs()).quantifier_rank() == 1);
    CHECK(parse("E^3 (v0). R(v0)", sig_rs()).quantifier_rank() == 3);
    CHECK(parse("R(v0)", sig_rs()).quantifier_rank() == 0);
}

TEST_CASE("formula factories validate") {
    CHECK_THROWS_AS(Formula::atom(sig_rs(), "R", {Var(0), Var(1)}), ArityError);
    CHECK_THROWS_AS(Formula::conj({}), Error);
    CHECK_THROWS_AS(Formula::equal(sig_r(), Var(0), Var(1)), EqualityNotEnabled);
    CHECK_THROWS_AS(
        Formula::exists_at_least(1, {Var(0), Var(0)},
                                 parse("R(v0)", sig_rs())),
        DuplicateVariable);

    Formula single = Formula::conj({parse("R(v0)", sig_rs())});
    CHECK(single.kind() == FormulaKind::Atom);

    Formula f = parse("R(v0)", sig_rs());
    CHECK_THROWS_AS(validate_against(f, Signature({{"Q", 1}}, false)),
                    Error);
}

TEST_CASE("ten thousand generated formulas survive print and reparse") {
    std::mt19937 rng(20260822);
    for (int i = 0; i < 10000; ++i) {
        Formula f = random_formula(rng, 4);
        Formula back = parse(f.str(), sig_rs());
        CHECK(back == f);
        if (!(back == f)) {
            CAPTURE(f.str());
            break;
        }
    }
}

TEST_CASE("normalization sorts operands and strips double negation") {
    Formula r0 = parse("R(v0)", sig_rs());
    Formula r1 = parse("R(v1)", sig_rs());
    Formula a = Formula::conj({r1, r0});
    Formula b = Formula::conj({r0, r1});
    CHECK_FALSE(a == b);
    CHECK(normalize(a) == normalize(b));

    Formula nn = Formula::negate(Formula::negate(r0));
    CHECK(normalize(nn) == r0);
    CHECK(normalize(Formula::negate(nn)) == Formula::negate(r0));
}

TEST_CASE("fragments contain the documented formulas") {
    FormulaSet f01 = generate_fragment(sig_r(), 0, 1);
    CHECK(set_contains(f01, parse("R(v0)", sig_r())));
    CHECK(set_contains(f01, parse("~R(v0)", sig_r())));
    CHECK(subformula_closed(f01));
    CHECK(negation_closed(f01));

    FormulaSet f11 = generate_fragment(sig_r(), 1, 1);
    CHECK(set_contains(f11, parse("E v0. R(v0)", sig_r())));
    CHECK(subformula_closed(f11));
    CHECK(negation_closed(f11));

    FormulaSet frs = generate_fragment(sig_rs(), 1, 2);
    CHECK(set_contains(frs, parse("S(v0,v1)", sig_rs())));
    CHECK(set_contains(frs, parse("v0 = v1", sig_rs())));
    CHECK(subformula_closed(frs));
    CHECK(negation_closed(frs));
    // Quantifier rank stays within the budget.
    for (std::size_t i = 0; i < frs.size(); ++i)
        CHECK(frs[i].quantifier_rank() <= 1);
    // Rank sorts before size, so atoms lead.
    CHECK(frs[0].quantifier_rank() == 0);

    CHECK_THROWS_AS(generate_fragment(sig_rs(), 1, 1), ArityMismatch);
    FragmentOptions tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(generate_fragment(sig_rs(), 2, 2, tiny), BudgetExceeded);
}

TEST_CASE("formula sets deduplicate and validate") {
    Formula r = parse("R(v0)", sig_rs());
    Formula s = parse("S(v0,v1)", sig_rs());
    FormulaSet a(sig_rs(), {r, s, r});
    CHECK(a.size() == 2);
    CHECK(a[0] == r);
    CHECK(a[1] == s);
    CHECK(a.contains(r));
    CHECK_FALSE(a.contains(parse("~R(v0)", sig_rs())));

    CHECK_THROWS_AS(FormulaSet(sig_r(), {s}), Error);
}
