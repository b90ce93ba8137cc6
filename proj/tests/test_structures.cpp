#include <cstdint>
#include <map>
#include <vector>

#include "doctest.h"

#include "distinguo/periodic.hpp"
#include "distinguo/structure.hpp"

using namespace distinguo;

namespace {

// Reference membership straight from a raw (prefix, cycle) pair, independent
// of any normalization.
bool raw_member(const PeriodicSet::Bits& prefix, const PeriodicSet::Bits& cycle,
                std::uint64_t m) {
    if (m < prefix.size()) return prefix[m] != 0;
    return cycle[(m - prefix.size()) % cycle.size()] != 0;
}

PeriodicSet::Bits bits(std::initializer_list<int> l) {
    PeriodicSet::Bits b;
    for (int v : l) b.push_back(static_cast<std::uint8_t>(v));
    return b;
}

}  // namespace

TEST_CASE("periodic set normal forms collapse repeated cycles and absorbed prefixes") {
    PeriodicSet doubled(bits({}), bits({1, 0, 1, 0}));
    CHECK(doubled.prefix() == bits({}));
    CHECK(doubled.cycle() == bits({1, 0}));

    PeriodicSet absorbed(bits({1}), bits({1}));
    CHECK(absorbed.prefix() == bits({}));
    CHECK(absorbed.cycle() == bits({1}));

    PeriodicSet fixed(bits({0, 1}), bits({0}));
    CHECK(fixed.prefix() == bits({0, 1}));
    CHECK(fixed.cycle() == bits({0}));
    CHECK(fixed.cardinality() == Count::finite(1));

    CHECK_THROWS_AS(PeriodicSet(bits({1}), bits({})), EmptyCycle);
}

TEST_CASE("periodic cardinality follows the cycle") {
    PeriodicSet evens(bits({}), bits({1, 0}));
    CHECK(evens.cardinality() == Count::infinite());

    PeriodicSet two(bits({1, 1, 0}), bits({0}));
    CHECK(two.cardinality() == Count::finite(2));

    PeriodicSet none(bits({}), bits({0}));
    CHECK(none.cardinality() == Count::finite(0));
    CHECK(none.is_empty());
}

TEST_CASE("normalization preserves extension and is canonical, exhaustively") {
    // Raw pairs with prefix <= 6 and cycle <= 4. Two such sets agreeing on
    // 0..17 agree everywhere (prefix bound 6 plus lcm of cycle lengths 12),
    // so a 40-value window keys the extension exactly.
    std::map<std::uint64_t, std::vector<PeriodicSet>> by_extension;
    for (std::size_t pl = 0; pl <= 6; ++pl)
        for (std::uint64_t pb = 0; pb < (1ull << pl); ++pb)
            for (std::size_t cl = 1; cl <= 4; ++cl)
                for (std::uint64_t cb = 0; cb < (1ull << cl); ++cb) {
                    PeriodicSet::Bits prefix(pl), cycle(cl);
                    for (std::size_t i = 0; i < pl; ++i) prefix[i] = pb >> i & 1;
                    for (std::size_t i = 0; i < cl; ++i) cycle[i] = cb >> i & 1;

                    PeriodicSet s(prefix, cycle);
                    std::uint64_t key = 0;
                    for (std::uint64_t m = 0; m < 40; ++m) {
                        bool raw = raw_member(prefix, cycle, m);
                        REQUIRE(s.contains(m) == raw);
                        key |= static_cast<std::uint64_t>(raw) << m;
                    }
                    by_extension[key].push_back(s);
                }

    REQUIRE(by_extension.size() > 1);
    std::map<std::string, std::uint64_t> form_to_key;
    for (const auto& [key, group] : by_extension) {
        for (const PeriodicSet& s : group) {
            // One extension, one normal form.
            CHECK(s == group.front());
            // One normal form, one extension.
            auto [it, fresh] = form_to_key.emplace(s.str(), key);
            CHECK(it->second == key);
        }
    }
}

TEST_CASE("periodic cardinality agrees with brute counting") {
    for (std::size_t pl = 0; pl <= 5; ++pl)
        for (std::uint64_t pb = 0; pb < (1ull << pl); ++pb)
            for (std::uint64_t cb = 0; cb < 8; ++cb) {
                PeriodicSet::Bits prefix(pl), cycle(3);
                for (std::size_t i = 0; i < pl; ++i) prefix[i] = pb >> i & 1;
                for (std::size_t i = 0; i < 3; ++i) cycle[i] = cb >> i & 1;
                PeriodicSet s(prefix, cycle);

                std::uint64_t below = 0;
                for (std::uint64_t m = 0; m < pl + 3; ++m)
                    below += s.contains(m);
                if (s.cardinality().is_finite()) {
                    CHECK(s.cardinality() == Count::finite(below));
                } else {
                    std::uint64_t found = 0;
                    for (std::uint64_t m = 0; m < 1000 && found <= 50; ++m)
                        found += s.contains(m);
                    CHECK(found > 50);
                }
            }
}

TEST_CASE("member enumeration matches a brute scan") {
    PeriodicSet s(bits({0, 1, 1}), bits({0, 0, 1}));
    std::vector<std::uint64_t> brute;
    for (std::uint64_t m = 0; m < 50; ++m)
        if (s.contains(m)) brute.push_back(m);

    for (std::size_t k = 0; k < brute.size(); ++k)
        CHECK(s.nth_member(k) == brute[k]);
    for (std::uint64_t m = 0; m < 50; ++m) {
        std::uint64_t expect = 0;
        for (std::uint64_t v = 0; v < m; ++v) expect += s.contains(v);
        CHECK(s.rank_of(m) == expect);
    }

    PeriodicSet fin(bits({1, 0, 1, 1}), bits({0}));
    CHECK(fin.members() == std::vector<std::uint64_t>{0, 2, 3});
    CHECK_THROWS_AS(s.members(), Error);
    CHECK_THROWS_AS(fin.nth_member(3), Error);

    std::uint64_t out = 0;
    REQUIRE(fin.first_member_not_in({0, 2}, out));
    CHECK(out == 3);
    REQUIRE(fin.first_member_not_in({}, out));
    CHECK(out == 0);
    CHECK_FALSE(fin.first_member_not_in({0, 2, 3}, out));
    CHECK(PeriodicSet::empty().first_member_not_in({}, out) == false);
}

TEST_CASE("set operations are extensional") {
    PeriodicSet a(bits({1, 0}), bits({1, 0, 0}));
    PeriodicSet b(bits({}), bits({1, 1, 0, 0}));
    PeriodicSet c = a.complement();
    PeriodicSet i = a.intersect(b);
    PeriodicSet u = a.unite(b);
    for (std::uint64_t m = 0; m < 60; ++m) {
        CHECK(c.contains(m) == !a.contains(m));
        CHECK(i.contains(m) == (a.contains(m) && b.contains(m)));
        CHECK(u.contains(m) == (a.contains(m) || b.contains(m)));
    }
    CHECK(a.complement().complement() == a);
    CHECK(PeriodicSet::all().complement() == PeriodicSet::empty());
    CHECK(PeriodicSet::from_elements({3, 1, 3}).members() ==
          std::vector<std::uint64_t>{1, 3});
}

TEST_CASE("finite structures canonicalize and validate") {
    Signature sig_r({{"R", 1}}, false);
    FiniteStructure m = make_finite(sig_r, 3, {{"R", {{0}, {2}}}});
    CHECK(m.tuples(0) == std::vector<Tuple>{{0}, {2}});
    CHECK(m.holds(0, {2}));
    CHECK_FALSE(m.holds(0, {1}));

    Signature sig_s({{"S", 2}}, false);
    FiniteStructure dedup = make_finite(sig_s, 2, {{"S", {{0, 1}, {0, 1}}}});
    CHECK(dedup.tuples(0) == std::vector<Tuple>{{0, 1}});

    CHECK_THROWS_AS(make_finite(sig_r, 2, {{"R", {{5}}}}), OutOfUniverse);
    CHECK_THROWS_AS(make_finite(sig_r, 2, {{"R", {{0, 1}}}}), ArityMismatch);
    CHECK_THROWS_AS(make_finite(sig_r, 2, {{"Q", {{0}}}}), UnknownRelation);

    // Rebuilding from the canonical output changes nothing.
    FiniteStructure again(sig_r, m.size(), {m.tuples(0)});
    CHECK(again == m);
}

TEST_CASE("signatures validate and look up relations") {
    CHECK_THROWS_AS(Signature({{"R", 1}, {"R", 2}}, false), Error);
    CHECK_THROWS_AS(Signature({{"R", 0}}, false), Error);
    CHECK_THROWS_AS(Signature({{"", 1}}, false), Error);

    Signature sig({{"R", 1}, {"S", 2}}, true);
    CHECK(sig.index_of("S") == 1);
    CHECK_THROWS_AS(sig.index_of("T"), UnknownRelation);
    CHECK(sig.find("T") == nullptr);
    CHECK(sig.max_arity() == 2);
    CHECK_FALSE(sig.all_unary());
    CHECK(Signature({{"R", 1}}, false).all_unary());
}

TEST_CASE("periodic structures demand unary signatures") {
    Signature binary({{"S", 2}}, false);
    CHECK_THROWS_AS(PeriodicUnaryStructure(binary, {PeriodicSet::empty()}),
                    Error);
    Signature unary({{"R", 1}}, false);
    PeriodicUnaryStructure m(unary, {PeriodicSet::all()});
    CHECK(m.set_of(0) == PeriodicSet::all());

    Structure wrapped(m);
    CHECK_FALSE(wrapped.is_finite());
    CHECK_THROWS_AS(wrapped.finite(), BackendMismatch);
}

TEST_CASE("counts order and print") {
    CHECK(Count::finite(2) < Count::finite(3));
    CHECK(Count::finite(3) < Count::infinite());
    CHECK_FALSE(Count::infinite() < Count::infinite());
    CHECK(Count::infinite() == Count::infinite());
    CHECK(Count::finite(7).str() == "fin:7");
    CHECK(Count::infinite().str() == "inf");
    CHECK_THROWS_AS(Count::infinite().value(), Error);

    CHECK(count_add(Count::finite(2), Count::finite(3)) == Count::finite(5));
    CHECK(count_add(Count::finite(2), Count::infinite()) == Count::infinite());
    CHECK(count_mul(Count::finite(2), Count::finite(3)) == Count::finite(6));
    CHECK(count_mul(Count::infinite(), Count::finite(3)) == Count::infinite());
}
