#include "distinguo/periodic.hpp"

#include <algorithm>
#include <numeric>

namespace distinguo {

namespace {

// Smallest d dividing n such that the word is a repetition of its first d bits.
std::size_t primitive_period(const PeriodicSet::Bits& w) {
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool repeats = true;
        for (std::size_t i = d; i < n && repeats; ++i) repeats = (w[i] == w[i % d]);
        if (repeats) return d;
    }
    return n;
}

}  // namespace

PeriodicSet::PeriodicSet(Bits prefix, Bits cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw EmptyCycle("periodic set: cycle must be nonempty");
    for (auto& b : prefix_) b = b ? 1 : 0;
    for (auto& b : cycle_) b = b ? 1 : 0;

    // Reduce the cycle to its primitive root. Rotations preserve primitivity,
    // so this needs doing only once.
    std::size_t d = primitive_period(cycle_);
    cycle_.resize(d);

    // Absorb prefix bits into the cycle while the last prefix bit matches the
    // last cycle bit: dropping it shifts the periodic part one step left, which
    // is a right rotation of the cycle.
    while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
        prefix_.pop_back();
        std::rotate(cycle_.rbegin(), cycle_.rbegin() + 1, cycle_.rend());
    }
}

PeriodicSet PeriodicSet::empty() { return PeriodicSet({}, {0}); }
PeriodicSet PeriodicSet::all() { return PeriodicSet({}, {1}); }

PeriodicSet PeriodicSet::from_elements(const std::vector<std::uint64_t>& elems) {
    std::uint64_t top = 0;
    for (auto e : elems) top = std::max(top, e + 1);
    Bits prefix(top, 0);
    for (auto e : elems) prefix[e] = 1;
    return PeriodicSet(std::move(prefix), {0});
}

bool PeriodicSet::contains(std::uint64_t m) const {
    if (m < prefix_.size()) return prefix_[m] != 0;
    return cycle_[(m - prefix_.size()) % cycle_.size()] != 0;
}

Count PeriodicSet::cardinality() const {
    bool cycle_has_one = std::any_of(cycle_.begin(), cycle_.end(),
                                     [](std::uint8_t b) { return b != 0; });
    if (cycle_has_one) return Count::infinite();
    std::uint64_t ones = 0;
    for (auto b : prefix_) ones += b;
    return Count::finite(ones);
}

PeriodicSet PeriodicSet::complement() const {
    Bits p = prefix_, c = cycle_;
    for (auto& b : p) b ^= 1;
    for (auto& b : c) b ^= 1;
    return PeriodicSet(std::move(p), std::move(c));
}

PeriodicSet PeriodicSet::intersect(const PeriodicSet& other) const {
    std::size_t p = std::max(prefix_.size(), other.prefix_.size());
    std::size_t c = std::lcm(cycle_.size(), other.cycle_.size());
    Bits prefix(p), cycle(c);
    for (std::size_t m = 0; m < p; ++m)
        prefix[m] = contains(m) && other.contains(m);
    for (std::size_t i = 0; i < c; ++i)
        cycle[i] = contains(p + i) && other.contains(p + i);
    return PeriodicSet(std::move(prefix), std::move(cycle));
}

PeriodicSet PeriodicSet::unite(const PeriodicSet& other) const {
    std::size_t p = std::max(prefix_.size(), other.prefix_.size());
    std::size_t c = std::lcm(cycle_.size(), other.cycle_.size());
    Bits prefix(p), cycle(c);
    for (std::size_t m = 0; m < p; ++m)
        prefix[m] = contains(m) || other.contains(m);
    for (std::size_t i = 0; i < c; ++i)
        cycle[i] = contains(p + i) || other.contains(p + i);
    return PeriodicSet(std::move(prefix), std::move(cycle));
}

std::uint64_t PeriodicSet::nth_member(std::uint64_t k) const {
    Count card = cardinality();
    if (card.is_finite() && card.value() <= k)
        throw Error("periodic set: member index out of range");
    std::uint64_t seen = 0;
    for (std::uint64_t m = 0;; ++m) {
        if (contains(m)) {
            if (seen == k) return m;
            ++seen;
        }
    }
}

std::uint64_t PeriodicSet::rank_of(std::uint64_t m) const {
    std::uint64_t r = 0;
    for (std::uint64_t i = 0; i < m; ++i)
        if (contains(i)) ++r;
    return r;
}

std::vector<std::uint64_t> PeriodicSet::members() const {
    Count card = cardinality();
    if (card.is_infinite()) throw Error("periodic set: members() on an infinite set");
    std::vector<std::uint64_t> out;
    out.reserve(card.value());
    for (std::uint64_t m = 0; m < prefix_.size(); ++m)
        if (prefix_[m]) out.push_back(m);
    return out;
}

bool PeriodicSet::first_member_not_in(const std::vector<std::uint64_t>& excluded,
                                      std::uint64_t& out) const {
    // At most |excluded| members can be blocked, so |excluded|+1 members suffice.
    Count card = cardinality();
    std::uint64_t limit = excluded.size() + 1;
    if (card.is_finite()) limit = std::min<std::uint64_t>(limit, card.value());
    for (std::uint64_t k = 0; k < limit; ++k) {
        std::uint64_t m = nth_member(k);
        if (std::find(excluded.begin(), excluded.end(), m) == excluded.end()) {
            out = m;
            return true;
        }
    }
    return false;
}

std::string PeriodicSet::str() const {
    std::string s = "prefix:";
    for (auto b : prefix_) s += b ? '1' : '0';
    s += " cycle:";
    for (auto b : cycle_) s += b ? '1' : '0';
    return s;
}

PeriodicSet periodic_normalize(PeriodicSet::Bits prefix, PeriodicSet::Bits cycle) {
    return PeriodicSet(std::move(prefix), std::move(cycle));
}

Count periodic_cardinality(const PeriodicSet& s) { return s.cardinality(); }

}  // namespace distinguo
