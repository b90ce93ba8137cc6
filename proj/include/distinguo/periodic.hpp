#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distinguo/count.hpp"
#include "distinguo/errors.hpp"

namespace distinguo {

// An ultimately periodic subset of the naturals, stored in normal form:
// membership of m is prefix[m] for m < |prefix| and cycle[(m - |prefix|) mod |cycle|]
// otherwise. Normal form means the cycle is primitive (not a power of a shorter
// word) and the prefix cannot be shortened by absorbing its last bit into a
// rotation of the cycle. Normal form is canonical, so two PeriodicSets denote
// the same subset exactly when they compare equal member-wise.
class PeriodicSet {
public:
    using Bits = std::vector<std::uint8_t>;

    // Normalizes on construction; throws EmptyCycle when cycle is empty.
    PeriodicSet(Bits prefix, Bits cycle);

    static PeriodicSet empty();
    static PeriodicSet all();
    static PeriodicSet from_elements(const std::vector<std::uint64_t>& elems);

    const Bits& prefix() const { return prefix_; }
    const Bits& cycle() const { return cycle_; }

    bool contains(std::uint64_t m) const;
    Count cardinality() const;
    bool is_empty() const { return cardinality() == Count::finite(0); }

    PeriodicSet complement() const;
    PeriodicSet intersect(const PeriodicSet& other) const;
    PeriodicSet unite(const PeriodicSet& other) const;

    // k-th member in increasing order, 0-based; throws Error when out of range.
    std::uint64_t nth_member(std::uint64_t k) const;
    // Number of members strictly below m.
    std::uint64_t rank_of(std::uint64_t m) const;
    // All members of a finite set, in increasing order; throws Error if infinite.
    std::vector<std::uint64_t> members() const;
    // Smallest member not listed in `excluded`; nullopt-style via bool return.
    bool first_member_not_in(const std::vector<std::uint64_t>& excluded,
                             std::uint64_t& out) const;

    // Debug form "prefix:110 cycle:01"; the document format lives in io.
    std::string str() const;

    friend bool operator==(const PeriodicSet&, const PeriodicSet&) = default;

private:
    Bits prefix_;
    Bits cycle_;
};

// Construction entry point mirroring the type's constructor.
PeriodicSet periodic_normalize(PeriodicSet::Bits prefix, PeriodicSet::Bits cycle);

// Finite(k) when the cycle is all-zero (k = ones in the prefix), infinite otherwise.
Count periodic_cardinality(const PeriodicSet& s);

}  // namespace distinguo
