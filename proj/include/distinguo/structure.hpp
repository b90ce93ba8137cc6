#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distinguo/periodic.hpp"
#include "distinguo/signature.hpp"

namespace distinguo {

// A finite relational structure over universe {0, ..., size-1}. Interpretations
// are stored canonically (sorted, deduplicated tuple lists), so structural
// equality coincides with extensional equality.
class FiniteStructure {
public:
    FiniteStructure(Signature sig, Nat size, std::vector<std::vector<Tuple>> interp);

    const Signature& signature() const { return sig_; }
    Nat size() const { return size_; }
    const std::vector<Tuple>& tuples(std::size_t rel_index) const {
        return interp_.at(rel_index);
    }
    bool holds(std::size_t rel_index, const Tuple& t) const;

    friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;

private:
    Signature sig_;
    Nat size_;
    std::vector<std::vector<Tuple>> interp_;  // per relation, canonical
};

// Builds a finite structure from named interpretations. Relations not mentioned
// are empty. Throws UnknownRelation, ArityMismatch, or OutOfUniverse.
FiniteStructure make_finite(
    const Signature& sig, Nat size,
    const std::vector<std::pair<std::string, std::vector<Tuple>>>& interp);

// A structure with universe N whose (unary) relations are ultimately periodic
// subsets. Only all-unary signatures are admitted.
class PeriodicUnaryStructure {
public:
    PeriodicUnaryStructure(Signature sig, std::vector<PeriodicSet> interp);

    const Signature& signature() const { return sig_; }
    const PeriodicSet& set_of(std::size_t rel_index) const { return interp_.at(rel_index); }
    const std::vector<PeriodicSet>& interpretations() const { return interp_; }

    friend bool operator==(const PeriodicUnaryStructure&, const PeriodicUnaryStructure&) = default;

private:
    Signature sig_;
    std::vector<PeriodicSet> interp_;
};

// Either backend behind one value type. Operations that need a specific backend
// throw BackendMismatch when handed the other one.
class Structure {
public:
    enum class Backend { Finite, Periodic };

    Structure(FiniteStructure s) : v_(std::move(s)) {}
    Structure(PeriodicUnaryStructure s) : v_(std::move(s)) {}

    Backend backend() const {
        return std::holds_alternative<FiniteStructure>(v_) ? Backend::Finite
                                                           : Backend::Periodic;
    }
    bool is_finite() const { return backend() == Backend::Finite; }

    const Signature& signature() const;
    const FiniteStructure& finite() const;
    const PeriodicUnaryStructure& periodic() const;

    friend bool operator==(const Structure&, const Structure&) = default;

private:
    std::variant<FiniteStructure, PeriodicUnaryStructure> v_;
};

}  // namespace distinguo
