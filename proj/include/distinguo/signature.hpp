#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "distinguo/errors.hpp"

namespace distinguo {

using Nat = std::uint32_t;
using Tuple = std::vector<Nat>;

struct Relation {
    std::string name;
    Nat arity;
    friend bool operator==(const Relation&, const Relation&) = default;
};

// A finite relational signature: named relation symbols with positive arities,
// plus a flag telling whether the equality atom v_i = v_j is part of the language.
class Signature {
public:
    Signature(std::vector<Relation> relations, bool with_equality);

    const std::vector<Relation>& relations() const { return relations_; }
    bool with_equality() const { return with_equality_; }
    std::size_t size() const { return relations_.size(); }

    // Index of a relation by name; throws UnknownRelation if absent.
    std::size_t index_of(std::string_view name) const;
    const Relation* find(std::string_view name) const;

    Nat max_arity() const;
    bool all_unary() const;

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::vector<Relation> relations_;
    bool with_equality_;
};

}  // namespace distinguo
