#include "distinguo/signature.hpp"

#include <algorithm>

namespace distinguo {

Signature::Signature(std::vector<Relation> relations, bool with_equality)
    : relations_(std::move(relations)), with_equality_(with_equality) {
    for (std::size_t i = 0; i < relations_.size(); ++i) {
        const Relation& r = relations_[i];
        if (r.name.empty()) throw Error("signature: relation name must be nonempty");
        if (r.arity == 0)
            throw ArityMismatch("signature: relation " + r.name + " has arity 0");
        for (std::size_t j = 0; j < i; ++j)
            if (relations_[j].name == r.name)
                throw Error("signature: duplicate relation name " + r.name);
    }
}

std::size_t Signature::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
        if (relations_[i].name == name) return i;
    throw UnknownRelation("unknown relation " + std::string(name));
}

const Relation* Signature::find(std::string_view name) const {
    for (const Relation& r : relations_)
        if (r.name == name) return &r;
    return nullptr;
}

Nat Signature::max_arity() const {
    Nat m = 0;
    for (const Relation& r : relations_) m = std::max(m, r.arity);
    return m;
}

bool Signature::all_unary() const {
    return std::all_of(relations_.begin(), relations_.end(),
                       [](const Relation& r) { return r.arity == 1; });
}

}  // namespace distinguo
