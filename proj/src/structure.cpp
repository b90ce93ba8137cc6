#include "distinguo/structure.hpp"

#include <algorithm>

namespace distinguo {

namespace {

std::string tuple_str(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

}  // namespace

FiniteStructure::FiniteStructure(Signature sig, Nat size,
                                 std::vector<std::vector<Tuple>> interp)
    : sig_(std::move(sig)), size_(size), interp_(std::move(interp)) {
    if (size_ == 0) throw Error("finite structure: universe size must be positive");
    if (interp_.size() != sig_.relations().size())
        throw Error("finite structure: one tuple list per relation required");
    for (std::size_t r = 0; r < interp_.size(); ++r) {
        const Relation& rel = sig_.relations()[r];
        for (const Tuple& t : interp_[r]) {
            if (t.size() != rel.arity)
                throw ArityMismatch("relation " + rel.name + ": tuple " + tuple_str(t) +
                                    " has " + std::to_string(t.size()) +
                                    " entries, expected " + std::to_string(rel.arity));
            for (Nat e : t)
                if (e >= size_)
                    throw OutOfUniverse("relation " + rel.name + ": tuple " +
                                        tuple_str(t) + " leaves universe of size " +
                                        std::to_string(size_));
        }
        std::sort(interp_[r].begin(), interp_[r].end());
        interp_[r].erase(std::unique(interp_[r].begin(), interp_[r].end()),
                         interp_[r].end());
    }
}

bool FiniteStructure::holds(std::size_t rel_index, const Tuple& t) const {
    const std::vector<Tuple>& ts = interp_.at(rel_index);
    return std::binary_search(ts.begin(), ts.end(), t);
}

FiniteStructure make_finite(
    const Signature& sig, Nat size,
    const std::vector<std::pair<std::string, std::vector<Tuple>>>& interp) {
    std::vector<std::vector<Tuple>> lists(sig.relations().size());
    for (const auto& [name, tuples] : interp) {
        std::size_t idx = sig.index_of(name);  // throws UnknownRelation
        for (const Tuple& t : tuples) lists[idx].push_back(t);
    }
    return FiniteStructure(sig, size, std::move(lists));
}

PeriodicUnaryStructure::PeriodicUnaryStructure(Signature sig,
                                               std::vector<PeriodicSet> interp)
    : sig_(std::move(sig)), interp_(std::move(interp)) {
    if (!sig_.all_unary())
        throw ArityMismatch("periodic structure: signature must be all-unary");
    if (interp_.size() != sig_.relations().size())
        throw Error("periodic structure: one set per relation required");
}

const Signature& Structure::signature() const {
    if (auto* f = std::get_if<FiniteStructure>(&v_)) return f->signature();
    return std::get<PeriodicUnaryStructure>(v_).signature();
}

const FiniteStructure& Structure::finite() const {
    if (auto* f = std::get_if<FiniteStructure>(&v_)) return *f;
    throw BackendMismatch("expected a finite structure");
}

const PeriodicUnaryStructure& Structure::periodic() const {
    if (auto* p = std::get_if<PeriodicUnaryStructure>(&v_)) return *p;
    throw BackendMismatch("expected a periodic structure");
}

}  // namespace distinguo
