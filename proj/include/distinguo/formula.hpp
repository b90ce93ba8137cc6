#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "distinguo/signature.hpp"

namespace distinguo {

// A first-order variable v0, v1, ... identified by its index.
class Var {
public:
    explicit Var(Nat index) : index_(index) {}
    Nat index() const { return index_; }
    std::string str() const { return "v" + std::to_string(index_); }
    friend auto operator<=>(const Var&, const Var&) = default;

private:
    Nat index_;
};

enum class FormulaKind : std::uint8_t {
    Atom,           // R(v...)
    Equal,          // v = v (only when the signature enables equality)
    Not,            // ~f
    And,            // (f & f & ...)
    Or,             // (f | f | ...)
    Exists,         // E v. f
    Forall,         // A v. f
    ExistsAtLeast,  // E^n (v,...). f  : "at least n distinct tuples satisfy f"
};

// An immutable first-order formula over a relational signature. Nodes are
// shared, so copies are cheap and subtrees compare by pointer first.
class Formula {
public:
    static Formula atom(const Signature& sig, std::string_view rel, std::vector<Var> args);
    static Formula equal(const Signature& sig, Var a, Var b);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> fs);  // collapses a singleton
    static Formula disj(std::vector<Formula> fs);
    static Formula exists(Var v, Formula body);
    static Formula forall(Var v, Formula body);
    // The bound list may be empty (then the only candidate tuple is the empty
    // one and the node means "body holds and n <= 1"); entries must be distinct.
    static Formula exists_at_least(Nat n, std::vector<Var> bound, Formula body);

    FormulaKind kind() const { return node_->kind; }
    const std::string& relation() const { return node_->rel; }     // Atom
    const std::vector<Var>& variables() const { return node_->vars; }  // Atom / Equal / E^
    Var bound_variable() const { return node_->vars.at(0); }       // Exists / Forall
    Nat threshold() const { return node_->threshold; }             // ExistsAtLeast
    const std::vector<Formula>& operands() const { return node_->children; }  // And / Or
    const Formula& body() const { return node_->children.at(0); }  // Not / quantifiers

    // Free variables in ascending index order.
    const std::vector<Var>& free_variables() const { return node_->free; }
    // Quantifier rank; ExistsAtLeast counts as threshold * |bound| nested quantifiers.
    Nat quantifier_rank() const { return node_->rank; }
    std::size_t ast_size() const { return node_->ast_size; }
    std::size_t hash() const { return node_->hash; }

    // Stable identity of the shared syntax node; distinct for structurally
    // equal but separately built formulas. Suitable as a memoization key
    // while the formula is alive.
    const void* id() const { return node_.get(); }

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.node_ == b.node_ || structural_equal(a, b);
    }

    // Grammar-conforming text; parsing it back yields a structurally equal AST.
    std::string str() const;

private:
    struct Node {
        FormulaKind kind;
        std::string rel;
        std::vector<Var> vars;
        Nat threshold = 0;
        std::vector<Formula> children;
        std::vector<Var> free;
        Nat rank = 0;
        std::uint32_t ast_size = 1;
        std::size_t hash = 0;
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula finish(Node n);
    static bool structural_equal(const Formula& a, const Formula& b);
    friend std::strong_ordering compare(const Formula& a, const Formula& b);

    std::shared_ptr<const Node> node_;
};

// Total structural order used for canonical operand sorting and set storage.
std::strong_ordering compare(const Formula& a, const Formula& b);

inline const std::vector<Var>& free_vars(const Formula& f) { return f.free_variables(); }
inline std::string pretty_print(const Formula& f) { return f.str(); }

// Canonical form: operand lists of And/Or sorted and deduplicated, double
// negation removed, equality atoms oriented with the smaller index first.
Formula normalize(const Formula& f);

// All subformulas including f itself, deduplicated, in structural order.
std::vector<Formula> subformulas(const Formula& f);

// Checks the formula only uses relations of `sig` with correct arities and uses
// equality only when enabled. Throws SignatureMismatch on violation.
void validate_against(const Formula& f, const Signature& sig);

struct FormulaLess {
    bool operator()(const Formula& a, const Formula& b) const {
        return compare(a, b) == std::strong_ordering::less;
    }
};

}  // namespace distinguo
