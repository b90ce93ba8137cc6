#include "distinguo/formula.hpp"

#include <algorithm>
#include <set>

#include "distinguo/errors.hpp"

namespace distinguo {

namespace {

std::vector<Var> merge_free(const std::vector<Formula>& fs) {
    std::vector<Var> out;
    for (const Formula& f : fs)
        out.insert(out.end(), f.free_variables().begin(), f.free_variables().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void remove_var(std::vector<Var>& vs, Var v) {
    vs.erase(std::remove(vs.begin(), vs.end(), v), vs.end());
}

std::size_t hash_mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::finish(Node n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911u;
    for (char c : n.rel) h = hash_mix(h, static_cast<unsigned char>(c));
    for (Var v : n.vars) h = hash_mix(h, v.index() + 1);
    h = hash_mix(h, n.threshold);
    Nat rank = 0;
    std::uint32_t size = 1;
    for (const Formula& c : n.children) {
        h = hash_mix(h, c.hash());
        rank = std::max(rank, c.quantifier_rank());
        size += c.node_->ast_size;
    }
    switch (n.kind) {
        case FormulaKind::Exists:
        case FormulaKind::Forall:
            rank += 1;
            break;
        case FormulaKind::ExistsAtLeast:
            rank += static_cast<Nat>(n.vars.size()) * std::max<Nat>(n.threshold, 1);
            break;
        default:
            break;
    }
    n.rank = rank;
    n.ast_size = size;
    n.hash = h;
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::atom(const Signature& sig, std::string_view rel, std::vector<Var> args) {
    const Relation* r = sig.find(rel);
    if (!r) throw UnknownRelation("unknown relation " + std::string(rel));
    if (args.size() != r->arity)
        throw ArityError("relation " + r->name + " expects " + std::to_string(r->arity) +
                         " arguments, got " + std::to_string(args.size()));
    Node n;
    n.kind = FormulaKind::Atom;
    n.rel = r->name;
    n.vars = std::move(args);
    n.free = n.vars;
    std::sort(n.free.begin(), n.free.end());
    n.free.erase(std::unique(n.free.begin(), n.free.end()), n.free.end());
    return finish(std::move(n));
}

Formula Formula::equal(const Signature& sig, Var a, Var b) {
    if (!sig.with_equality())
        throw EqualityNotEnabled("equality is not part of this signature");
    Node n;
    n.kind = FormulaKind::Equal;
    n.vars = {a, b};
    n.free = {a, b};
    std::sort(n.free.begin(), n.free.end());
    n.free.erase(std::unique(n.free.begin(), n.free.end()), n.free.end());
    return finish(std::move(n));
}

Formula Formula::negate(Formula f) {
    Node n;
    n.kind = FormulaKind::Not;
    n.free = f.free_variables();
    n.children = {std::move(f)};
    return finish(std::move(n));
}

Formula Formula::conj(std::vector<Formula> fs) {
    if (fs.empty()) throw Error("conjunction needs at least one operand");
    if (fs.size() == 1) return std::move(fs[0]);
    Node n;
    n.kind = FormulaKind::And;
    n.free = merge_free(fs);
    n.children = std::move(fs);
    return finish(std::move(n));
}

Formula Formula::disj(std::vector<Formula> fs) {
    if (fs.empty()) throw Error("disjunction needs at least one operand");
    if (fs.size() == 1) return std::move(fs[0]);
    Node n;
    n.kind = FormulaKind::Or;
    n.free = merge_free(fs);
    n.children = std::move(fs);
    return finish(std::move(n));
}

Formula Formula::exists(Var v, Formula body) {
    Node n;
    n.kind = FormulaKind::Exists;
    n.vars = {v};
    n.free = body.free_variables();
    remove_var(n.free, v);
    n.children = {std::move(body)};
    return finish(std::move(n));
}

Formula Formula::forall(Var v, Formula body) {
    Node n;
    n.kind = FormulaKind::Forall;
    n.vars = {v};
    n.free = body.free_variables();
    remove_var(n.free, v);
    n.children = {std::move(body)};
    return finish(std::move(n));
}

Formula Formula::exists_at_least(Nat count, std::vector<Var> bound, Formula body) {
    for (std::size_t i = 0; i < bound.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (bound[i] == bound[j])
                throw DuplicateVariable("counting quantifier binds " + bound[i].str() +
                                        " twice");
    Node n;
    n.kind = FormulaKind::ExistsAtLeast;
    n.threshold = count;
    n.vars = std::move(bound);
    n.free = body.free_variables();
    for (Var v : n.vars) remove_var(n.free, v);
    n.children = {std::move(body)};
    return finish(std::move(n));
}

bool Formula::structural_equal(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash) return false;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.rel != y.rel || x.vars != y.vars ||
        x.threshold != y.threshold || x.children.size() != y.children.size())
        return false;
    for (std::size_t i = 0; i < x.children.size(); ++i)
        if (!(x.children[i] == y.children[i])) return false;
    return true;
}

std::strong_ordering compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (auto c = x.kind <=> y.kind; c != 0) return c;
    if (auto c = x.rel.compare(y.rel) <=> 0; c != 0) return c;
    if (auto c = x.vars <=> y.vars; c != 0) return c;
    if (auto c = x.threshold <=> y.threshold; c != 0) return c;
    if (auto c = x.children.size() <=> y.children.size(); c != 0) return c;
    for (std::size_t i = 0; i < x.children.size(); ++i)
        if (auto c = compare(x.children[i], y.children[i]); c != 0) return c;
    return std::strong_ordering::equal;
}

std::string Formula::str() const {
    const Node& n = *node_;
    switch (n.kind) {
        case FormulaKind::Atom: {
            std::string s = n.rel + "(";
            for (std::size_t i = 0; i < n.vars.size(); ++i) {
                if (i) s += ",";
                s += n.vars[i].str();
            }
            return s + ")";
        }
        case FormulaKind::Equal:
            return n.vars[0].str() + " = " + n.vars[1].str();
        case FormulaKind::Not:
            return "~" + n.children[0].str();
        case FormulaKind::And:
        case FormulaKind::Or: {
            const char* op = n.kind == FormulaKind::And ? " & " : " | ";
            std::string s = "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) s += op;
                s += n.children[i].str();
            }
            return s + ")";
        }
        case FormulaKind::Exists:
            return "E " + n.vars[0].str() + ". " + n.children[0].str();
        case FormulaKind::Forall:
            return "A " + n.vars[0].str() + ". " + n.children[0].str();
        case FormulaKind::ExistsAtLeast: {
            std::string s = "E^" + std::to_string(n.threshold) + " (";
            for (std::size_t i = 0; i < n.vars.size(); ++i) {
                if (i) s += ",";
                s += n.vars[i].str();
            }
            return s + "). " + n.children[0].str();
        }
    }
    throw Error("formula: unknown node kind");
}

Formula normalize(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Atom:
            return f;
        case FormulaKind::Equal: {
            if (f.variables()[0] <= f.variables()[1]) return f;
            Signature permissive({}, true);
            return Formula::equal(permissive, f.variables()[1], f.variables()[0]);
        }
        case FormulaKind::Not: {
            Formula inner = normalize(f.body());
            if (inner.kind() == FormulaKind::Not) return inner.body();
            return Formula::negate(std::move(inner));
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> ops;
            ops.reserve(f.operands().size());
            for (const Formula& c : f.operands()) ops.push_back(normalize(c));
            std::sort(ops.begin(), ops.end(), FormulaLess{});
            ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(ops))
                                                : Formula::disj(std::move(ops));
        }
        case FormulaKind::Exists:
            return Formula::exists(f.bound_variable(), normalize(f.body()));
        case FormulaKind::Forall:
            return Formula::forall(f.bound_variable(), normalize(f.body()));
        case FormulaKind::ExistsAtLeast:
            return Formula::exists_at_least(f.threshold(), f.variables(),
                                            normalize(f.body()));
    }
    throw Error("formula: unknown node kind");
}

namespace {

void collect_subformulas(const Formula& f, std::set<Formula, FormulaLess>& out) {
    if (!out.insert(f).second) return;
    switch (f.kind()) {
        case FormulaKind::Atom:
        case FormulaKind::Equal:
            break;
        case FormulaKind::And:
        case FormulaKind::Or:
            for (const Formula& c : f.operands()) collect_subformulas(c, out);
            break;
        default:
            collect_subformulas(f.body(), out);
            break;
    }
}

}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
    std::set<Formula, FormulaLess> acc;
    collect_subformulas(f, acc);
    return {acc.begin(), acc.end()};
}

void validate_against(const Formula& f, const Signature& sig) {
    switch (f.kind()) {
        case FormulaKind::Atom: {
            const Relation* r = sig.find(f.relation());
            if (!r)
                throw SignatureMismatch("formula uses relation " + f.relation() +
                                        " absent from the signature");
            if (f.variables().size() != r->arity)
                throw SignatureMismatch("relation " + r->name + " used with arity " +
                                        std::to_string(f.variables().size()) +
                                        ", signature says " + std::to_string(r->arity));
            return;
        }
        case FormulaKind::Equal:
            if (!sig.with_equality())
                throw SignatureMismatch("formula uses equality, signature disables it");
            return;
        case FormulaKind::And:
        case FormulaKind::Or:
            for (const Formula& c : f.operands()) validate_against(c, sig);
            return;
        default:
            validate_against(f.body(), sig);
            return;
    }
}

}  // namespace distinguo
