#include "distinguo/io.hpp"

#include <cctype>
#include <string>
#include <utility>

#include "distinguo/errors.hpp"
#include "distinguo/parser.hpp"
#include "distinguo/periodic.hpp"

namespace distinguo {

namespace {

struct Line {
    std::size_t offset;  // byte offset of the line start in the document
    std::string_view text;
};

// Lines that carry content: blanks and # comments dropped, \r tolerated.
std::vector<Line> effective_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                                 line.back() == '\t'))
            line.remove_suffix(1);
        std::size_t first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line[first] != '#')
            out.push_back({pos + first, line.substr(first)});
        if (end == text.size()) break;
        pos = end + 1;
    }
    return out;
}

// Cursor over one line; error positions are document offsets.
struct LineCursor {
    std::string_view s;
    std::size_t base;
    std::size_t i = 0;

    std::size_t here() const { return base + i; }
    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }

    void skip_spaces() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }

    bool eat(char c) {
        if (done() || s[i] != c) return false;
        ++i;
        return true;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw SyntaxError(here(), std::string("expected ") + what);
    }

    Nat number() {
        if (done() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw SyntaxError(here(), "expected a number");
        std::uint64_t v = 0;
        while (!done() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            v = v * 10 + static_cast<std::uint64_t>(s[i] - '0');
            if (v > 0xffffffffULL) throw SyntaxError(here(), "number too large");
            ++i;
        }
        return static_cast<Nat>(v);
    }

    std::string word() {
        std::size_t start = i;
        while (!done() && s[i] != ' ' && s[i] != '\t' && s[i] != ':' &&
               s[i] != '=')
            ++i;
        if (i == start) throw SyntaxError(here(), "expected a name");
        return std::string(s.substr(start, i - start));
    }

    void end_of_line() {
        skip_spaces();
        if (!done())
            throw SyntaxError(here(), "unexpected trailing input on line");
    }
};

Signature parse_sig_line(const Line& line) {
    LineCursor c{line.text, line.offset};
    if (c.word() != "sig")
        throw SyntaxError(line.offset, "document must start with a sig line");
    std::vector<Relation> rels;
    bool eq = false;
    for (;;) {
        c.skip_spaces();
        if (c.done()) break;
        std::size_t at = c.here();
        std::string name = c.word();
        if (name == "eq") {
            eq = true;
            c.end_of_line();
            break;
        }
        if (!c.eat(':'))
            throw SyntaxError(c.here(), "expected ':' after relation name");
        Nat arity = c.number();
        if (arity == 0) throw SyntaxError(at, "arity must be positive");
        rels.push_back({std::move(name), arity});
    }
    return Signature(std::move(rels), eq);
}

std::vector<std::uint64_t> parse_bits(LineCursor& c) {
    std::vector<std::uint64_t> bits;
    while (!c.done() && (c.peek() == '0' || c.peek() == '1')) {
        bits.push_back(c.peek() == '1');
        ++c.i;
    }
    return bits;
}

PeriodicSet parse_periodic_set(LineCursor& c) {
    c.skip_spaces();
    if (c.word() != "prefix")
        throw SyntaxError(c.here(), "expected 'prefix:'");
    c.expect(':', "':' after prefix");
    auto prefix = parse_bits(c);
    c.skip_spaces();
    if (c.word() != "cycle") throw SyntaxError(c.here(), "expected 'cycle:'");
    c.expect(':', "':' after cycle");
    auto cycle = parse_bits(c);
    c.end_of_line();
    PeriodicSet::Bits p(prefix.begin(), prefix.end());
    PeriodicSet::Bits q(cycle.begin(), cycle.end());
    return PeriodicSet(std::move(p), std::move(q));
}

std::vector<Tuple> parse_tuple_set(LineCursor& c, Nat arity) {
    c.skip_spaces();
    c.expect('{', "'{'");
    std::vector<Tuple> tuples;
    c.skip_spaces();
    if (c.eat('}')) {
        c.end_of_line();
        return tuples;
    }
    for (;;) {
        c.skip_spaces();
        Tuple t;
        if (c.eat('(')) {
            for (;;) {
                c.skip_spaces();
                t.push_back(c.number());
                c.skip_spaces();
                if (c.eat(')')) break;
                c.expect(',', "',' or ')' in tuple");
            }
        } else {
            if (arity != 1)
                throw SyntaxError(c.here(),
                                  "tuples of arity above one need parentheses");
            t.push_back(c.number());
        }
        tuples.push_back(std::move(t));
        c.skip_spaces();
        if (c.eat('}')) break;
        c.expect(',', "',' or '}' in set");
    }
    c.end_of_line();
    return tuples;
}

}  // namespace

Structure parse_structure_doc(std::string_view text) {
    std::vector<Line> lines = effective_lines(text);
    if (lines.size() < 2)
        throw SyntaxError(text.size(), "document needs a sig and a backend line");

    Signature sig = parse_sig_line(lines[0]);

    LineCursor backend{lines[1].text, lines[1].offset};
    std::string kind = backend.word();
    bool finite = kind == "finite";
    Nat size = 0;
    if (finite) {
        backend.skip_spaces();
        size = backend.number();
        backend.end_of_line();
    } else if (kind == "periodic") {
        backend.end_of_line();
    } else {
        throw SyntaxError(lines[1].offset, "expected 'finite N' or 'periodic'");
    }

    if (lines.size() != 2 + sig.size())
        throw SyntaxError(text.size(),
                          "expected exactly one interpretation line per relation");

    std::vector<std::vector<Tuple>> finite_interp(sig.size());
    std::vector<PeriodicSet> periodic_interp(sig.size(), PeriodicSet::empty());
    std::vector<bool> seen(sig.size(), false);

    for (std::size_t li = 2; li < lines.size(); ++li) {
        LineCursor c{lines[li].text, lines[li].offset};
        std::string name = c.word();
        std::size_t rel = sig.index_of(name);
        if (seen[rel])
            throw SyntaxError(lines[li].offset,
                              "relation interpreted more than once");
        seen[rel] = true;
        c.skip_spaces();
        c.expect('=', "'=' after relation name");
        if (finite)
            finite_interp[rel] = parse_tuple_set(c, sig.relations()[rel].arity);
        else
            periodic_interp[rel] = parse_periodic_set(c);
    }

    if (finite)
        return Structure(FiniteStructure(std::move(sig), size,
                                         std::move(finite_interp)));
    return Structure(PeriodicUnaryStructure(std::move(sig),
                                            std::move(periodic_interp)));
}

std::string serialize_structure_doc(const Structure& s) {
    const Signature& sig = s.signature();
    std::string out = "sig";
    for (const Relation& r : sig.relations())
        out += " " + r.name + ":" + std::to_string(r.arity);
    if (sig.with_equality()) out += " eq";
    out += "\n";

    if (s.is_finite()) {
        const FiniteStructure& f = s.finite();
        out += "finite " + std::to_string(f.size()) + "\n";
        for (std::size_t i = 0; i < sig.size(); ++i) {
            out += sig.relations()[i].name + " = {";
            const std::vector<Tuple>& tuples = f.tuples(i);
            for (std::size_t t = 0; t < tuples.size(); ++t) {
                if (t > 0) out += ",";
                if (tuples[t].size() == 1) {
                    out += std::to_string(tuples[t][0]);
                } else {
                    out += "(";
                    for (std::size_t p = 0; p < tuples[t].size(); ++p) {
                        if (p > 0) out += ",";
                        out += std::to_string(tuples[t][p]);
                    }
                    out += ")";
                }
            }
            out += "}\n";
        }
        return out;
    }

    const PeriodicUnaryStructure& p = s.periodic();
    out += "periodic\n";
    for (std::size_t i = 0; i < sig.size(); ++i)
        out += sig.relations()[i].name + " = " + p.set_of(i).str() + "\n";
    return out;
}

std::vector<Formula> parse_formula_lines(std::string_view text,
                                         const Signature& sig) {
    std::vector<Formula> out;
    for (const Line& line : effective_lines(text)) {
        try {
            out.push_back(parse(line.text, sig));
        } catch (const SyntaxError& e) {
            throw SyntaxError(line.offset + e.position, e.detail);
        }
    }
    return out;
}

}  // namespace distinguo
