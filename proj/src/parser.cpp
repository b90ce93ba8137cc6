#include "distinguo/parser.hpp"

#include <cctype>
#include <cstdint>

#include "distinguo/errors.hpp"

namespace distinguo {

namespace {

struct Token {
    enum Type { Ident, Number, Sym, End } type;
    std::string text;  // Ident: spelling; Sym: one char
    std::uint64_t number = 0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
            ++i_;
        tok_.pos = i_;
        if (i_ >= text_.size()) {
            tok_.type = Token::End;
            tok_.text.clear();
            return;
        }
        char c = text_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                ++j;
            tok_.type = Token::Ident;
            tok_.text = std::string(text_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            std::uint64_t v = 0;
            while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
                v = v * 10 + static_cast<std::uint64_t>(text_[j] - '0');
                if (v > 0x7fffffffULL)
                    throw SyntaxError(i_, "number too large");
                ++j;
            }
            tok_.type = Token::Number;
            tok_.number = v;
            tok_.text = std::string(text_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        tok_.type = Token::Sym;
        tok_.text = std::string(1, c);
        ++i_;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, const Signature& sig) : lex_(text), sig_(sig) {}

    Formula run() {
        Formula f = formula();
        if (lex_.peek().type != Token::End)
            throw SyntaxError(lex_.peek().pos, "trailing input after formula");
        return f;
    }

private:
    bool is_sym(const Token& t, char c) const {
        return t.type == Token::Sym && t.text[0] == c;
    }

    void expect_sym(char c, const char* what) {
        const Token& t = lex_.peek();
        if (!is_sym(t, c)) throw SyntaxError(t.pos, std::string("expected ") + what);
        lex_.take();
    }

    static bool var_spelling(const std::string& s) {
        if (s.size() < 2 || s[0] != 'v') return false;
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    }

    Var parse_var() {
        const Token& t = lex_.peek();
        if (t.type != Token::Ident || !var_spelling(t.text))
            throw SyntaxError(t.pos, "expected a variable (v0, v1, ...)");
        std::uint64_t idx = 0;
        for (std::size_t i = 1; i < t.text.size(); ++i) {
            idx = idx * 10 + static_cast<std::uint64_t>(t.text[i] - '0');
            if (idx > 0x7fffffffULL) throw SyntaxError(t.pos, "variable index too large");
        }
        lex_.take();
        return Var(static_cast<Nat>(idx));
    }

    std::vector<Var> parse_varlist_nonempty() {
        std::vector<Var> vs;
        vs.push_back(parse_var());
        while (is_sym(lex_.peek(), ',')) {
            lex_.take();
            vs.push_back(parse_var());
        }
        return vs;
    }

    Formula formula() {
        const Token& t = lex_.peek();
        switch (t.type) {
            case Token::Sym:
                if (t.text[0] == '~') {
                    lex_.take();
                    return Formula::negate(formula());
                }
                if (t.text[0] == '(') return connective();
                throw SyntaxError(t.pos, "unexpected symbol '" + t.text + "'");
            case Token::Ident:
                if (var_spelling(t.text)) return equality();
                if (std::isupper(static_cast<unsigned char>(t.text[0])))
                    return upper_ident();
                throw SyntaxError(t.pos, "unexpected identifier '" + t.text + "'");
            case Token::Number:
                throw SyntaxError(t.pos, "unexpected number");
            case Token::End:
                throw SyntaxError(t.pos, "unexpected end of input");
        }
        throw SyntaxError(t.pos, "unexpected token");
    }

    Formula connective() {
        lex_.take();  // '('
        std::vector<Formula> ops;
        ops.push_back(formula());
        const Token& t = lex_.peek();
        if (!is_sym(t, '&') && !is_sym(t, '|'))
            throw SyntaxError(t.pos, "expected '&' or '|'");
        char op = lex_.take().text[0];
        ops.push_back(formula());
        while (is_sym(lex_.peek(), op)) {
            lex_.take();
            ops.push_back(formula());
        }
        const Token& close = lex_.peek();
        if (is_sym(close, '&') || is_sym(close, '|'))
            throw SyntaxError(close.pos, "mixed connectives need nested parentheses");
        expect_sym(')', "')'");
        return op == '&' ? Formula::conj(std::move(ops)) : Formula::disj(std::move(ops));
    }

    Formula equality() {
        std::size_t pos = lex_.peek().pos;
        Var a = parse_var();
        expect_sym('=', "'='");
        Var b = parse_var();
        if (!sig_.with_equality())
            throw EqualityNotEnabled("equality atom at offset " + std::to_string(pos) +
                                     ": signature does not enable equality");
        return Formula::equal(sig_, a, b);
    }

    // An identifier starting uppercase: a quantifier ("E", "A", "E^") when not
    // followed by '(', otherwise an atom of that relation.
    Formula upper_ident() {
        Token name = lex_.take();
        if (is_sym(lex_.peek(), '(')) return atom_args(std::move(name));
        if (name.text == "E" && is_sym(lex_.peek(), '^')) {
            lex_.take();  // '^'
            const Token& num = lex_.peek();
            if (num.type != Token::Number)
                throw SyntaxError(num.pos, "expected a count after 'E^'");
            Nat n = static_cast<Nat>(lex_.take().number);
            expect_sym('(', "'('");
            std::vector<Var> vs;
            if (!is_sym(lex_.peek(), ')')) vs = parse_varlist_nonempty();
            expect_sym(')', "')'");
            expect_sym('.', "'.'");
            return Formula::exists_at_least(n, std::move(vs), formula());
        }
        if (name.text == "E" || name.text == "A") {
            Var v = parse_var();
            expect_sym('.', "'.'");
            Formula body = formula();
            return name.text == "E" ? Formula::exists(v, std::move(body))
                                    : Formula::forall(v, std::move(body));
        }
        throw SyntaxError(name.pos,
                          "expected '(' after relation name '" + name.text + "'");
    }

    Formula atom_args(Token name) {
        expect_sym('(', "'('");
        std::vector<Var> vs = parse_varlist_nonempty();
        expect_sym(')', "')'");
        // Formula::atom throws UnknownRelation / ArityError with the details.
        return Formula::atom(sig_, name.text, std::move(vs));
    }

    Lexer lex_;
    const Signature& sig_;
};

}  // namespace

Formula parse(std::string_view text, const Signature& sig) {
    return Parser(text, sig).run();
}

}  // namespace distinguo
