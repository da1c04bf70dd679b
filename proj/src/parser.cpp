// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/parser.hpp"

#include "cpgcl/errors.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace cpgcl {

namespace {

enum class Tok {
    Ident, Int, Decimal,
    Assign, Semi, LBrace, RBrace, LParen, RParen, LBracket, RBracket, NDBox,
    Plus, Minus, Star, Slash,
    Eq, Ne, Lt, Le, Gt, Ge, AndAnd, OrOr, Bang, Comma,
    End
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : s_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            if (pos_ >= s_.size()) break;
            out.push_back(next());
        }
        out.push_back({Tok::End, "", line_, col_});
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
                while (pos_ < s_.size() && s_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Token next() {
        std::size_t line = line_, col = col_;
        char c = s_[pos_];
        auto sym = [&](Tok t, std::size_t n, const char* txt) {
            for (std::size_t i = 0; i < n; ++i) advance();
            return Token{t, txt, line, col};
        };
        char c1 = pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0';
        switch (c) {
        case ':':
            if (c1 == '=') return sym(Tok::Assign, 2, ":=");
            throw SyntaxError(line, col, "expected ':='");
        case ';': return sym(Tok::Semi, 1, ";");
        case '{': return sym(Tok::LBrace, 1, "{");
        case '}': return sym(Tok::RBrace, 1, "}");
        case '(': return sym(Tok::LParen, 1, "(");
        case ')': return sym(Tok::RParen, 1, ")");
        case '[':
            if (c1 == ']') return sym(Tok::NDBox, 2, "[]");
            return sym(Tok::LBracket, 1, "[");
        case ']': return sym(Tok::RBracket, 1, "]");
        case '+': return sym(Tok::Plus, 1, "+");
        case '-': return sym(Tok::Minus, 1, "-");
        case '*': return sym(Tok::Star, 1, "*");
        case '/': return sym(Tok::Slash, 1, "/");
        case '=': return sym(Tok::Eq, 1, "=");
        case '!':
            if (c1 == '=') return sym(Tok::Ne, 2, "!=");
            return sym(Tok::Bang, 1, "!");
        case '<':
            if (c1 == '=') return sym(Tok::Le, 2, "<=");
            return sym(Tok::Lt, 1, "<");
        case '>':
            if (c1 == '=') return sym(Tok::Ge, 2, ">=");
            return sym(Tok::Gt, 1, ">");
        case '&':
            if (c1 == '&') return sym(Tok::AndAnd, 2, "&&");
            throw SyntaxError(line, col, "expected '&&'");
        case '|':
            if (c1 == '|') return sym(Tok::OrOr, 2, "||");
            throw SyntaxError(line, col, "expected '||'");
        case ',': return sym(Tok::Comma, 1, ",");
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string text;
            bool dot = false;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                    (!dot && s_[pos_] == '.' && pos_ + 1 < s_.size() &&
                     std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))))) {
                if (s_[pos_] == '.') dot = true;
                text.push_back(s_[pos_]);
                advance();
            }
            return {dot ? Tok::Decimal : Tok::Int, text, line, col};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string text;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                text.push_back(s_[pos_]);
                advance();
            }
            return {Tok::Ident, text, line, col};
        }
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

    Program program() {
        StmtPtr body = stmt();
        expect(Tok::End, "end of input");
        return make_program(std::move(body));
    }

    Expectation expectation_toplevel() {
        Expectation e = expectation();
        expect(Tok::End, "end of input");
        return e.simplified();
    }

    BExpPtr bexp_toplevel() {
        BExpPtr b = bexp();
        expect(Tok::End, "end of input");
        return b;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n = 1) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    bool at(Tok t) const { return cur().kind == t; }
    bool at_keyword(const char* kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }
    Token eat() { return toks_[pos_++]; }
    Token expect(Tok t, const char* what) {
        if (!at(t))
            throw SyntaxError(cur().line, cur().col,
                              std::string("expected ") + what + ", found '" +
                                  (cur().kind == Tok::End ? "end of input" : cur().text) + "'");
        return eat();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(cur().line, cur().col, msg);
    }

    // ---- statements ----

    StmtPtr stmt() {
        StmtPtr acc = basic();
        std::vector<StmtPtr> parts{acc};
        while (at(Tok::Semi)) {
            eat();
            // tolerate a trailing semicolon before '}' or end of input
            if (at(Tok::RBrace) || at(Tok::End)) break;
            parts.push_back(basic());
        }
        if (parts.size() == 1) return parts[0];
        return sseq(parts);
    }

    StmtPtr basic() {
        if (at_keyword("skip")) { eat(); return sskip(); }
        if (at_keyword("abort")) { eat(); return sabort(); }
        if (at_keyword("if")) {
            eat();
            expect(Tok::LParen, "'('");
            BExpPtr g = bexp();
            expect(Tok::RParen, "')'");
            StmtPtr t = block();
            if (!at_keyword("else")) fail("expected 'else'");
            eat();
            StmtPtr e = block();
            return site(std::move(g), std::move(t), std::move(e));
        }
        if (at_keyword("while")) {
            eat();
            expect(Tok::LParen, "'('");
            BExpPtr g = bexp();
            expect(Tok::RParen, "')'");
            StmtPtr b = block();
            return swhile(std::move(g), std::move(b));
        }
        if (at_keyword("observe")) {
            eat();
            expect(Tok::LParen, "'('");
            BExpPtr g = bexp();
            expect(Tok::RParen, "')'");
            return sobserve(std::move(g));
        }
        if (at(Tok::LBrace)) {
            StmtPtr a = block();
            if (at(Tok::NDBox)) {
                eat();
                StmtPtr b = block();
                return sndchoice(std::move(a), std::move(b));
            }
            expect(Tok::LBracket, "'[' or '[]'");
            ProbExp p = pexp();
            expect(Tok::RBracket, "']'");
            StmtPtr b = block();
            return spchoice(std::move(a), std::move(p), std::move(b));
        }
        if (at(Tok::Ident)) {
            if (is_keyword(cur().text)) fail("unexpected keyword '" + cur().text + "'");
            std::string name = eat().text;
            expect(Tok::Assign, "':='");
            AExpPtr e = aexp();
            return sassign(std::move(name), std::move(e));
        }
        fail("expected a statement");
    }

    StmtPtr block() {
        expect(Tok::LBrace, "'{'");
        StmtPtr s = stmt();
        expect(Tok::RBrace, "'}'");
        return s;
    }

    static bool is_keyword(const std::string& t) {
        return t == "skip" || t == "abort" || t == "if" || t == "else" ||
               t == "while" || t == "observe" || t == "true" || t == "false" ||
               t == "min" || t == "inf";
    }

    // ---- probability annotations ----

    ProbExp pexp() {
        if (at(Tok::Int)) {
            std::string n = eat().text;
            if (at(Tok::Slash)) {
                eat();
                std::string d = expect(Tok::Int, "denominator").text;
                if (BigInt(d) == 0) throw ValidationError("probability with denominator 0");
                return prob_const(Rational(BigInt(n), BigInt(d)));
            }
            return prob_const(Rational(BigInt(n)));
        }
        if (at(Tok::Decimal)) return prob_const(Rational::parse(eat().text));
        if (at(Tok::Ident)) {
            if (is_keyword(cur().text)) fail("invalid probability");
            return ProbExp::parameter(eat().text);
        }
        if (at(Tok::LParen)) {
            // transformation-generated quotient: (expectation) / (expectation)
            eat();
            Expectation num = expectation();
            expect(Tok::RParen, "')'");
            expect(Tok::Slash, "'/'");
            expect(Tok::LParen, "'('");
            Expectation den = expectation();
            expect(Tok::RParen, "')'");
            return ProbExp::quotient(
                std::make_shared<Expectation>(num.simplified()),
                std::make_shared<Expectation>(den.simplified()));
        }
        fail("expected a probability");
    }

    ProbExp prob_const(Rational r) {
        if (r < Rational(0) || r > Rational(1))
            throw ValidationError("probability " + r.str() + " lies outside [0,1]");
        return ProbExp::constant(std::move(r));
    }

    // ---- arithmetic expressions ----

    AExpPtr aexp() {
        AExpPtr acc = aterm();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            AOp op = eat().kind == Tok::Plus ? AOp::Add : AOp::Sub;
            acc = abin(op, std::move(acc), aterm());
        }
        return acc;
    }

    AExpPtr aterm() {
        AExpPtr acc = afactor();
        while (at(Tok::Star)) {
            eat();
            acc = abin(AOp::Mul, std::move(acc), afactor());
        }
        return acc;
    }

    AExpPtr afactor() {
        if (at(Tok::Int)) return aconst(BigInt(eat().text));
        if (at(Tok::Minus)) {
            eat();
            if (at(Tok::Int)) return aconst(-BigInt(eat().text));
            // -x reads as 0 - x
            return abin(AOp::Sub, aconst(BigInt(0)), afactor());
        }
        if (at(Tok::Ident)) {
            if (is_keyword(cur().text)) fail("unexpected keyword in expression");
            return avar(eat().text);
        }
        if (at(Tok::LParen)) {
            eat();
            AExpPtr e = aexp();
            expect(Tok::RParen, "')'");
            return e;
        }
        fail("expected an arithmetic expression");
    }

    // ---- boolean expressions ----

    BExpPtr bexp() { return bor_(); }

    BExpPtr bor_() {
        BExpPtr acc = band_();
        while (at(Tok::OrOr)) {
            eat();
            acc = bor(std::move(acc), band_());
        }
        return acc;
    }

    BExpPtr band_() {
        BExpPtr acc = bunary();
        while (at(Tok::AndAnd)) {
            eat();
            acc = band(std::move(acc), bunary());
        }
        return acc;
    }

    BExpPtr bunary() {
        if (at(Tok::Bang)) {
            eat();
            return bnot(bunary());
        }
        return batom();
    }

    std::optional<CmpOp> cmp_op() {
        switch (cur().kind) {
        case Tok::Eq: return CmpOp::Eq;
        case Tok::Ne: return CmpOp::Ne;
        case Tok::Lt: return CmpOp::Lt;
        case Tok::Le: return CmpOp::Le;
        case Tok::Gt: return CmpOp::Gt;
        case Tok::Ge: return CmpOp::Ge;
        default: return std::nullopt;
        }
    }

    BExpPtr batom() {
        if (at_keyword("true")) { eat(); return btrue(); }
        if (at_keyword("false")) { eat(); return bfalse(); }
        if (at(Tok::LParen)) {
            // "(" starts either a nested boolean expression or the left
            // operand of a comparison; try the boolean reading first
            std::size_t save = pos_;
            eat();
            try {
                BExpPtr inner = bexp();
                expect(Tok::RParen, "')'");
                if (!cmp_op()) return inner;
            } catch (const SyntaxError&) {
                // fall through to the comparison reading
            }
            pos_ = save;
        }
        AExpPtr l = aexp();
        auto op = cmp_op();
        if (!op) fail("expected a comparison operator");
        eat();
        AExpPtr r = aexp();
        return bcmp(*op, std::move(l), std::move(r));
    }

    // ---- expectations ----

    Expectation expectation() {
        if (at_keyword("inf")) {
            eat();
            return Expectation::infinity();
        }
        if (at_keyword("min") && peek().kind == Tok::LParen) {
            eat();
            eat();
            Expectation acc = expectation();
            while (at(Tok::Comma)) {
                eat();
                acc = Expectation::min_of(acc, expectation());
            }
            expect(Tok::RParen, "')'");
            return acc;
        }
        return esum();
    }

    Expectation esum() {
        bool neg = false;
        if (at(Tok::Minus)) {
            eat();
            neg = true;
        }
        Expectation acc = eterm(neg);
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool minus = eat().kind == Tok::Minus;
            acc = Expectation::add(acc, eterm(minus));
        }
        return acc;
    }

    Expectation eterm(bool negate) {
        GuardPtr g = gtrue();
        Poly w = Poly::constant(Rational(1));
        bool have_weight = false;
        if (at(Tok::LBracket)) {
            eat();
            BExpPtr b = bexp();
            expect(Tok::RBracket, "']'");
            g = from_bexp(*b);
            if (at(Tok::Star)) {
                eat();
                w = polyprod();
                have_weight = true;
            }
        } else {
            w = polyprod();
            have_weight = true;
        }
        (void)have_weight;
        if (negate) w = w.negated();
        return Expectation::term(std::move(g), std::move(w));
    }

    Poly polyprod() {
        Poly acc = polyatom();
        while (at(Tok::Star)) {
            eat();
            acc = acc * polyatom();
        }
        return acc;
    }

    Poly polyatom() {
        if (at(Tok::Minus)) {
            eat();
            return polyatom().negated();
        }
        if (at(Tok::Int)) {
            std::string n = eat().text;
            if (at(Tok::Slash)) {
                eat();
                std::string d = expect(Tok::Int, "denominator").text;
                if (BigInt(d) == 0) throw ValidationError("rational with denominator 0");
                return Poly::constant(Rational(BigInt(n), BigInt(d)));
            }
            return Poly::constant(Rational(BigInt(n)));
        }
        if (at(Tok::Decimal)) return Poly::constant(Rational::parse(eat().text));
        if (at(Tok::Ident) && !is_keyword(cur().text)) return Poly::variable(eat().text);
        if (at(Tok::LParen)) {
            eat();
            Poly acc = polysum();
            expect(Tok::RParen, "')'");
            return acc;
        }
        fail("expected a polynomial factor");
    }

    Poly polysum() {
        bool neg = false;
        if (at(Tok::Minus)) {
            eat();
            neg = true;
        }
        Poly acc = polyprod();
        if (neg) acc = acc.negated();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool minus = eat().kind == Tok::Minus;
            Poly t = polyprod();
            acc = minus ? acc - t : acc + t;
        }
        return acc;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

Program parse_program(const std::string& text) {
    return Parser(text).program();
}

Expectation parse_expectation(const std::string& text) {
    return Parser(text).expectation_toplevel();
}

BExpPtr parse_bexp_text(const std::string& text) {
    return Parser(text).bexp_toplevel();
}

} // namespace cpgcl
