#pragma once

// A small text language for sum-product q-series identities: lexer, parser,
// AST, exact evaluator with provable summation cutoffs, canonical renderer,
// and a plain-text catalog loader.
//
// Grammar:
//   identity := name ':' expr '=' expr
//   expr     := ['-'] term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := 'sum' '(' idx '>=' int ',' expr ')'
//             | 'poch' '(' base ';' base ';' poly ')'       (length affine)
//             | 'infprod' '(' base (',' base)* ';' base ')'
//             | 'q' ['^' exponent]                          (quadratic)
//             | 'a' ['^' exponent]                          (affine)
//             | int
//             | '(' expr ')' ['^' exponent]                 (only for (-1))
//   exponent := int | '(' poly ')'
//   poly     := ['-'] pterm (('+'|'-') pterm)*
//   pterm    := pfactor (('*' pfactor) | ('/' int))*
//   pfactor  := int | idx | '(' poly ')' | pfactor '^' int
//   base     := ['-'] ('1' | 'a' ['^' int] ['*' 'q' ['^' int]] | 'q' ['^' int])

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrrt/bailey.hpp"
#include "qrrt/report.hpp"
#include "qrrt/series.hpp"

namespace qrrt {

// ---------------------------------------------------------------------------
// Exact rational numbers for exponent polynomials.

struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw ValidationError("zero denominator in exponent");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    bool is_zero() const { return num == 0; }
    bool is_integer() const { return den == 1; }

    friend Rat operator+(const Rat& x, const Rat& y) {
        return Rat(x.num * y.den + y.num * x.den, x.den * y.den);
    }
    friend Rat operator-(const Rat& x, const Rat& y) {
        return Rat(x.num * y.den - y.num * x.den, x.den * y.den);
    }
    friend Rat operator*(const Rat& x, const Rat& y) { return Rat(x.num * y.num, x.den * y.den); }
    friend Rat operator/(const Rat& x, const Rat& y) {
        if (y.num == 0) throw ValidationError("division by zero in exponent");
        return Rat(x.num * y.den, x.den * y.num);
    }
    Rat operator-() const { return Rat(-num, den); }
    friend bool operator==(const Rat& x, const Rat& y) { return x.num == y.num && x.den == y.den; }
    friend bool operator<(const Rat& x, const Rat& y) { return x.num * y.den < y.num * x.den; }
    friend bool operator<=(const Rat& x, const Rat& y) { return x.num * y.den <= y.num * x.den; }
    friend bool operator>(const Rat& x, const Rat& y) { return y < x; }
    friend bool operator>=(const Rat& x, const Rat& y) { return y <= x; }
};

// ---------------------------------------------------------------------------
// Polynomials of degree <= 2 in the summation indices, rational coefficients.

struct QuadPoly {
    std::map<std::pair<int, int>, Rat> quad;  // key (i, j) with i <= j
    std::map<int, Rat> lin;
    Rat cst;

    static QuadPoly constant(Rat c) {
        QuadPoly p;
        p.cst = c;
        return p;
    }
    static QuadPoly variable(int id) {
        QuadPoly p;
        p.lin[id] = Rat(1);
        return p;
    }

    int degree() const {
        if (!quad.empty()) return 2;
        if (!lin.empty()) return 1;
        return 0;
    }

    void prune() {
        for (auto it = quad.begin(); it != quad.end();)
            it = it->second.is_zero() ? quad.erase(it) : std::next(it);
        for (auto it = lin.begin(); it != lin.end();)
            it = it->second.is_zero() ? lin.erase(it) : std::next(it);
    }

    QuadPoly& operator+=(const QuadPoly& o) {
        for (const auto& [k, c] : o.quad) quad[k] = quad.count(k) ? quad[k] + c : c;
        for (const auto& [k, c] : o.lin) lin[k] = lin.count(k) ? lin[k] + c : c;
        cst = cst + o.cst;
        prune();
        return *this;
    }
    QuadPoly& operator-=(const QuadPoly& o) {
        for (const auto& [k, c] : o.quad) quad[k] = quad.count(k) ? quad[k] - c : -c;
        for (const auto& [k, c] : o.lin) lin[k] = lin.count(k) ? lin[k] - c : -c;
        cst = cst - o.cst;
        prune();
        return *this;
    }
    friend QuadPoly operator+(QuadPoly x, const QuadPoly& y) { return x += y; }
    friend QuadPoly operator-(QuadPoly x, const QuadPoly& y) { return x -= y; }

    QuadPoly scaled(Rat s) const {
        QuadPoly r;
        for (const auto& [k, c] : quad) r.quad[k] = c * s;
        for (const auto& [k, c] : lin) r.lin[k] = c * s;
        r.cst = cst * s;
        r.prune();
        return r;
    }

    friend QuadPoly operator*(const QuadPoly& x, const QuadPoly& y) {
        if (x.degree() + y.degree() > 2)
            throw ValidationError("exponent polynomial exceeds degree 2");
        QuadPoly r;
        r.cst = x.cst * y.cst;
        for (const auto& [i, c] : x.lin) r.lin[i] = (r.lin.count(i) ? r.lin[i] : Rat()) + c * y.cst;
        for (const auto& [i, c] : y.lin) r.lin[i] = (r.lin.count(i) ? r.lin[i] : Rat()) + c * x.cst;
        for (const auto& [i, c] : x.lin)
            for (const auto& [j, d] : y.lin) {
                auto key = std::minmax(i, j);
                r.quad[key] = (r.quad.count(key) ? r.quad[key] : Rat()) + c * d;
            }
        for (const auto& [k, c] : x.quad)
            r.quad[k] = (r.quad.count(k) ? r.quad[k] : Rat()) + c * y.cst;
        for (const auto& [k, c] : y.quad)
            r.quad[k] = (r.quad.count(k) ? r.quad[k] : Rat()) + c * x.cst;
        r.prune();
        return r;
    }

    Rat eval(const std::vector<long long>& env) const {
        Rat v = cst;
        for (const auto& [i, c] : lin) v = v + c * Rat(env[i]);
        for (const auto& [k, c] : quad) v = v + c * Rat(env[k.first]) * Rat(env[k.second]);
        return v;
    }

    /// Substitutes env values for every variable not in `free`.
    QuadPoly partial_eval(const std::vector<long long>& env, const std::set<int>& free) const {
        QuadPoly r;
        r.cst = cst;
        for (const auto& [i, c] : lin) {
            if (free.count(i))
                r.lin[i] = (r.lin.count(i) ? r.lin[i] : Rat()) + c;
            else
                r.cst = r.cst + c * Rat(env[i]);
        }
        for (const auto& [k, c] : quad) {
            bool fi = free.count(k.first), fj = free.count(k.second);
            if (fi && fj)
                r.quad[k] = (r.quad.count(k) ? r.quad[k] : Rat()) + c;
            else if (fi)
                r.lin[k.first] =
                    (r.lin.count(k.first) ? r.lin[k.first] : Rat()) + c * Rat(env[k.second]);
            else if (fj)
                r.lin[k.second] =
                    (r.lin.count(k.second) ? r.lin[k.second] : Rat()) + c * Rat(env[k.first]);
            else
                r.cst = r.cst + c * Rat(env[k.first]) * Rat(env[k.second]);
        }
        r.prune();
        return r;
    }

    Rat quad_coeff(int i, int j) const {
        auto key = std::minmax(i, j);
        auto it = quad.find(key);
        return it == quad.end() ? Rat() : it->second;
    }
    Rat lin_coeff(int i) const {
        auto it = lin.find(i);
        return it == lin.end() ? Rat() : it->second;
    }
    bool all_coeffs_nonnegative() const {
        if (cst < Rat(0)) return false;
        for (const auto& [k, c] : lin)
            if (c < Rat(0)) return false;
        for (const auto& [k, c] : quad)
            if (c < Rat(0)) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// AST.

struct BaseMono {
    int sign = +1;  // the monomial is sign * a^a_pow * q^q_pow
    int a_pow = 0;
    int q_pow = 0;
    bool operator==(const BaseMono&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Sum, Poch, InfProd, QPow, APow, Neg1Pow, Const, Add, Mul, Inv };
    Kind kind;

    // Sum
    int index = -1;
    long long lower = 0;
    ExprPtr body;
    // Poch / InfProd
    std::vector<BaseMono> bases;  // Poch uses bases[0]
    BaseMono ratio;
    QuadPoly length;  // Poch only, affine
    // QPow / APow / Neg1Pow
    QuadPoly exponent;
    // Const
    long long value = 0;
    // Add (signed children), Mul (factors), Inv (child = body)
    std::vector<std::pair<int, ExprPtr>> summands;
    std::vector<ExprPtr> factors;
};

struct ParsedExpr {
    ExprPtr root;
    std::vector<std::string> index_names;  // by id
    bool uses_a = false;
};

struct Identity {
    std::string name;
    ExprPtr lhs, rhs;
    std::vector<std::string> index_names;
    bool uses_a = false;
};

namespace detail {

inline ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

// ---------------------------------------------------------------------------
// Lexer.

struct Token {
    enum class Type { Ident, Int, Punct, End };
    Type type = Type::End;
    std::string text;
    long long value = 0;
    int line = 1, column = 1;
};

class Lexer {
public:
    Lexer(const std::string& text, int start_line = 1, int start_column = 1)
        : text_(text), line_(start_line), column_(start_column) {
        next();
    }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        next();
        return t;
    }

private:
    void next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            advance();
        tok_ = Token{};
        tok_.line = line_;
        tok_.column = column_;
        if (pos_ >= text_.size()) {
            tok_.type = Token::Type::End;
            return;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.type = Token::Type::Int;
            long long v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + (text_[pos_] - '0');
                tok_.text += text_[pos_];
                advance();
            }
            tok_.value = v;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok_.type = Token::Type::Ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                tok_.text += text_[pos_];
                advance();
            }
            return;
        }
        tok_.type = Token::Type::Punct;
        if (c == '>' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            tok_.text = ">=";
            advance();
            advance();
            return;
        }
        static const std::string singles = "()+-*/^=,;:";
        if (singles.find(c) == std::string::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
        tok_.text = std::string(1, c);
        advance();
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string text_;
    size_t pos_ = 0;
    int line_, column_;
    Token tok_;
};

// ---------------------------------------------------------------------------
// Parser.

class Parser {
public:
    Parser(const std::string& text, int start_line = 1) : lex_(text, start_line) {}

    ExprPtr parse_expression_all() {
        ExprPtr e = parse_expr();
        expect_end();
        return e;
    }

    std::pair<ExprPtr, ExprPtr> parse_equation() {
        ExprPtr lhs = parse_expr();
        expect_punct("=");
        ExprPtr rhs = parse_expr();
        expect_end();
        return {lhs, rhs};
    }

    std::vector<std::string> index_names() const { return index_names_; }
    bool uses_a() const { return uses_a_; }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, lex_.peek().line, lex_.peek().column);
    }
    void expect_punct(const std::string& p) {
        if (lex_.peek().type != Token::Type::Punct || lex_.peek().text != p)
            fail("expected '" + p + "'");
        lex_.take();
    }
    bool at_punct(const std::string& p) const {
        return lex_.peek().type == Token::Type::Punct && lex_.peek().text == p;
    }
    void expect_end() {
        if (lex_.peek().type != Token::Type::End) fail("trailing input after expression");
    }
    long long expect_int() {
        if (lex_.peek().type != Token::Type::Int) fail("expected an integer");
        return lex_.take().value;
    }

    ExprPtr parse_expr() {
        std::vector<std::pair<int, ExprPtr>> summands;
        int sign = +1;
        if (at_punct("-")) {
            lex_.take();
            sign = -1;
        }
        summands.emplace_back(sign, parse_term());
        while (at_punct("+") || at_punct("-")) {
            int s = at_punct("+") ? +1 : -1;
            lex_.take();
            summands.emplace_back(s, parse_term());
        }
        if (summands.size() == 1 && summands[0].first == +1) return summands[0].second;
        Expr e;
        e.kind = Expr::Kind::Add;
        e.summands = std::move(summands);
        return make_expr(std::move(e));
    }

    ExprPtr parse_term() {
        std::vector<ExprPtr> factors;
        factors.push_back(parse_factor());
        while (at_punct("*") || at_punct("/")) {
            bool div = at_punct("/");
            lex_.take();
            ExprPtr f = parse_factor();
            if (div) {
                Expr inv;
                inv.kind = Expr::Kind::Inv;
                inv.body = f;
                f = make_expr(std::move(inv));
            }
            factors.push_back(f);
        }
        if (factors.size() == 1) return factors[0];
        Expr e;
        e.kind = Expr::Kind::Mul;
        e.factors = std::move(factors);
        return make_expr(std::move(e));
    }

    ExprPtr parse_factor() {
        const Token& t = lex_.peek();
        if (t.type == Token::Type::Int) {
            Expr e;
            e.kind = Expr::Kind::Const;
            e.value = lex_.take().value;
            return make_expr(std::move(e));
        }
        if (t.type == Token::Type::Ident) {
            if (t.text == "sum") return parse_sum();
            if (t.text == "poch") return parse_poch();
            if (t.text == "infprod") return parse_infprod();
            if (t.text == "q") {
                lex_.take();
                Expr e;
                e.kind = Expr::Kind::QPow;
                e.exponent = parse_power_exponent(2, "q exponent");
                return make_expr(std::move(e));
            }
            if (t.text == "a") {
                lex_.take();
                uses_a_ = true;
                Expr e;
                e.kind = Expr::Kind::APow;
                e.exponent = parse_power_exponent(1, "a exponent");
                return make_expr(std::move(e));
            }
            fail("unexpected identifier '" + t.text + "'");
        }
        if (at_punct("(")) {
            lex_.take();
            ExprPtr inner = parse_expr();
            expect_punct(")");
            if (at_punct("^")) {
                if (inner->kind != Expr::Kind::Const || inner->value != -1) {
                    bool neg_one = inner->kind == Expr::Kind::Add && inner->summands.size() == 1 &&
                                   inner->summands[0].first == -1 &&
                                   inner->summands[0].second->kind == Expr::Kind::Const &&
                                   inner->summands[0].second->value == 1;
                    if (!neg_one) fail("'^' after a parenthesized expression requires (-1)");
                }
                lex_.take();
                Expr e;
                e.kind = Expr::Kind::Neg1Pow;
                e.exponent = parse_exponent_body(1, "(-1) exponent");
                return make_expr(std::move(e));
            }
            return inner;
        }
        fail("expected a factor");
    }

    // exponent after '^' was already consumed by caller for (-1); for q/a the
    // '^' is optional (bare q or a means exponent 1)
    QuadPoly parse_power_exponent(int max_degree, const char* what) {
        if (!at_punct("^")) return QuadPoly::constant(Rat(1));
        lex_.take();
        return parse_exponent_body(max_degree, what);
    }

    QuadPoly parse_exponent_body(int max_degree, const char* what) {
        QuadPoly p;
        if (lex_.peek().type == Token::Type::Int) {
            p = QuadPoly::constant(Rat(lex_.take().value));
        } else if (at_punct("(")) {
            lex_.take();
            p = parse_poly();
            expect_punct(")");
        } else {
            fail(std::string("expected an integer or parenthesized polynomial for ") + what);
        }
        if (p.degree() > max_degree)
            fail(std::string(what) + " exceeds degree " + std::to_string(max_degree));
        return p;
    }

    ExprPtr parse_sum() {
        lex_.take();  // sum
        expect_punct("(");
        if (lex_.peek().type != Token::Type::Ident) fail("expected a summation index name");
        std::string name = lex_.take().text;
        if (name == "a" || name == "q" || name == "sum" || name == "poch" || name == "infprod")
            fail("'" + name + "' cannot be used as a summation index");
        if (lex_.peek().type != Token::Type::Punct || lex_.peek().text != ">=")
            fail("expected '>=' after the summation index");
        lex_.take();
        long long lb = expect_int();
        expect_punct(",");

        int id = static_cast<int>(index_names_.size());
        index_names_.push_back(name);
        auto shadowed = scope_.find(name);
        std::optional<int> previous;
        if (shadowed != scope_.end()) previous = shadowed->second;
        scope_[name] = id;

        ExprPtr body = parse_expr();
        expect_punct(")");

        if (previous)
            scope_[name] = *previous;
        else
            scope_.erase(name);

        Expr e;
        e.kind = Expr::Kind::Sum;
        e.index = id;
        e.lower = lb;
        e.body = body;
        return make_expr(std::move(e));
    }

    ExprPtr parse_poch() {
        lex_.take();  // poch
        expect_punct("(");
        BaseMono base = parse_base();
        expect_punct(";");
        BaseMono ratio = parse_base();
        expect_punct(";");
        if (ratio.sign != +1 || ratio.a_pow != 0 || ratio.q_pow < 1)
            fail("pochhammer ratio must be a positive power of q");
        QuadPoly len = parse_poly();
        if (len.degree() > 1) fail("pochhammer length must be affine in the indices");
        expect_punct(")");
        Expr e;
        e.kind = Expr::Kind::Poch;
        e.bases = {base};
        e.ratio = ratio;
        e.length = len;
        return make_expr(std::move(e));
    }

    ExprPtr parse_infprod() {
        lex_.take();  // infprod
        expect_punct("(");
        std::vector<BaseMono> bases;
        bases.push_back(parse_base());
        while (at_punct(",")) {
            lex_.take();
            bases.push_back(parse_base());
        }
        if (!at_punct(";")) fail("expected ';' and the infinite-product modulus");
        lex_.take();
        BaseMono ratio = parse_base();
        if (ratio.sign != +1 || ratio.a_pow != 0 || ratio.q_pow < 1)
            fail("infinite-product modulus must be a positive power of q");
        expect_punct(")");
        Expr e;
        e.kind = Expr::Kind::InfProd;
        e.bases = std::move(bases);
        e.ratio = ratio;
        return make_expr(std::move(e));
    }

    BaseMono parse_base() {
        BaseMono b;
        if (at_punct("-")) {
            lex_.take();
            b.sign = -1;
        }
        if (lex_.peek().type == Token::Type::Int) {
            if (lex_.take().value != 1) fail("numeric base monomial must be 1");
            return b;
        }
        if (lex_.peek().type != Token::Type::Ident) fail("expected a base monomial");
        std::string v = lex_.take().text;
        auto small_power = [&]() -> int {
            if (!at_punct("^")) return 1;
            lex_.take();
            long long e = expect_int();
            if (e < 0 || e > 1000) fail("base exponent out of range");
            return static_cast<int>(e);
        };
        if (v == "a") {
            uses_a_ = true;
            b.a_pow = small_power();
            if (at_punct("*")) {
                lex_.take();
                if (lex_.peek().type != Token::Type::Ident || lex_.peek().text != "q")
                    fail("expected 'q' after 'a*' in a base monomial");
                lex_.take();
                b.q_pow = small_power();
            }
            return b;
        }
        if (v == "q") {
            b.q_pow = small_power();
            return b;
        }
        fail("base monomial may only involve a and q");
    }

    // -- exponent polynomials -----------------------------------------------

    QuadPoly parse_poly() {
        QuadPoly p;
        int sign = +1;
        if (at_punct("-")) {
            lex_.take();
            sign = -1;
        }
        p += parse_pterm().scaled(Rat(sign));
        while (at_punct("+") || at_punct("-")) {
            int s = at_punct("+") ? +1 : -1;
            lex_.take();
            p += parse_pterm().scaled(Rat(s));
        }
        return p;
    }

    QuadPoly parse_pterm() {
        QuadPoly p = parse_pfactor();
        while (at_punct("*") || at_punct("/")) {
            bool div = at_punct("/");
            lex_.take();
            if (div) {
                long long d = expect_int();
                if (d == 0) fail("division by zero in exponent");
                p = p.scaled(Rat(1, d));
            } else {
                p = p * parse_pfactor();
            }
        }
        return p;
    }

    QuadPoly parse_pfactor() {
        QuadPoly p;
        if (lex_.peek().type == Token::Type::Int) {
            p = QuadPoly::constant(Rat(lex_.take().value));
        } else if (lex_.peek().type == Token::Type::Ident) {
            std::string name = lex_.take().text;
            auto it = scope_.find(name);
            if (it == scope_.end())
                throw ParseError("unbound index '" + name + "'", lex_.peek().line,
                                 lex_.peek().column);
            p = QuadPoly::variable(it->second);
        } else if (at_punct("(")) {
            lex_.take();
            p = parse_poly();
            expect_punct(")");
        } else {
            fail("expected an exponent factor");
        }
        if (at_punct("^")) {
            lex_.take();
            long long e = expect_int();
            if (e < 0 || e > 2) fail("exponent power must be 0, 1, or 2");
            QuadPoly r = QuadPoly::constant(Rat(1));
            for (long long t = 0; t < e; ++t) r = r * p;
            p = r;
        }
        return p;
    }

    Lexer lex_;
    std::map<std::string, int> scope_;
    std::vector<std::string> index_names_;
    bool uses_a_ = false;
};

// ---------------------------------------------------------------------------
// Rendering (canonical form; parse(render(x)) == x structurally).

inline std::string render_poly(const QuadPoly& p, const std::vector<std::string>& names) {
    std::vector<std::pair<Rat, std::string>> terms;
    for (const auto& [k, c] : p.quad) {
        std::string v = k.first == k.second
                            ? names[k.first] + "^2"
                            : names[k.first] + "*" + names[k.second];
        terms.emplace_back(c, v);
    }
    for (const auto& [i, c] : p.lin) terms.emplace_back(c, names[i]);
    if (!p.cst.is_zero() || terms.empty()) terms.emplace_back(p.cst, "");
    std::ostringstream os;
    bool first = true;
    for (const auto& [c, v] : terms) {
        long long n = c.num < 0 ? -c.num : c.num;
        if (first) {
            if (c.num < 0) os << '-';
        } else {
            os << (c.num < 0 ? " - " : " + ");
        }
        first = false;
        if (v.empty()) {
            os << n;
            if (c.den != 1) os << '/' << c.den;
        } else {
            if (n != 1) os << n << '*';
            os << v;
            if (c.den != 1) os << '/' << c.den;
        }
    }
    return os.str();
}

inline std::string render_base(const BaseMono& b) {
    std::ostringstream os;
    if (b.sign < 0) os << '-';
    if (b.a_pow == 0 && b.q_pow == 0) {
        os << '1';
        return os.str();
    }
    if (b.a_pow > 0) {
        os << 'a';
        if (b.a_pow != 1) os << '^' << b.a_pow;
        if (b.q_pow > 0) os << '*';
    }
    if (b.q_pow > 0) {
        os << 'q';
        if (b.q_pow != 1) os << '^' << b.q_pow;
    }
    return os.str();
}

inline std::string render(const ExprPtr& node, const std::vector<std::string>& names);

inline std::string render_factor(const ExprPtr& node, const std::vector<std::string>& names) {
    if (node->kind == Expr::Kind::Add) return "(" + render(node, names) + ")";
    return render(node, names);
}

inline std::string render(const ExprPtr& node, const std::vector<std::string>& names) {
    std::ostringstream os;
    switch (node->kind) {
        case Expr::Kind::Const:
            os << node->value;
            break;
        case Expr::Kind::QPow: {
            if (node->exponent.degree() == 0 && node->exponent.cst == Rat(1)) return "q";
            os << "q^(" << render_poly(node->exponent, names) << ")";
            break;
        }
        case Expr::Kind::APow: {
            if (node->exponent.degree() == 0 && node->exponent.cst == Rat(1)) return "a";
            os << "a^(" << render_poly(node->exponent, names) << ")";
            break;
        }
        case Expr::Kind::Neg1Pow:
            os << "(-1)^(" << render_poly(node->exponent, names) << ")";
            break;
        case Expr::Kind::Poch:
            os << "poch(" << render_base(node->bases[0]) << ";" << render_base(node->ratio) << ";"
               << render_poly(node->length, names) << ")";
            break;
        case Expr::Kind::InfProd: {
            os << "infprod(";
            for (size_t i = 0; i < node->bases.size(); ++i) {
                if (i) os << ",";
                os << render_base(node->bases[i]);
            }
            os << ";" << render_base(node->ratio) << ")";
            break;
        }
        case Expr::Kind::Sum:
            os << "sum(" << names[node->index] << ">=" << node->lower << ", "
               << render(node->body, names) << ")";
            break;
        case Expr::Kind::Add: {
            bool first = true;
            for (const auto& [s, child] : node->summands) {
                if (first) {
                    if (s < 0) os << '-';
                } else {
                    os << (s < 0 ? " - " : " + ");
                }
                first = false;
                os << render(child, names);
            }
            break;
        }
        case Expr::Kind::Mul: {
            bool first = true;
            for (const auto& f : node->factors) {
                if (f->kind == Expr::Kind::Inv) {
                    if (first) os << '1';
                    os << '/' << render_factor(f->body, names);
                } else {
                    if (!first) os << '*';
                    os << render_factor(f, names);
                }
                first = false;
            }
            break;
        }
        case Expr::Kind::Inv:
            os << "1/" << render_factor(node->body, names);
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation.

inline bool contains_sum(const ExprPtr& node) {
    switch (node->kind) {
        case Expr::Kind::Sum:
            return true;
        case Expr::Kind::Add:
            for (const auto& [s, c] : node->summands)
                if (contains_sum(c)) return true;
            return false;
        case Expr::Kind::Mul:
            for (const auto& f : node->factors)
                if (contains_sum(f)) return true;
            return false;
        case Expr::Kind::Inv:
            return contains_sum(node->body);
        default:
            return false;
    }
}

class Evaluator {
public:
    Evaluator(size_t num_indices, Orders orders)
        : env_(num_indices, 0), orders_(orders) {}

    TruncatedSeries eval(const ExprPtr& node) { return eval_expr(node, orders_); }

private:
    using Factor = std::pair<ExprPtr, bool>;  // (node, inverted)

    TruncatedSeries eval_expr(const ExprPtr& node, Orders o) {
        if (node->kind == Expr::Kind::Add) {
            TruncatedSeries acc(o.q_order, o.a_order);
            for (const auto& [s, child] : node->summands) {
                if (s > 0)
                    acc += eval_expr(child, o);
                else
                    acc -= eval_expr(child, o);
            }
            return acc;
        }
        if (node->kind == Expr::Kind::Sum) return eval_sum(node, o);
        std::vector<Factor> factors;
        flatten(node, false, factors);
        return eval_term(factors, o);
    }

    static void flatten(const ExprPtr& node, bool inv, std::vector<Factor>& out) {
        if (node->kind == Expr::Kind::Mul) {
            for (const auto& f : node->factors) flatten(f, inv, out);
        } else if (node->kind == Expr::Kind::Inv) {
            flatten(node->body, !inv, out);
        } else {
            out.emplace_back(node, inv);
        }
    }

    long long integral_exponent(const Rat& r, const char* what) const {
        if (!r.is_integer())
            throw NonIntegerExponentError(std::string(what) + " evaluates to " +
                                          std::to_string(r.num) + "/" + std::to_string(r.den));
        return r.num;
    }

    TruncatedSeries eval_term(const std::vector<Factor>& factors, Orders o) {
        // denominator zero convention first: 1/(q;q)_{negative} kills the term
        for (const auto& [f, inv] : factors)
            if (inv && f->kind == Expr::Kind::Poch &&
                integral_exponent(f->length.eval(env_), "pochhammer length") < 0)
                return TruncatedSeries(o.q_order, o.a_order);

        Int coeff = 1;
        Rat a_exp, q_exp;
        std::vector<Factor> series_factors;
        for (const auto& [f, inv] : factors) {
            Rat dir = inv ? Rat(-1) : Rat(1);
            switch (f->kind) {
                case Expr::Kind::Const:
                    if (!inv) {
                        coeff *= static_cast<long>(f->value);
                        break;
                    }
                    series_factors.emplace_back(f, inv);
                    break;
                case Expr::Kind::QPow:
                    q_exp = q_exp + dir * f->exponent.eval(env_);
                    break;
                case Expr::Kind::APow:
                    a_exp = a_exp + dir * f->exponent.eval(env_);
                    break;
                case Expr::Kind::Neg1Pow: {
                    long long e = integral_exponent(f->exponent.eval(env_), "(-1) exponent");
                    if (e % 2 != 0) coeff = -coeff;
                    break;
                }
                default:
                    series_factors.emplace_back(f, inv);
            }
        }
        if (coeff == 0) return TruncatedSeries(o.q_order, o.a_order);
        long long aE = integral_exponent(a_exp, "a exponent");
        long long qE = integral_exponent(q_exp, "q exponent");

        Orders eo = elevated(o, aE, qE);
        TruncatedSeries s = TruncatedSeries::monomial(coeff, static_cast<int>(aE),
                                                      static_cast<int>(qE), eo.q_order, eo.a_order);
        for (const auto& [f, inv] : series_factors) s *= eval_factor(f, inv, eo);
        return truncate(s, o);
    }

    TruncatedSeries eval_factor(const ExprPtr& f, bool inv, Orders o) {
        switch (f->kind) {
            case Expr::Kind::Poch: {
                const BaseMono& b = f->bases[0];
                long long L = integral_exponent(f->length.eval(env_), "pochhammer length");
                auto spec = PochhammerSpec::finite(b.sign, b.a_pow, b.q_pow, f->ratio.q_pow, L);
                if (inv) return pochhammer_inverse(spec, o.q_order, o.a_order);
                if (L < 0)
                    throw ValidationError(
                        "numerator pochhammer with negative length " + std::to_string(L));
                return pochhammer(spec, o.q_order, o.a_order);
            }
            case Expr::Kind::InfProd: {
                TruncatedSeries acc = TruncatedSeries::one(o.q_order, o.a_order);
                for (const BaseMono& b : f->bases) {
                    auto spec = PochhammerSpec::infinite(b.sign, b.a_pow, b.q_pow, f->ratio.q_pow);
                    acc *= inv ? pochhammer_inverse(spec, o.q_order, o.a_order)
                               : pochhammer(spec, o.q_order, o.a_order);
                }
                return acc;
            }
            default: {
                TruncatedSeries s = eval_expr(f, o);
                return inv ? s.invert() : s;
            }
        }
    }

    // -- summation ------------------------------------------------------------

    struct SumNest {
        std::vector<std::pair<int, long long>> vars;  // (index id, lower bound)
        std::vector<Factor> term;                     // flattened summand factors
    };

    void collect_nest(const ExprPtr& node, SumNest& nest) {
        if (node->kind == Expr::Kind::Sum) {
            nest.vars.emplace_back(node->index, node->lower);
            collect_nest(node->body, nest);
            return;
        }
        if (node->kind == Expr::Kind::Mul) {
            for (const auto& f : node->factors) {
                if (contains_sum(f)) {
                    if (f->kind != Expr::Kind::Sum && f->kind != Expr::Kind::Mul)
                        throw NonTerminatingSumError(
                            "a nested sum may only appear as a direct product factor");
                    collect_nest(f, nest);
                } else {
                    flatten(f, false, nest.term);
                }
            }
            return;
        }
        if (contains_sum(node))
            throw NonTerminatingSumError(
                "a nested sum may only appear as a direct product factor");
        flatten(node, false, nest.term);
    }

    // Lower bound on the q-valuation of the summand, as a polynomial in the
    // summation indices (and any outer indices, substituted later).
    QuadPoly valuation_bound(const ExprPtr& node) const {
        switch (node->kind) {
            case Expr::Kind::QPow:
                return node->exponent;
            case Expr::Kind::Mul: {
                QuadPoly v;
                for (const auto& f : node->factors) v += valuation_bound(f);
                return v;
            }
            case Expr::Kind::Inv:
                // inverses of pochhammers start at q^0; the zero series (from the
                // negative-length convention) exceeds any bound
                return QuadPoly{};
            case Expr::Kind::Add: {
                for (const auto& [s, child] : node->summands) {
                    QuadPoly v = valuation_bound(child);
                    if (!v.all_coeffs_nonnegative())
                        throw NonTerminatingSumError(
                            "cannot bound the q-valuation of an additive summand factor");
                }
                return QuadPoly{};
            }
            case Expr::Kind::Sum:
                throw NonTerminatingSumError(
                    "a nested sum may only appear as a direct product factor");
            default:
                return QuadPoly{};  // Poch, InfProd, APow, Neg1Pow, Const
        }
    }

    // Verifies the bound polynomial is convex (PSD quadratic part) and grows
    // along every direction of the nonnegative orthant, which guarantees the
    // enumeration below terminates.
    static void check_terminating(const QuadPoly& V, const std::vector<int>& ids) {
        if (ids.size() > 2)
            throw NonTerminatingSumError("more than two nested summation indices");
        if (ids.size() == 1) {
            Rat A = V.quad_coeff(ids[0], ids[0]), L = V.lin_coeff(ids[0]);
            if (A < Rat(0) || (A.is_zero() && L <= Rat(0)))
                throw NonTerminatingSumError(
                    "q-exponent does not grow in the summation index");
            return;
        }
        Rat A = V.quad_coeff(ids[0], ids[0]);
        Rat C = V.quad_coeff(ids[1], ids[1]);
        Rat B = V.quad_coeff(ids[0], ids[1]);
        Rat L1 = V.lin_coeff(ids[0]), L2 = V.lin_coeff(ids[1]);
        Rat disc = Rat(4) * A * C - B * B;
        if (A < Rat(0) || C < Rat(0) || disc < Rat(0))
            throw NonTerminatingSumError(
                "quadratic part of the q-exponent is not positive semidefinite");
        if (A.is_zero() && L1 <= Rat(0))
            throw NonTerminatingSumError("q-exponent does not grow in the first index");
        if (C.is_zero() && L2 <= Rat(0))
            throw NonTerminatingSumError("q-exponent does not grow in the second index");
        if (A > Rat(0) && C > Rat(0) && disc.is_zero() && B <= Rat(0)) {
            // null direction u = (-B, 2A) lies in the orthant; require linear growth
            if (L1 * (-B) + L2 * (Rat(2) * A) <= Rat(0))
                throw NonTerminatingSumError(
                    "q-exponent is constant along a direction of the summation orthant");
        }
    }

    // Continuous minimum of A y^2 + B y + C over y >= lb (convex: A >= 0, and
    // A == 0 implies B > 0 by the termination check).
    static Rat min_over_ray(Rat A, Rat B, Rat C, long long lb) {
        Rat at_lb = A * Rat(lb) * Rat(lb) + B * Rat(lb) + C;
        if (A.is_zero() || -B <= Rat(2) * A * Rat(lb)) return at_lb;
        return C - B * B / (Rat(4) * A);
    }

    TruncatedSeries eval_sum(const ExprPtr& node, Orders o) {
        SumNest nest;
        collect_nest(node, nest);

        QuadPoly V;
        for (const auto& [f, inv] : nest.term)
            if (!inv) V += valuation_bound(f);
        std::set<int> free;
        std::vector<int> ids;
        for (const auto& [id, lb] : nest.vars) {
            free.insert(id);
            ids.push_back(id);
        }
        V = V.partial_eval(env_, free);
        check_terminating(V, ids);

        TruncatedSeries acc(o.q_order, o.a_order);
        Rat limit(o.q_order);

        // mval(level assignment) = continuous min of V over the remaining free
        // indices; it is convex in the loop variable, so the loop may stop as
        // soon as the bound exceeds the truncation order and has stopped
        // decreasing.
        auto mval_at = [&](size_t level) -> Rat {
            // indices 0..level fixed in env_, the rest (at most one) free
            if (level + 1 == ids.size()) {
                std::vector<long long> dummy;
                return V.partial_eval(env_, {}).cst;
            }
            int y = ids[level + 1];
            QuadPoly g = V.partial_eval(env_, {y});
            return min_over_ray(g.quad_coeff(y, y), g.lin_coeff(y), g.cst,
                                nest.vars[level + 1].second);
        };

        std::function<void(size_t)> rec = [&](size_t level) {
            auto [id, lb] = nest.vars[level];
            std::optional<Rat> prev;
            for (long long v = lb;; ++v) {
                env_[id] = v;
                Rat m = mval_at(level);
                if (m > limit) {
                    if (prev && m >= *prev) break;
                } else if (level + 1 == nest.vars.size()) {
                    acc += eval_term(nest.term, o);
                } else {
                    rec(level + 1);
                }
                prev = m;
            }
            env_[id] = 0;
        };
        rec(0);
        return acc;
    }

    std::vector<long long> env_;
    Orders orders_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public API.

/// Parses a bare expression (no name, no '=').
inline ParsedExpr parse_expression(const std::string& text) {
    detail::Parser p(text);
    ParsedExpr r;
    r.root = p.parse_expression_all();
    r.index_names = p.index_names();
    r.uses_a = p.uses_a();
    return r;
}

/// Parses "name: lhs = rhs".
inline Identity parse_identity(const std::string& text) {
    size_t colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'name:' before the identity", 1, 1);
    std::string name = text.substr(0, colon);
    // trim
    size_t b = name.find_first_not_of(" \t\r\n");
    size_t e = name.find_last_not_of(" \t\r\n");
    name = b == std::string::npos ? "" : name.substr(b, e - b + 1);
    if (name.empty()) throw ParseError("empty identity name", 1, 1);
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            throw ParseError("invalid character in identity name", 1, 1);

    int line = 1;
    for (size_t i = 0; i < colon; ++i)
        if (text[i] == '\n') ++line;
    detail::Parser p(text.substr(colon + 1), line);
    auto [lhs, rhs] = p.parse_equation();
    Identity id;
    id.name = name;
    id.lhs = lhs;
    id.rhs = rhs;
    id.index_names = p.index_names();
    id.uses_a = p.uses_a();
    return id;
}

inline TruncatedSeries evaluate(const ExprPtr& node, size_t num_indices, Orders orders) {
    return detail::Evaluator(num_indices, orders).eval(node);
}

inline TruncatedSeries evaluate(const ParsedExpr& e, Orders orders) {
    if (!e.uses_a) orders.a_order = std::nullopt;
    return evaluate(e.root, e.index_names.size(), orders);
}

inline std::string render(const ParsedExpr& e) { return detail::render(e.root, e.index_names); }

inline std::string render(const Identity& id) {
    return id.name + ": " + detail::render(id.lhs, id.index_names) + " = " +
           detail::render(id.rhs, id.index_names);
}

/// Evaluates both sides and compares coefficientwise.
inline VerificationReport verify(const Identity& id, Orders orders) {
    Stopwatch sw;
    VerificationReport rep;
    rep.target = id.name;
    std::optional<int> ao = id.uses_a ? orders.a_order : std::nullopt;
    rep.checked_q_order = orders.q_order;
    rep.checked_a_order = ao;
    Orders o{orders.q_order, ao};
    auto lhs = evaluate(id.lhs, id.index_names.size(), o);
    auto rhs = evaluate(id.rhs, id.index_names.size(), o);
    if (auto div = TruncatedSeries::first_divergence(lhs, rhs))
        rep.record_divergence("lhs vs rhs", *div);
    rep.elapsed_ms = sw.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Catalog files: '#' comment lines, optional "expect: fail" directive, and
// one identity (possibly spanning several lines).

struct CatalogEntry {
    std::string name;
    std::string path;
    bool expect_fail = false;
    Identity identity;
};

inline CatalogEntry load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open catalog file " + path);
    CatalogEntry entry;
    entry.path = path;
    std::ostringstream body;
    std::string line;
    while (std::getline(in, line)) {
        if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::string trimmed = line;
        size_t b = trimmed.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            body << '\n';
            continue;
        }
        size_t e = trimmed.find_last_not_of(" \t\r");
        trimmed = trimmed.substr(b, e - b + 1);
        if (trimmed.rfind("expect:", 0) == 0) {
            std::string v = trimmed.substr(7);
            size_t vb = v.find_first_not_of(" \t");
            v = vb == std::string::npos ? "" : v.substr(vb);
            if (v == "fail")
                entry.expect_fail = true;
            else if (v != "pass")
                throw ValidationError("expect directive must be 'pass' or 'fail' in " + path);
            body << '\n';  // keep line numbers aligned
            continue;
        }
        body << line << '\n';
    }
    entry.identity = parse_identity(body.str());
    entry.name = entry.identity.name;
    return entry;
}

/// Loads every *.id file in a directory, sorted by entry name.
inline std::vector<CatalogEntry> load_catalog(const std::string& dir) {
    std::vector<CatalogEntry> entries;
    for (const auto& de : std::filesystem::directory_iterator(dir))
        if (de.is_regular_file() && de.path().extension() == ".id")
            entries.push_back(load_catalog_file(de.path().string()));
    std::sort(entries.begin(), entries.end(),
              [](const CatalogEntry& x, const CatalogEntry& y) { return x.name < y.name; });
    return entries;
}

}  // namespace qrrt
