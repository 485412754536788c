/*
    Copyright 2026 The exactcond Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <cctype>
#include <charconv>
#include <cmath>

#include "exactcond/lang.hpp"

namespace exactcond::lang {

namespace {

enum class Tok {
    Ident,
    Number,
    Let,
    In,
    Normal,
    Observe,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    CondEq,
    Plus,
    Minus,
    Star,
    Semi,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    SourceLoc loc;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End:
            return "end of input";
        case Tok::Ident:
            return "identifier '" + t.text + "'";
        case Tok::Number:
            return "number " + t.text;
        default:
            return "'" + t.text + "'";
    }
}

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            const SourceLoc loc{line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", 0.0, loc});
                return out;
            }
            out.push_back(next(loc));
        }
    }

  private:
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); i++) {
            const auto c = static_cast<unsigned char>(src_[pos_++]);
            if (c == '\n') {
                line_++;
                col_ = 1;
            } else if ((c & 0xC0) != 0x80) {
                col_++;
            }
        }
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == '#') {
                while (pos_ < src_.size() && peek() != '\n') {
                    advance();
                }
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                return;
            }
        }
    }

    Token next(SourceLoc loc) {
        const char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '\'') {
                advance();
            }
            std::string word(src_.substr(start, pos_ - start));
            Tok kind = Tok::Ident;
            if (word == "let") {
                kind = Tok::Let;
            } else if (word == "in") {
                kind = Tok::In;
            } else if (word == "normal") {
                kind = Tok::Normal;
            } else if (word == "observe") {
                kind = Tok::Observe;
            }
            return {kind, std::move(word), 0.0, loc};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return number(loc);
        }
        struct Fixed {
            std::string_view text;
            Tok kind;
        };
        static constexpr Fixed fixed[] = {
            {"=:=", Tok::CondEq}, {"\xE2\x89\x90", Tok::CondEq}, {"\xC2\xB7", Tok::Star}, {"(", Tok::LParen},
            {")", Tok::RParen},   {"[", Tok::LBracket},         {"]", Tok::RBracket},   {",", Tok::Comma},
            {"=", Tok::Equals},   {"+", Tok::Plus},             {"-", Tok::Minus},      {"*", Tok::Star},
            {";", Tok::Semi},
        };
        for (const Fixed& f : fixed) {
            if (starts_with(f.text)) {
                advance(f.text.size());
                return {f.kind, std::string(f.text), 0.0, loc};
            }
        }
        throw SyntaxError(loc, "unexpected character '" + std::string(1, c) + "'");
    }

    Token number(SourceLoc loc) {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
            }
        };
        digits();
        if (peek() == '.') {
            advance();
            digits();
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (!std::isdigit(static_cast<unsigned char>(peek(1 + sign)))) {
                throw SyntaxError(loc, "malformed exponent in number");
            }
            advance(1 + sign);
            digits();
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || !std::isfinite(value)) {
            throw SyntaxError(loc, "number out of range: " + std::string(text));
        }
        return {Tok::Number, std::string(text), value, loc};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    TermPtr program() {
        TermPtr e = expr();
        if (cur().kind != Tok::End) {
            fail("expected end of input");
        }
        return e;
    }

  private:
    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }

    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& expected) const {
        throw SyntaxError(cur().loc, expected + ", found " + describe(cur()));
    }

    Token expect(Tok k, const char* what) {
        if (!at(k)) {
            fail(std::string("expected ") + what);
        }
        return take();
    }

    TermPtr expr() {
        if (at(Tok::Let)) {
            return let_expr();
        }
        TermPtr c = cond_expr();
        if (at(Tok::Semi)) {
            const SourceLoc loc = take().loc;
            TermPtr rest = expr();
            return seq(std::move(c), std::move(rest), loc);
        }
        return c;
    }

    TermPtr let_expr() {
        const SourceLoc loc = take().loc;
        if (at(Tok::LParen)) {
            take();
            std::string x = expect(Tok::Ident, "a variable name").text;
            expect(Tok::Comma, "','");
            std::string y = expect(Tok::Ident, "a variable name").text;
            expect(Tok::RParen, "')'");
            expect(Tok::Equals, "'='");
            TermPtr bound = expr();
            expect(Tok::In, "'in'");
            TermPtr body = expr();
            return let_pair(std::move(x), std::move(y), std::move(bound), std::move(body), loc);
        }
        std::string x = expect(Tok::Ident, "a variable name or '('").text;
        expect(Tok::Equals, "'='");
        TermPtr bound = expr();
        expect(Tok::In, "'in'");
        TermPtr body = expr();
        return let(std::move(x), std::move(bound), std::move(body), loc);
    }

    TermPtr cond_expr() {
        TermPtr lhs = sum();
        if (at(Tok::CondEq)) {
            const SourceLoc loc = take().loc;
            TermPtr rhs = sum();
            return cond(std::move(lhs), std::move(rhs), loc);
        }
        return lhs;
    }

    TermPtr sum() {
        TermPtr lhs = prod();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const Token op = take();
            TermPtr rhs = prod();
            lhs = op.kind == Tok::Plus ? add(std::move(lhs), std::move(rhs), op.loc)
                                       : sub(std::move(lhs), std::move(rhs), op.loc);
        }
        return lhs;
    }

    TermPtr prod() {
        const SourceLoc loc = cur().loc;
        if (at(Tok::Minus)) {
            take();
            if (at(Tok::Number)) {
                return scalar(-take().number, loc);
            }
            TermPtr body = prod();
            return scale(-1.0, std::move(body), loc);
        }
        if (at(Tok::Number)) {
            return scalar(take().number, loc);
        }
        if (at(Tok::LBracket)) {
            Matrix m = matrix();
            expect(Tok::Star, "'*' after a matrix");
            TermPtr body = prod();
            return mat_vec(std::move(m), std::move(body), loc);
        }
        return atom();
    }

    TermPtr scalar(double value, SourceLoc loc) {
        if (at(Tok::Star)) {
            take();
            TermPtr body = prod();
            return scale(value, std::move(body), loc);
        }
        return constant(value, loc);
    }

    double signed_number() {
        if (at(Tok::Minus)) {
            take();
            return -expect(Tok::Number, "a number").number;
        }
        return expect(Tok::Number, "a number").number;
    }

    Matrix matrix() {
        const SourceLoc loc = expect(Tok::LBracket, "'['").loc;
        std::vector<std::vector<double>> rows;
        do {
            expect(Tok::LBracket, "'[' starting a matrix row");
            std::vector<double> row{signed_number()};
            while (at(Tok::Comma)) {
                take();
                row.push_back(signed_number());
            }
            expect(Tok::RBracket, "']'");
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw SyntaxError(loc, "matrix rows have different lengths");
            }
            rows.push_back(std::move(row));
        } while (at(Tok::Comma) && (take(), true));
        expect(Tok::RBracket, "']'");
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); i++) {
            for (std::size_t j = 0; j < rows[i].size(); j++) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    TermPtr atom() {
        const SourceLoc loc = cur().loc;
        switch (cur().kind) {
            case Tok::Ident:
                return var(take().text, loc);
            case Tok::LParen: {
                take();
                if (at(Tok::RParen)) {
                    take();
                    return unit(loc);
                }
                std::vector<TermPtr> items{expr()};
                while (at(Tok::Comma)) {
                    take();
                    items.push_back(expr());
                }
                expect(Tok::RParen, "')' or ','");
                if (items.size() == 1) {
                    return items.front();
                }
                TermPtr t = items.back();
                for (std::size_t i = items.size() - 1; i-- > 0;) {
                    t = pair(items[i], t, loc);
                }
                return t;
            }
            case Tok::Normal: {
                take();
                expect(Tok::LParen, "'(' after normal");
                if (at(Tok::RParen)) {
                    take();
                    return normal(loc);
                }
                TermPtr mean = expr();
                expect(Tok::Comma, "',' between mean and covariance");
                TermPtr out;
                if (at(Tok::LBracket)) {
                    out = normal_with(std::move(mean), matrix(), loc);
                } else {
                    out = normal_with(std::move(mean), signed_number(), loc);
                }
                expect(Tok::RParen, "')'");
                return out;
            }
            case Tok::Observe: {
                take();
                expect(Tok::LParen, "'(' after observe");
                TermPtr dist = expr();
                expect(Tok::Comma, "','");
                TermPtr target = expr();
                expect(Tok::RParen, "')'");
                return observe(std::move(dist), std::move(target), loc);
            }
            default:
                fail("expected an expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

TermPtr parse(std::string_view source) { return Parser(Lexer(source).run()).program(); }

// ---------------------------------------------------------------------------
// Contexts: `x:R, y:R*R, u:unit, v:R^3`

namespace {

class TypeParser {
  public:
    explicit TypeParser(std::string_view s) : s_(s) {}

    TypePtr type() {
        TypePtr lhs = atom();
        space();
        if (pos_ < s_.size() && s_[pos_] == '*') {
            pos_++;
            return Type::pair(std::move(lhs), type());
        }
        return lhs;
    }

    bool done() {
        space();
        return pos_ == s_.size();
    }

  private:
    void space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            pos_++;
        }
    }

    TypePtr atom() {
        space();
        if (s_.substr(pos_, 1) == "(") {
            pos_++;
            TypePtr t = type();
            space();
            if (s_.substr(pos_, 1) != ")") {
                throw SyntaxError({}, "context: expected ')' in type");
            }
            pos_++;
            return t;
        }
        if (s_.substr(pos_, 4) == "unit") {
            pos_ += 4;
            return Type::unit();
        }
        if (s_.substr(pos_, 1) == "I") {
            pos_++;
            return Type::unit();
        }
        if (s_.substr(pos_, 1) == "R") {
            pos_++;
            if (s_.substr(pos_, 1) == "^") {
                pos_++;
                std::size_t n = 0;
                const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), n);
                if (res.ec != std::errc()) {
                    throw SyntaxError({}, "context: expected a dimension after R^");
                }
                pos_ = static_cast<std::size_t>(res.ptr - s_.data());
                return Type::vector(n);
            }
            return Type::real();
        }
        throw SyntaxError({}, "context: expected a type (R, R^n, unit, or a product)");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Context parse_context(std::string_view text) {
    Context ctx;
    text = trim(text);
    if (text.empty()) {
        return ctx;
    }
    std::size_t depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); i++) {
        const char c = i < text.size() ? text[i] : ',';
        if (c == '(') {
            depth++;
        } else if (c == ')') {
            depth = depth ? depth - 1 : 0;
        } else if (c == ',' && depth == 0) {
            const std::string_view item = trim(text.substr(start, i - start));
            const std::size_t colon = item.find(':');
            if (colon == std::string_view::npos) {
                throw SyntaxError({}, "context: expected 'name:type', got '" + std::string(item) + "'");
            }
            const std::string_view name = trim(item.substr(0, colon));
            if (name.empty()) {
                throw SyntaxError({}, "context: missing variable name");
            }
            TypeParser tp(item.substr(colon + 1));
            TypePtr t = tp.type();
            if (!tp.done()) {
                throw SyntaxError({}, "context: trailing characters in type of " + std::string(name));
            }
            ctx.push_back({std::string(name), std::move(t)});
            start = i + 1;
        }
    }
    return ctx;
}

}  // namespace exactcond::lang
