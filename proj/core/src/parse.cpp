#include "cotlift/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

namespace cotlift {

namespace {

struct Token {
    enum class Kind { Number, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind;
    double number = 0.0;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    Lexer(std::string_view src, int line0, int col0) : src_(src), line_(line0), col_(col0) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = src_[pos_];
        switch (c) {
            case '+':
                advance();
                t.kind = Token::Kind::Plus;
                return t;
            case '-':
                advance();
                t.kind = Token::Kind::Minus;
                return t;
            case '*':
                advance();
                t.kind = Token::Kind::Star;
                return t;
            case '/':
                advance();
                t.kind = Token::Kind::Slash;
                return t;
            case '^':
                advance();
                t.kind = Token::Kind::Caret;
                return t;
            case '(':
                advance();
                t.kind = Token::Kind::LParen;
                return t;
            case ')':
                advance();
                t.kind = Token::Kind::RParen;
                return t;
            default:
                break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
                advance();
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t mark = pos_;
                advance();
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        advance();
                } else {
                    // 'e' belongs to a following name, not an exponent
                    rewind_to(mark);
                }
            }
            std::string text(src_.substr(start, pos_ - start));
            char* end = nullptr;
            t.number = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size())
                throw ParseError(t.line, t.col, "bad numeric literal '" + text + "'");
            t.kind = Token::Kind::Number;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            t.kind = Token::Kind::Name;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void rewind_to(std::size_t mark) {
        // only used within one line (exponent backtrack)
        col_ -= static_cast<int>(pos_ - mark);
        pos_ = mark;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_;
    int col_;
};

class Parser {
public:
    Parser(std::string_view src, int line0, int col0) : lexer_(src, line0, col0) { shift(); }

    Expr parse() {
        Expr e = parse_expr();
        if (cur_.kind != Token::Kind::End)
            throw ParseError(cur_.line, cur_.col, "unexpected trailing input");
        return e;
    }

private:
    void shift() { cur_ = lexer_.next(); }

    Expr parse_expr() {
        Expr e = parse_term();
        while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
            bool plus = cur_.kind == Token::Kind::Plus;
            shift();
            Expr rhs = parse_term();
            e = plus ? e + rhs : e - rhs;
        }
        return e;
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (cur_.kind == Token::Kind::Star || cur_.kind == Token::Kind::Slash) {
            bool mul = cur_.kind == Token::Kind::Star;
            shift();
            Expr rhs = parse_factor();
            e = mul ? e * rhs : e * pow(rhs, -1);
        }
        return e;
    }

    Expr parse_factor() {
        if (cur_.kind == Token::Kind::Minus) {
            shift();
            return -parse_factor();
        }
        if (cur_.kind == Token::Kind::Plus) {
            shift();
            return parse_factor();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (cur_.kind != Token::Kind::Caret) return base;
        shift();
        bool negative = false;
        if (cur_.kind == Token::Kind::Minus) {
            negative = true;
            shift();
        }
        if (cur_.kind != Token::Kind::Number)
            throw ParseError(cur_.line, cur_.col, "expected integer exponent after '^'");
        double v = cur_.number;
        int k = static_cast<int>(v);
        if (static_cast<double>(k) != v)
            throw ParseError(cur_.line, cur_.col, "exponent must be an integer");
        shift();
        return pow(base, negative ? -k : k);
    }

    Expr parse_atom() {
        switch (cur_.kind) {
            case Token::Kind::Number: {
                Expr e = Expr::constant(cur_.number);
                shift();
                return e;
            }
            case Token::Kind::LParen: {
                shift();
                Expr e = parse_expr();
                expect(Token::Kind::RParen, "expected ')'");
                return e;
            }
            case Token::Kind::Name: {
                std::string name = cur_.text;
                Token name_tok = cur_;
                shift();
                if (cur_.kind == Token::Kind::LParen) {
                    shift();
                    Expr arg = parse_expr();
                    expect(Token::Kind::RParen, "expected ')'");
                    if (name == "sin") return sin(arg);
                    if (name == "cos") return cos(arg);
                    if (name == "exp") return exp(arg);
                    if (name == "sqrt") return sqrt(arg);
                    throw ParseError(name_tok.line, name_tok.col,
                                     "unknown function '" + name + "'");
                }
                return Expr::variable(name);
            }
            default:
                throw ParseError(cur_.line, cur_.col, "expected a number, name or '('");
        }
    }

    void expect(Token::Kind kind, const char* message) {
        if (cur_.kind != kind) throw ParseError(cur_.line, cur_.col, message);
        shift();
    }

    Lexer lexer_;
    Token cur_;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text, 1, 1).parse(); }

Expr parse_expression_at(std::string_view text, int line0, int col0) {
    return Parser(text, line0, col0).parse();
}

}  // namespace cotlift
