#include "netinfer/datalog/parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace netinfer::dl {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

enum class Tok { Ident, Var, String, Int, LParen, RParen, Comma, Dot, If, End };

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Var: return "variable";
        case Tok::String: return "string";
        case Tok::Int: return "integer";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::If: return "':-'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t number = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size()) return t;

        char c = src_[pos_];
        if (c == '(') return single(t, Tok::LParen);
        if (c == ')') return single(t, Tok::RParen);
        if (c == ',') return single(t, Tok::Comma);
        if (c == '.') return single(t, Tok::Dot);
        if (c == ':') {
            if (peek(1) != '-') fail(t, "expected ':-'");
            advance();
            advance();
            t.kind = Tok::If;
            return t;
        }
        if (c == '?') {
            advance();
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
            if (pos_ == start) fail(t, "empty variable name");
            t.kind = Tok::Var;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (c == '"') return string_literal(t);
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return integer(t);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        fail(t, std::string("unexpected character '") + c + "'");
    }

private:
    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw ParseError(at.line, at.column, msg);
    }

    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token single(Token t, Tok kind) {
        advance();
        t.kind = kind;
        return t;
    }

    Token string_literal(Token t) {
        advance();
        std::string value;
        while (true) {
            if (pos_ >= src_.size()) fail(t, "unterminated string");
            char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                char e = peek(1);
                switch (e) {
                    case '"': value.push_back('"'); break;
                    case '\\': value.push_back('\\'); break;
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    default: {
                        Token at;
                        at.line = line_;
                        at.column = col_;
                        fail(at, "invalid escape sequence");
                    }
                }
                advance();
                advance();
                continue;
            }
            value.push_back(c);
            advance();
        }
        t.kind = Tok::String;
        t.text = std::move(value);
        return t;
    }

    Token integer(Token t) {
        std::size_t start = pos_;
        if (src_[pos_] == '-') advance();
        std::size_t digits = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        if (pos_ == digits) fail(t, "expected digits after '-'");
        if (pos_ < src_.size() && is_name_char(src_[pos_])) fail(t, "malformed integer");
        auto text = src_.substr(start, pos_ - start);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.number);
        if (ec != std::errc{} || ptr != text.data() + text.size()) fail(t, "integer out of range");
        t.kind = Tok::Int;
        t.text = std::string(text);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

struct Clause {
    Rule rule;  // body empty for facts
    Token start;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { shift(); }

    bool at_end() const { return cur_.kind == Tok::End; }

    Clause clause() {
        Clause c;
        c.start = cur_;
        bool negated = false;
        Token not_tok;
        if (is_not_keyword()) {
            not_tok = cur_;
            negated = true;
            shift();
        }
        c.rule.head = literal();
        if (cur_.kind == Tok::If) {
            if (negated) fail(not_tok, "negative literal in rule head");
            shift();
            c.rule.body.push_back(body_literal());
            while (cur_.kind == Tok::Comma) {
                shift();
                c.rule.body.push_back(body_literal());
            }
        } else if (negated) {
            fail(not_tok, "negative fact");
        }
        expect(Tok::Dot);
        return c;
    }

    Literal lone_literal() {
        Literal lit = literal();
        if (cur_.kind == Tok::Dot) shift();
        if (!at_end()) fail(cur_, std::string("expected end of input, found ") + describe(cur_.kind));
        return lit;
    }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw ParseError(at.line, at.column, msg);
    }

private:
    void shift() { cur_ = lexer_.next(); }

    bool is_not_keyword() {
        if (cur_.kind != Tok::Ident || cur_.text != "not") return false;
        return true;
    }

    void expect(Tok kind) {
        if (cur_.kind != kind) {
            fail(cur_, std::string("expected ") + describe(kind) + ", found " + describe(cur_.kind));
        }
        shift();
    }

    Literal body_literal() {
        if (is_not_keyword()) {
            shift();
            Literal lit = literal();
            lit.negated = true;
            return lit;
        }
        return literal();
    }

    Literal literal() {
        if (cur_.kind != Tok::Ident) {
            fail(cur_, std::string("expected predicate, found ") + describe(cur_.kind));
        }
        if (!std::islower(static_cast<unsigned char>(cur_.text.front()))) {
            fail(cur_, "predicate '" + cur_.text + "' must start with a lowercase letter");
        }
        if (cur_.text == "not") fail(cur_, "'not' is reserved");
        Literal lit;
        lit.predicate = cur_.text;
        shift();
        if (cur_.kind != Tok::LParen) return lit;
        shift();
        lit.args.push_back(term());
        while (cur_.kind == Tok::Comma) {
            shift();
            lit.args.push_back(term());
        }
        expect(Tok::RParen);
        return lit;
    }

    Term term() {
        Token t = cur_;
        switch (t.kind) {
            case Tok::Var: shift(); return Term::var(t.text);
            case Tok::String: shift(); return Term::str(t.text);
            case Tok::Int: shift(); return Term::integer(t.number);
            default: fail(t, std::string("expected term, found ") + describe(t.kind));
        }
    }

    Lexer lexer_;
    Token cur_;
};

}  // namespace

Program parse_program(std::string_view source) {
    Parser parser(source);
    Program program;
    std::set<Rule> seen;
    while (!parser.at_end()) {
        Clause c = parser.clause();
        if (c.rule.body.empty()) {
            if (!c.rule.head.is_ground()) Parser::fail(c.start, "non-ground fact");
            program.facts.push_back(std::move(c.rule.head));
        } else if (seen.insert(c.rule).second) {
            program.rules.push_back(std::move(c.rule));
        }
    }
    return program;
}

std::vector<Literal> parse_fact_file(std::string_view source) {
    Parser parser(source);
    std::vector<Literal> facts;
    while (!parser.at_end()) {
        Clause c = parser.clause();
        if (!c.rule.body.empty()) Parser::fail(c.start, "rules are not allowed in a fact file");
        if (!c.rule.head.is_ground()) Parser::fail(c.start, "non-ground fact");
        facts.push_back(std::move(c.rule.head));
    }
    return facts;
}

Literal parse_literal(std::string_view source) {
    Parser parser(source);
    return parser.lone_literal();
}

}  // namespace netinfer::dl
