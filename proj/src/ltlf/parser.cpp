#include <cctype>
#include <string>

#include "gpimdp/errors.h"
#include "gpimdp/ltlf.h"

namespace gpimdp::ltlf {

namespace {

enum class Tok { Ident, Not, And, Or, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Parser {
   public:
    Parser(std::string_view text, PropositionSet const& ap) : src(text), props(ap) { advance(); }

    Formula parseAll() {
        Formula f = parseOr();
        if (cur.kind != Tok::End) fail("unexpected '" + cur.text + "'");
        return f;
    }

   private:
    [[noreturn]] void fail(std::string const& msg) const { throw ParseError(msg, cur.pos); }

    void advance() {
        while (at < src.size() && std::isspace(static_cast<unsigned char>(src[at]))) ++at;
        std::size_t const start = at;
        if (at >= src.size()) {
            cur = {Tok::End, "end of input", start};
            return;
        }
        char const c = src[at];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (at < src.size() && (std::isalnum(static_cast<unsigned char>(src[at])) || src[at] == '_')) ++at;
            cur = {Tok::Ident, std::string(src.substr(start, at - start)), start};
            return;
        }
        ++at;
        switch (c) {
            case '!':
                cur = {Tok::Not, "!", start};
                return;
            case '&':
                cur = {Tok::And, "&", start};
                return;
            case '|':
                cur = {Tok::Or, "|", start};
                return;
            case '(':
                cur = {Tok::LParen, "(", start};
                return;
            case ')':
                cur = {Tok::RParen, ")", start};
                return;
            default:
                cur = {Tok::End, std::string(1, c), start};
                fail(std::string("invalid character '") + c + "'");
        }
    }

    bool isKeyword(char const* word) const { return cur.kind == Tok::Ident && cur.text == word; }

    Formula parseOr() {
        Formula f = parseAnd();
        while (cur.kind == Tok::Or) {
            advance();
            f = Formula::disjunction(f, parseAnd());
        }
        return f;
    }

    Formula parseAnd() {
        Formula f = parseBinaryTemporal();
        while (cur.kind == Tok::And) {
            advance();
            f = Formula::conjunction(f, parseBinaryTemporal());
        }
        return f;
    }

    Formula parseBinaryTemporal() {
        Formula lhs = parseUnary();
        if (isKeyword("U")) {
            advance();
            return Formula::until(lhs, parseBinaryTemporal());
        }
        if (isKeyword("R")) {
            advance();
            return Formula::release(lhs, parseBinaryTemporal());
        }
        return lhs;
    }

    Formula parseUnary() {
        if (cur.kind == Tok::Not) {
            advance();
            return Formula::negation(parseUnary());
        }
        if (cur.kind == Tok::Ident) {
            if (cur.text == "X") return advance(), Formula::next(parseUnary());
            if (cur.text == "WX") return advance(), Formula::weakNext(parseUnary());
            if (cur.text == "F") return advance(), Formula::eventually(parseUnary());
            if (cur.text == "G") return advance(), Formula::globally(parseUnary());
        }
        return parsePrimary();
    }

    Formula parsePrimary() {
        switch (cur.kind) {
            case Tok::LParen: {
                advance();
                Formula f = parseOr();
                if (cur.kind != Tok::RParen) fail("expected ')'");
                advance();
                return f;
            }
            case Tok::Ident: {
                if (cur.text == "true") return advance(), Formula::makeTrue();
                if (cur.text == "false") return advance(), Formula::makeFalse();
                if (cur.text == "U" || cur.text == "R") fail("operator '" + cur.text + "' is missing its left operand");
                int const idx = props.find(cur.text);
                if (idx < 0) fail("unknown proposition '" + cur.text + "'");
                advance();
                return Formula::atom(idx);
            }
            case Tok::End:
                fail("unexpected end of input");
            default:
                fail("unexpected '" + cur.text + "'");
        }
    }

    std::string_view src;
    PropositionSet const& props;
    std::size_t at = 0;
    Token cur{Tok::End, "", 0};
};

}  // namespace

Formula parse(std::string_view text, PropositionSet const& ap) { return Parser(text, ap).parseAll(); }

}  // namespace gpimdp::ltlf
