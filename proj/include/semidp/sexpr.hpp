#pragma once

// Minimal s-expression reader shared by the expression and k-expression
// file formats. Atoms are maximal runs of characters other than whitespace,
// parentheses and ';' (which starts a comment running to end of line).

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace semidp {

struct SExpr {
    bool is_atom = false;
    std::string atom;
    std::vector<SExpr> items;
    std::size_t line = 1;
    std::size_t column = 1;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, column); }

    const std::string& head() const {
        if (is_atom || items.empty() || !items.front().is_atom) fail("expected a list starting with a keyword");
        return items.front().atom;
    }
};

namespace detail {

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    bool at_end() {
        skip();
        return pos_ >= text_.size();
    }

    SExpr read() {
        skip();
        SExpr out;
        out.line = line_;
        out.column = col_;
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        const char c = text_[pos_];
        if (c == ')') throw ParseError("unexpected ')'", line_, col_);
        if (c == '(') {
            advance();
            // Iterative over siblings; nesting depth recurses.
            while (true) {
                skip();
                if (pos_ >= text_.size()) throw ParseError("unclosed '('", out.line, out.column);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                out.items.push_back(read());
            }
            return out;
        }
        out.is_atom = true;
        while (pos_ < text_.size() && !delimiter(text_[pos_])) {
            out.atom.push_back(text_[pos_]);
            advance();
        }
        return out;
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

private:
    static bool delimiter(char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

}  // namespace detail

/// Parses exactly one s-expression; trailing non-comment text is an error.
inline SExpr parse_sexpr(std::string_view text) {
    detail::SExprReader reader(text);
    SExpr out = reader.read();
    if (!reader.at_end()) throw ParseError("trailing input after expression", reader.line(), reader.column());
    return out;
}

}  // namespace semidp
