#include "cbi/lexer.hpp"

#include <cctype>
#include <cstdlib>

#include "cbi/errors.hpp"

namespace cbi {

namespace {

const char* kPuncts[] = {
    "<<=", ">>=", "...", "&&", "||", "==", "!=", "<=", ">=", "<<", ">>", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "->", "{",  "}",  "(",  ")",
    "[",  "]",  ";",  ",",  "=",  "+",  "-",  "*",  "/",  "%",  "!",  "~",  "&",
    "|",  "^",  "<",  ">",  "?",  ":",  ".",
};

long long char_escape_value(std::string_view body, int line) {
    if (body.empty()) throw SyntaxError(line, "empty character literal");
    if (body[0] != '\\') return static_cast<unsigned char>(body[0]);
    if (body.size() < 2) throw SyntaxError(line, "bad escape in character literal");
    switch (body[1]) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return '\0';
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        default: throw SyntaxError(line, std::string("unsupported escape '\\") + body[1] + "'");
    }
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    size_t i = 0;
    const size_t n = src.size();

    auto at_line_start = [&](size_t pos) {
        while (pos > 0) {
            char c = src[pos - 1];
            if (c == '\n') return true;
            if (c != ' ' && c != '\t') return false;
            --pos;
        }
        return true;
    };

    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i + 1 >= n) throw SyntaxError(line, "unterminated block comment");
            i += 2;
            continue;
        }
        if (c == '#' && at_line_start(i)) {
            // Preprocessor directive; skip through any backslash continuations.
            while (i < n && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < n && src[i + 1] == '\n') {
                    ++line;
                    i += 2;
                    continue;
                }
                ++i;
            }
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            out.push_back({TokKind::Identifier, std::string(src.substr(start, i - start)), 0, line});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            size_t start = i;
            bool is_float = false;
            if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
                i += 2;
                while (i < n && std::isxdigit(static_cast<unsigned char>(src[i]))) ++i;
            } else {
                while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                if (i < n && src[i] == '.') {
                    is_float = true;
                    ++i;
                    while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
                if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                    is_float = true;
                    ++i;
                    if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
                    while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            while (i < n && (src[i] == 'u' || src[i] == 'U' || src[i] == 'l' || src[i] == 'L' ||
                             ((src[i] == 'f' || src[i] == 'F') && is_float)))
                ++i;
            std::string text(src.substr(start, i - start));
            Token tok;
            tok.kind = is_float ? TokKind::FloatLit : TokKind::IntLit;
            tok.text = text;
            tok.line = line;
            if (!is_float) tok.int_value = std::strtoll(text.c_str(), nullptr, 0);
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '\'') {
            size_t start = ++i;
            while (i < n && src[i] != '\'') {
                if (src[i] == '\\') ++i;
                if (i < n && src[i] == '\n') throw SyntaxError(line, "unterminated character literal");
                ++i;
            }
            if (i >= n) throw SyntaxError(line, "unterminated character literal");
            std::string body(src.substr(start, i - start));
            ++i;
            Token tok;
            tok.kind = TokKind::CharLit;
            tok.text = body;
            tok.int_value = char_escape_value(body, line);
            tok.line = line;
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '"') {
            size_t start = ++i;
            while (i < n && src[i] != '"') {
                if (src[i] == '\\') ++i;
                if (i < n && src[i] == '\n') throw SyntaxError(line, "unterminated string literal");
                ++i;
            }
            if (i >= n) throw SyntaxError(line, "unterminated string literal");
            out.push_back({TokKind::StringLit, std::string(src.substr(start, i - start)), 0, line});
            ++i;
            continue;
        }
        bool matched = false;
        for (const char* p : kPuncts) {
            std::string_view pv(p);
            if (src.substr(i, pv.size()) == pv) {
                out.push_back({TokKind::Punct, std::string(pv), 0, line});
                i += pv.size();
                matched = true;
                break;
            }
        }
        if (!matched) throw SyntaxError(line, std::string("unrecognized character '") + c + "'");
    }
    out.push_back({TokKind::Eof, "", 0, line});
    return out;
}

}  // namespace cbi
