// Copyright 2026 The qknow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace qknow::frontends {

std::string_view describe(TokenKind k) {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Number: return "number";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::Comma: return "','";
        case TokenKind::Colon: return "':'";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Assign: return "':='";
        case TokenKind::EqEq: return "'=='";
        case TokenKind::Equals: return "'='";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::LArrow: return "'<-'";
        case TokenKind::Bang: return "'!'";
        case TokenKind::Amp: return "'&'";
        case TokenKind::Pipe: return "'|'";
        case TokenKind::At: return "'@'";
        case TokenKind::End: return "end of input";
    }
    return "token";
}

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string &file, std::size_t first_line) {
    std::vector<Token> out;
    std::size_t i = 0, line = first_line, col = 1;

    auto span_here = [&](std::size_t len) { return SourceSpan{file, line, col, len}; };
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto emit = [&](TokenKind kind, std::size_t len) {
        out.push_back({kind, std::string(text.substr(i, len)), span_here(len)});
        advance(len);
    };

    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        const char n1 = i + 1 < text.size() ? text[i + 1] : '\0';
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && n1 == '/')) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (ident_start(c)) {
            std::size_t len = 1;
            while (i + len < text.size() && ident_char(static_cast<unsigned char>(text[i + len]))) ++len;
            emit(TokenKind::Ident, len);
            continue;
        }
        if (std::isdigit(c) || ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(n1))) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(n1)))) {
            std::size_t len = (c == '-' || c == '+') ? 1 : 0;
            bool integral = true;
            while (i + len < text.size()) {
                const char d = text[i + len];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    ++len;
                } else if (d == '.' || d == 'e' || d == 'E') {
                    integral = false;
                    ++len;
                    if ((d == 'e' || d == 'E') && i + len < text.size() && (text[i + len] == '-' || text[i + len] == '+')) {
                        ++len;
                    }
                } else {
                    break;
                }
            }
            std::string lexeme(text.substr(i, len));
            const char *first = lexeme.data() + (lexeme[0] == '+' ? 1 : 0);
            double value = 0.0;
            auto res = std::from_chars(first, lexeme.data() + lexeme.size(), value);
            if (res.ec != std::errc() || res.ptr != lexeme.data() + lexeme.size()) {
                throw ParseError(span_here(len), fmt::format("malformed number '{}'", lexeme));
            }
            Token t{TokenKind::Number, lexeme, span_here(len), value, integral};
            out.push_back(std::move(t));
            advance(len);
            continue;
        }
        switch (c) {
            case '{': emit(TokenKind::LBrace, 1); continue;
            case '}': emit(TokenKind::RBrace, 1); continue;
            case '(': emit(TokenKind::LParen, 1); continue;
            case ')': emit(TokenKind::RParen, 1); continue;
            case '[': emit(TokenKind::LBracket, 1); continue;
            case ']': emit(TokenKind::RBracket, 1); continue;
            case ';': emit(TokenKind::Semicolon, 1); continue;
            case ',': emit(TokenKind::Comma, 1); continue;
            case '.': emit(TokenKind::Dot, 1); continue;
            case '!': emit(TokenKind::Bang, 1); continue;
            case '&': emit(TokenKind::Amp, 1); continue;
            case '|': emit(TokenKind::Pipe, 1); continue;
            case '@': emit(TokenKind::At, 1); continue;
            case ':':
                if (n1 == '=') emit(TokenKind::Assign, 2);
                else emit(TokenKind::Colon, 1);
                continue;
            case '=':
                if (n1 == '=') emit(TokenKind::EqEq, 2);
                else emit(TokenKind::Equals, 1);
                continue;
            case '-':
                if (n1 == '>') {
                    emit(TokenKind::Arrow, 2);
                    continue;
                }
                break;
            case '<':
                if (n1 == '-') {
                    emit(TokenKind::LArrow, 2);
                    continue;
                }
                break;
            default: break;
        }
        if (std::isprint(c)) {
            throw ParseError(span_here(1), fmt::format("unexpected character '{}'", static_cast<char>(c)));
        }
        throw ParseError(span_here(1), fmt::format("unexpected byte 0x{:02x}", static_cast<unsigned>(c)));
    }
    out.push_back({TokenKind::End, "", SourceSpan{file, line, col, 0}});
    return out;
}

void TokenStream::fail_at(const Token &t, const std::string &message, std::vector<std::string> expected) const {
    throw ParseError(t.span, message, std::move(expected));
}

void TokenStream::fail(const std::string &message, std::vector<std::string> expected) const {
    fail_at(peek(), message, std::move(expected));
}

namespace {

std::string found(const Token &t) {
    if (t.kind == TokenKind::End) return "end of input";
    return fmt::format("'{}'", t.text);
}

}  // namespace

const Token &TokenStream::expect(TokenKind k, std::string_view context) {
    if (!at(k)) fail(fmt::format("in {}: unexpected {}", context, found(peek())), {std::string(describe(k))});
    return next();
}

const Token &TokenStream::expect_word(std::string_view w, std::string_view context) {
    if (!at_word(w)) fail(fmt::format("in {}: unexpected {}", context, found(peek())), {fmt::format("'{}'", w)});
    return next();
}

std::string TokenStream::expect_ident(std::string_view context) { return expect(TokenKind::Ident, context).text; }

int TokenStream::expect_int(std::string_view context) {
    const Token &t = peek();
    if (t.kind != TokenKind::Number || !t.integral) {
        fail(fmt::format("in {}: unexpected {}", context, found(t)), {"integer"});
    }
    int value = 0;
    auto res = std::from_chars(t.text.data() + (t.text[0] == '+' ? 1 : 0), t.text.data() + t.text.size(), value);
    if (res.ec != std::errc()) fail(fmt::format("in {}: integer '{}' out of range", context, t.text));
    next();
    return value;
}

double TokenStream::expect_number(std::string_view context) { return expect(TokenKind::Number, context).number; }

}  // namespace qknow::frontends
