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

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qknow/error.hpp"

namespace qknow::frontends {

enum class TokenKind {
    Ident,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semicolon,
    Comma,
    Colon,
    Dot,
    Assign,   // :=
    EqEq,     // ==
    Equals,   // =
    Arrow,    // ->
    LArrow,   // <-
    Bang,
    Amp,
    Pipe,
    At,
    End,
};

std::string_view describe(TokenKind k);

struct Token {
    TokenKind kind;
    std::string text;
    SourceSpan span;
    double number = 0.0;
    bool integral = false;
};

/// Splits text into tokens. `#` and `//` start comments running to end of
/// line. Bytes >= 0x80 are accepted inside identifiers.
std::vector<Token> tokenize(std::string_view text, const std::string &file, std::size_t first_line = 1);

/// Cursor over a token vector with error helpers shared by the parsers.
class TokenStream {
 public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token &peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    bool at(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    bool at_word(std::string_view w, std::size_t ahead = 0) const {
        return peek(ahead).kind == TokenKind::Ident && peek(ahead).text == w;
    }
    const Token &next() {
        const Token &t = peek();
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    bool accept_word(std::string_view w) {
        if (!at_word(w)) return false;
        next();
        return true;
    }

    const Token &expect(TokenKind k, std::string_view context);
    const Token &expect_word(std::string_view w, std::string_view context);
    std::string expect_ident(std::string_view context);
    int expect_int(std::string_view context);
    double expect_number(std::string_view context);

    [[noreturn]] void fail(const std::string &message, std::vector<std::string> expected = {}) const;
    [[noreturn]] void fail_at(const Token &t, const std::string &message, std::vector<std::string> expected = {}) const;

 private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace qknow::frontends
