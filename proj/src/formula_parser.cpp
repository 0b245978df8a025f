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

#include <fmt/format.h>

#include "lexer.hpp"
#include "qknow/frontends.hpp"

namespace qknow::frontends {

namespace {

using logic::Formula;
using logic::Op;

constexpr std::size_t kMaxNesting = 200;

bool is_temporal_word(std::string_view w) {
    return w == "AG" || w == "EG" || w == "AF" || w == "EF" || w == "AX" || w == "EX";
}

Op temporal_op(std::string_view w) {
    if (w == "AG") return Op::AG;
    if (w == "EG") return Op::EG;
    if (w == "AF") return Op::AF;
    if (w == "EF") return Op::EF;
    if (w == "AX") return Op::AX;
    return Op::EX;
}

/// Parses `qN` identifiers; returns 0 when the identifier is not of that form.
int qubit_number(const std::string &ident) {
    if (ident.size() < 2 || ident[0] != 'q') return 0;
    int value = 0;
    for (std::size_t i = 1; i < ident.size(); ++i) {
        if (ident[i] < '0' || ident[i] > '9') return 0;
        value = value * 10 + (ident[i] - '0');
        if (value > 1'000'000) return 0;
    }
    return value;
}

class FormulaParser {
 public:
    FormulaParser(TokenStream &ts, const netsem::Network &net) : ts_(ts), net_(net) {}

    Formula parse_or() {
        Formula left = parse_and();
        while (ts_.accept(TokenKind::Pipe)) left = logic::Or(left, parse_and());
        return left;
    }

 private:
    struct DepthGuard {
        explicit DepthGuard(FormulaParser &p) : p(p) {
            if (++p.depth_ > kMaxNesting) p.ts_.fail("formula nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
        FormulaParser &p;
    };

    Formula parse_and() {
        Formula left = parse_unary();
        while (ts_.accept(TokenKind::Amp)) left = logic::And(left, parse_unary());
        return left;
    }

    bool word_is_keyword(std::string_view w) const { return ts_.at_word(w) && !ts_.at(TokenKind::Dot, 1); }

    Formula parse_unary() {
        DepthGuard guard(*this);
        if (ts_.accept(TokenKind::Bang)) return logic::Not(parse_unary());
        if (ts_.at_word("K") && ts_.at(TokenKind::LBracket, 1)) {
            ts_.next();
            ts_.next();
            const Token &agent = ts_.expect(TokenKind::Ident, "knowledge operator");
            if (!net_.agent_index(agent.text)) ts_.fail_at(agent, fmt::format("unknown agent '{}'", agent.text));
            ts_.expect(TokenKind::RBracket, "knowledge operator");
            return logic::Know(agent.text, parse_unary());
        }
        if (ts_.at(TokenKind::Ident) && is_temporal_word(ts_.peek().text) && !ts_.at(TokenKind::Dot, 1)) {
            const Op op = temporal_op(ts_.next().text);
            return logic::Temporal(op, parse_unary());
        }
        return parse_primary();
    }

    Formula parse_primary() {
        if (ts_.accept(TokenKind::LParen)) {
            Formula inner = parse_or();
            ts_.expect(TokenKind::RParen, "parenthesized formula");
            return inner;
        }
        if (word_is_keyword("true")) {
            ts_.next();
            return logic::True();
        }
        if (word_is_keyword("false")) {
            ts_.next();
            return logic::False();
        }
        if (word_is_keyword("terminal")) {
            ts_.next();
            return logic::Terminal();
        }
        if (word_is_keyword("defined")) {
            ts_.next();
            ts_.expect(TokenKind::LParen, "defined(...)");
            auto [agent, var] = parse_variable("defined(...)");
            ts_.expect(TokenKind::RParen, "defined(...)");
            return logic::Defined(agent, var);
        }
        const Token &start = ts_.peek();
        logic::Term lhs = parse_term();
        ts_.expect(TokenKind::EqEq, "equality");
        logic::Term rhs = parse_term();
        if (logic::is_quantum(lhs) != logic::is_quantum(rhs)) {
            ts_.fail_at(start, fmt::format("cannot compare {} with {}", logic::to_string(lhs), logic::to_string(rhs)));
        }
        return logic::Eq(std::move(lhs), std::move(rhs));
    }

    std::pair<std::string, std::string> parse_variable(std::string_view context) {
        const Token &agent = ts_.expect(TokenKind::Ident, context);
        ts_.expect(TokenKind::Dot, context);
        const Token &var = ts_.expect(TokenKind::Ident, context);
        const auto idx = net_.agent_index(agent.text);
        if (!idx) ts_.fail_at(agent, fmt::format("unknown agent '{}'", agent.text));
        const logic::Formula probe = logic::Defined(agent.text, var.text);
        try {
            logic::check_scope(probe, net_);
        } catch (const LookupError &e) {
            ts_.fail_at(var, e.what());
        }
        return {agent.text, var.text};
    }

    logic::QubitRef parse_qubit(std::string_view context) {
        const Token &t = ts_.expect(TokenKind::Ident, context);
        const int q = qubit_number(t.text);
        if (q == 0) ts_.fail_at(t, fmt::format("in {}: expected a qubit such as q1", context), {"qubit"});
        if (q > net_.declared_qubits) ts_.fail_at(t, fmt::format("unknown qubit {}", t.text));
        return logic::Qubit(q);
    }

    logic::Term parse_term() {
        const Token &t = ts_.peek();
        if (t.kind == TokenKind::Number) {
            const int v = ts_.expect_int("classical literal");
            return logic::Bit(v);
        }
        if (t.kind != TokenKind::Ident) {
            ts_.fail(fmt::format("in formula: unexpected {}", t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'"),
                     {"formula", "term"});
        }
        if (ts_.at(TokenKind::Dot, 1)) {
            auto [agent, var] = parse_variable("variable reference");
            return logic::Var(agent, var);
        }
        if (t.text == "init" && ts_.at(TokenKind::LParen, 1)) {
            ts_.next();
            ts_.next();
            auto q = parse_qubit("init(...)");
            ts_.expect(TokenKind::RParen, "init(...)");
            return logic::InitQubit{q.qubit};
        }
        if (t.text == "state" && ts_.at(TokenKind::LBracket, 1)) {
            ts_.next();
            ts_.next();
            logic::RigidState state;
            if (ts_.at(TokenKind::LParen)) {
                std::vector<qsim::Complex> amps;
                do {
                    ts_.expect(TokenKind::LParen, "state literal");
                    const double re = ts_.expect_number("state literal");
                    ts_.expect(TokenKind::Comma, "state literal");
                    const double im = ts_.expect_number("state literal");
                    ts_.expect(TokenKind::RParen, "state literal");
                    amps.emplace_back(re, im);
                } while (ts_.accept(TokenKind::Comma));
                try {
                    state = logic::rigid_state(std::move(amps));
                } catch (const Error &e) {
                    ts_.fail_at(t, e.what());
                }
            } else {
                const Token &alias = ts_.next();
                if (alias.kind != TokenKind::Ident && alias.kind != TokenKind::Number) {
                    ts_.fail_at(alias, "in state literal: expected an alias or amplitudes", {"alias", "'('"});
                }
                try {
                    state = logic::rigid_state(alias.text);
                } catch (const Error &e) {
                    ts_.fail_at(alias, e.what());
                }
            }
            ts_.expect(TokenKind::RBracket, "state literal");
            return state;
        }
        if (qubit_number(t.text) != 0) return parse_qubit("qubit reference");
        ts_.fail_at(t, fmt::format("in formula: unexpected '{}'", t.text), {"formula", "term"});
    }

    TokenStream &ts_;
    const netsem::Network &net_;
    std::size_t depth_ = 0;
};

class SelectorParser {
 public:
    explicit SelectorParser(TokenStream &ts) : ts_(ts) {}

    Selector parse() {
        Selector s;
        if (ts_.accept_word("all")) {
            s.base = Selector::Base::All;
        } else if (ts_.accept_word("initial")) {
            s.base = Selector::Base::Initial;
        } else if (ts_.accept_word("terminal")) {
            s.base = Selector::Base::Terminal;
        } else if (ts_.accept_word("stage")) {
            s.base = Selector::Base::Stage;
            const Token &n = ts_.peek();
            const int stage = ts_.expect_int("stage selector");
            if (stage < 1) ts_.fail_at(n, "stages are numbered from 1");
            s.stage = static_cast<std::size_t>(stage);
        } else {
            ts_.fail("in selector: unexpected token", {"'all'", "'all-initial'", "'initial'", "'stage'", "'terminal'"});
        }
        if (ts_.accept(TokenKind::LBracket)) {
            do {
                s.filters.push_back(parse_filter());
            } while (ts_.accept(TokenKind::Comma));
            ts_.expect(TokenKind::RBracket, "selector filters");
        }
        return s;
    }

 private:
    SelectorFilter parse_filter() {
        SelectorFilter f;
        f.span = ts_.peek().span;
        std::string first = ts_.expect_ident("selector filter");
        if (ts_.accept(TokenKind::Dot)) {
            f.agent = std::move(first);
            f.key = ts_.expect_ident("selector filter");
        } else {
            f.key = std::move(first);
        }
        ts_.expect(TokenKind::Equals, "selector filter");
        const Token &v = ts_.next();
        if (v.kind != TokenKind::Ident && !(v.kind == TokenKind::Number && v.integral)) {
            ts_.fail_at(v, "in selector filter: expected a value", {"integer", "sample alias"});
        }
        f.value = v.text;
        return f;
    }

    TokenStream &ts_;
};

// `all-initial` contains a '-', which the lexer does not accept on its own.
std::string normalize_selector(std::string_view text) {
    std::string s(text);
    const auto pos = s.find("all-initial");
    if (pos != std::string::npos) s.replace(pos, 11, "initial    ");
    return s;
}

}  // namespace

logic::Formula parse_formula(std::string_view text, const netsem::Network &n, const std::string &file,
                             std::size_t first_line) {
    TokenStream ts(tokenize(text, file, first_line));
    FormulaParser parser(ts, n);
    Formula f = parser.parse_or();
    ts.expect(TokenKind::End, "formula");
    return f;
}

Selector parse_selector(std::string_view text, const std::string &file, std::size_t first_line) {
    TokenStream ts(tokenize(normalize_selector(text), file, first_line));
    Selector s = SelectorParser(ts).parse();
    ts.expect(TokenKind::End, "selector");
    return s;
}

std::string to_string(const Selector &s) {
    std::string out;
    switch (s.base) {
        case Selector::Base::All: out = "all"; break;
        case Selector::Base::Initial: out = s.filters.empty() ? "all-initial" : "initial"; break;
        case Selector::Base::Terminal: out = "terminal"; break;
        case Selector::Base::Stage: out = fmt::format("stage {}", s.stage); break;
    }
    if (!s.filters.empty()) {
        out += s.base == Selector::Base::Initial ? "[" : " [";
        for (std::size_t i = 0; i < s.filters.size(); ++i) {
            const auto &f = s.filters[i];
            if (i > 0) out += ",";
            out += f.agent.empty() ? fmt::format("{}={}", f.key, f.value) : fmt::format("{}.{}={}", f.agent, f.key, f.value);
        }
        out += "]";
    }
    return out;
}

std::vector<FormulaEntry> parse_formula_file(std::string_view text, const netsem::Network &n, const std::string &file) {
    std::vector<FormulaEntry> entries;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string line(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.find("all-initial") != std::string::npos) line = normalize_selector(line);

        TokenStream ts(tokenize(line, file, line_no));
        if (ts.at(TokenKind::End)) {
            if (end == text.size()) break;
            continue;
        }
        const Token &name = ts.expect(TokenKind::Ident, "formula entry");
        ts.expect(TokenKind::Colon, "formula entry");
        FormulaParser fp(ts, n);
        Formula f = fp.parse_or();
        ts.expect(TokenKind::At, "formula entry");
        Selector sel = SelectorParser(ts).parse();
        std::optional<bool> expect;
        if (ts.accept_word("expect")) {
            ts.expect(TokenKind::Colon, "expectation");
            if (ts.accept_word("true")) {
                expect = true;
            } else if (ts.accept_word("false")) {
                expect = false;
            } else {
                ts.fail("in expectation: unexpected token", {"'true'", "'false'"});
            }
        }
        ts.expect(TokenKind::End, "formula entry");
        for (const auto &e : entries) {
            if (e.name == name.text && e.selector == sel) {
                ts.fail_at(name, fmt::format("duplicate entry '{}' @ {}", name.text, to_string(sel)));
            }
        }
        entries.push_back({name.text, std::move(f), std::move(sel), expect, name.span});
        if (end == text.size()) break;
    }
    return entries;
}

std::string print_formula_entry(const FormulaEntry &e) {
    std::string out = fmt::format("{} : {} @ {}", e.name, logic::to_string(e.formula), to_string(e.selector));
    if (e.expect) out += fmt::format(" expect: {}", *e.expect ? "true" : "false");
    return out;
}

}  // namespace qknow::frontends
