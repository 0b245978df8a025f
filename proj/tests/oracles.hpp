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

// Independent reference implementations used by the tests: dense-matrix
// quantum operations, a naive recursive evaluator for the logic, a brute-force
// possibility relation, a DOT grammar checker and a random formula generator.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qknow/logic.hpp"
#include "qknow/netsem.hpp"
#include "qknow/qsim.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;
using Vec = std::vector<cd>;

inline Mat zeros(std::size_t n) { return Mat(n, std::vector<cd>(n)); }

inline Mat identity(std::size_t n) {
    Mat m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline Mat kron(const Mat &a, const Mat &b) {
    const std::size_t n = a.size(), m = b.size();
    Mat out = zeros(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) out[i * m + k][j * m + l] = a[i][j] * b[k][l];
    return out;
}

inline Mat add(const Mat &a, const Mat &b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out[i][j] += b[i][j];
    return out;
}

inline Vec apply(const Mat &m, const Vec &v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline Mat pauli_x() { return {{0, 1}, {1, 0}}; }
inline Mat pauli_z() { return {{1, 0}, {0, -1}}; }
inline Mat hadamard() {
    const double r = 1 / std::sqrt(2.0);
    return {{r, r}, {r, -r}};
}
inline Mat proj(int bit) { return bit == 0 ? Mat{{1, 0}, {0, 0}} : Mat{{0, 0}, {0, 1}}; }

/// Operator acting as `ops[p]` on position p (identity elsewhere), position 0
/// being the most significant qubit.
inline Mat chain(std::size_t n, const std::vector<std::pair<std::size_t, Mat>> &ops) {
    Mat out = {{1}};
    for (std::size_t p = 0; p < n; ++p) {
        Mat factor = identity(2);
        for (const auto &[pos, m] : ops)
            if (pos == p) factor = m;
        out = kron(out, factor);
    }
    return out;
}

inline Mat single(const Mat &g, std::size_t pos, std::size_t n) { return chain(n, {{pos, g}}); }

inline Mat controlled(const Mat &g, std::size_t c, std::size_t t, std::size_t n) {
    return add(chain(n, {{c, proj(0)}}), chain(n, {{c, proj(1)}, {t, g}}));
}

/// Reduced density matrix of the qubits at `keep` (positions, in that order).
inline Mat partial_trace(const Vec &psi, std::size_t n, const std::vector<std::size_t> &keep) {
    const std::size_t k = keep.size();
    Mat out = zeros(std::size_t{1} << k);
    auto bit = [&](std::size_t idx, std::size_t pos) { return (idx >> (n - 1 - pos)) & 1U; };
    for (std::size_t i = 0; i < psi.size(); ++i) {
        for (std::size_t j = 0; j < psi.size(); ++j) {
            bool traced_equal = true;
            for (std::size_t p = 0; p < n && traced_equal; ++p) {
                if (std::find(keep.begin(), keep.end(), p) == keep.end() && bit(i, p) != bit(j, p)) traced_equal = false;
            }
            if (!traced_equal) continue;
            std::size_t r = 0, c = 0;
            for (std::size_t q = 0; q < k; ++q) {
                r = (r << 1) | bit(i, keep[q]);
                c = (c << 1) | bit(j, keep[q]);
            }
            out[r][c] += psi[i] * std::conj(psi[j]);
        }
    }
    return out;
}

inline Mat outer(const Vec &v) {
    Mat out = zeros(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i][j] = v[i] * std::conj(v[j]);
    return out;
}

inline double max_diff(const Mat &a, const Mat &b) {
    if (a.size() != b.size()) return INFINITY;
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

inline Mat to_mat(const qknow::qsim::DensityMatrix &d) {
    Mat out = zeros(d.dim);
    for (std::size_t i = 0; i < d.dim; ++i)
        for (std::size_t j = 0; j < d.dim; ++j) out[i][j] = d.at(i, j);
    return out;
}

inline Vec to_vec(const qknow::qsim::StateVector &s) { return Vec(s.amplitudes().begin(), s.amplitudes().end()); }

/// Bell basis vectors indexed by (phase bit, flip bit).
inline Vec bell_vector(int phase, int flip) {
    const double r = 1 / std::sqrt(2.0);
    Vec v(4);
    if (flip == 0) {
        v[0] = r;
        v[3] = phase ? -r : r;
    } else {
        v[1] = r;
        v[2] = phase ? -r : r;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Possibility relation by pairwise comparison.

inline std::vector<std::string> remaining_program(const qknow::netsem::Network &n, std::size_t agent,
                                                  const qknow::netsem::Configuration &c) {
    std::vector<std::string> out;
    const auto &prog = n.agents[agent].program;
    for (std::size_t i = c.agents[agent].pc; i < prog.size(); ++i) out.push_back(qknow::netsem::to_string(prog[i]));
    return out;
}

inline bool indistinguishable(const qknow::netsem::ConfigGraph &g, std::size_t agent, qknow::netsem::NodeId a,
                              qknow::netsem::NodeId b) {
    const auto &ca = g.node(a).config, &cb = g.node(b).config;
    return ca.agents[agent].store == cb.agents[agent].store &&
           remaining_program(g.network(), agent, ca) == remaining_program(g.network(), agent, cb);
}

/// Classes as sorted member sets, found by pairwise comparison.
inline std::set<std::set<qknow::netsem::NodeId>> brute_partition(const qknow::netsem::ConfigGraph &g,
                                                                 std::size_t agent) {
    std::set<std::set<qknow::netsem::NodeId>> out;
    for (qknow::netsem::NodeId a = 0; a < g.size(); ++a) {
        std::set<qknow::netsem::NodeId> cls;
        for (qknow::netsem::NodeId b = 0; b < g.size(); ++b)
            if (indistinguishable(g, agent, a, b)) cls.insert(b);
        out.insert(cls);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive recursive evaluator: explicit path exploration, no labeling.

class NaiveChecker {
 public:
    explicit NaiveChecker(const qknow::netsem::ConfigGraph &g, double tol = 1e-9) : g_(g), tol_(tol) {}

    bool eval(const qknow::logic::Formula &f, qknow::netsem::NodeId n) {
        using qknow::logic::Op;
        switch (f.op()) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Terminal: return g_.is_terminal(n);
            case Op::Defined: {
                const auto idx = *g_.network().agent_index(f.agent());
                return g_.node(n).config.agents[idx].store.count(f.variable()) > 0;
            }
            case Op::Eq: return eval_eq(f, n);
            case Op::Not: return !eval(f.child(), n);
            case Op::And: return eval(f.child(0), n) && eval(f.child(1), n);
            case Op::Or: return eval(f.child(0), n) || eval(f.child(1), n);
            case Op::Know: {
                const auto idx = *g_.network().agent_index(f.agent());
                for (qknow::netsem::NodeId m = 0; m < g_.size(); ++m) {
                    if (indistinguishable(g_, idx, n, m) && !eval(f.child(), m)) return false;
                }
                return true;
            }
            case Op::AX:
                for (auto s : g_.successors(n))
                    if (!eval(f.child(), s)) return false;
                return true;
            case Op::EX:
                for (auto s : g_.successors(n))
                    if (eval(f.child(), s)) return true;
                return false;
            case Op::EF: {
                for (auto m : reachable(n))
                    if (eval(f.child(), m)) return true;
                return false;
            }
            case Op::AG: {
                for (auto m : reachable(n))
                    if (!eval(f.child(), m)) return false;
                return true;
            }
            case Op::AF: {
                std::vector<qknow::netsem::NodeId> stack;
                return af(f.child(), n, stack);
            }
            case Op::EG: {
                std::vector<qknow::netsem::NodeId> stack;
                return eg(f.child(), n, stack);
            }
        }
        return false;
    }

 private:
    std::vector<qknow::netsem::NodeId> reachable(qknow::netsem::NodeId n) const {
        std::vector<bool> seen(g_.size(), false);
        std::vector<qknow::netsem::NodeId> order{n}, todo{n};
        seen[n] = true;
        while (!todo.empty()) {
            auto cur = todo.back();
            todo.pop_back();
            for (auto s : g_.successors(cur)) {
                if (seen[s]) continue;
                seen[s] = true;
                order.push_back(s);
                todo.push_back(s);
            }
        }
        return order;
    }

    // Every path from n eventually satisfies f; a path that revisits a node
    // without meeting f loops forever and refutes it.
    bool af(const qknow::logic::Formula &f, qknow::netsem::NodeId n, std::vector<qknow::netsem::NodeId> &stack) {
        if (eval(f, n)) return true;
        if (std::find(stack.begin(), stack.end(), n) != stack.end()) return false;
        stack.push_back(n);
        bool all = true;
        for (auto s : g_.successors(n)) {
            if (!af(f, s, stack)) {
                all = false;
                break;
            }
        }
        stack.pop_back();
        return all;
    }

    bool eg(const qknow::logic::Formula &f, qknow::netsem::NodeId n, std::vector<qknow::netsem::NodeId> &stack) {
        if (!eval(f, n)) return false;
        if (std::find(stack.begin(), stack.end(), n) != stack.end()) return true;
        stack.push_back(n);
        bool any = false;
        for (auto s : g_.successors(n)) {
            if (eg(f, s, stack)) {
                any = true;
                break;
            }
        }
        stack.pop_back();
        return any;
    }

    std::optional<int> classical(const qknow::logic::Term &t, qknow::netsem::NodeId n) const {
        if (const auto *b = std::get_if<qknow::logic::BitLit>(&t)) return b->value;
        const auto &v = std::get<qknow::logic::VarTerm>(t);
        const auto idx = *g_.network().agent_index(v.agent);
        const auto &store = g_.node(n).config.agents[idx].store;
        auto it = store.find(v.variable);
        if (it == store.end()) return std::nullopt;
        return it->second;
    }

    Mat density_of(const qknow::qsim::StateVector &s, qknow::qsim::QubitId q) const {
        const auto &qs = s.qubits();
        const std::size_t pos = std::find(qs.begin(), qs.end(), q) - qs.begin();
        return partial_trace(to_vec(s), qs.size(), {pos});
    }

    Mat quantum(const qknow::logic::Term &t, qknow::netsem::NodeId n) const {
        if (const auto *q = std::get_if<qknow::logic::QubitRef>(&t)) return density_of(g_.node(n).config.state, q->qubit);
        if (const auto *q = std::get_if<qknow::logic::InitQubit>(&t)) {
            return density_of(g_.node(n).config.run->initial_state, q->qubit);
        }
        const auto &r = std::get<qknow::logic::RigidState>(t);
        return outer(Vec(r.amplitudes.begin(), r.amplitudes.end()));
    }

    bool eval_eq(const qknow::logic::Formula &f, qknow::netsem::NodeId n) const {
        if (qknow::logic::is_quantum(f.lhs())) return max_diff(quantum(f.lhs(), n), quantum(f.rhs(), n)) <= tol_;
        const auto a = classical(f.lhs(), n), b = classical(f.rhs(), n);
        return a && b && *a == *b;
    }

    const qknow::netsem::ConfigGraph &g_;
    double tol_;
};

// ---------------------------------------------------------------------------
// Random formulas over a fixed set of atoms.

class FormulaGen {
 public:
    FormulaGen(std::vector<qknow::logic::Formula> atoms, std::vector<std::string> agents, unsigned seed)
        : atoms_(std::move(atoms)), agents_(std::move(agents)), rng_(seed) {}

    qknow::logic::Formula operator()(int depth) {
        using namespace qknow::logic;
        if (depth <= 0 || pick(4) == 0) return atoms_[pick(atoms_.size())];
        switch (pick(10)) {
            case 0: return Not((*this)(depth - 1));
            case 1: return And((*this)(depth - 1), (*this)(depth - 1));
            case 2: return Or((*this)(depth - 1), (*this)(depth - 1));
            case 3:
            case 4: return Know(agents_[pick(agents_.size())], (*this)(depth - 1));
            default: {
                static const Op temporal[] = {Op::AG, Op::EG, Op::AF, Op::EF, Op::AX, Op::EX};
                return Temporal(temporal[pick(6)], (*this)(depth - 1));
            }
        }
    }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
    std::vector<qknow::logic::Formula> atoms_;
    std::vector<std::string> agents_;
    std::mt19937 rng_;
};

// ---------------------------------------------------------------------------
// DOT grammar checker (graph / digraph, statements, attribute lists,
// subgraphs, edge chains, quoted strings and numerals).

class DotChecker {
 public:
    explicit DotChecker(std::string text) : s_(std::move(text)) {}

    /// True when the whole text is one DOT graph; `error` names the first problem.
    bool valid(std::string *error = nullptr) {
        try {
            tokenize();
            parse_graph();
            if (pos_ != toks_.size()) fail("trailing input");
            return true;
        } catch (const std::string &e) {
            if (error) *error = e;
            return false;
        }
    }

    std::size_t node_statements() const { return node_stmts_; }
    std::size_t edge_statements() const { return edge_stmts_; }
    std::size_t subgraphs() const { return subgraphs_; }

 private:
    struct Tok {
        enum Kind { Id, Punct, Edge } kind;
        std::string text;
    };

    [[noreturn]] void fail(const std::string &why) const {
        throw std::string(why + " at token " + std::to_string(pos_));
    }

    void tokenize() {
        std::size_t i = 0;
        while (i < s_.size()) {
            const unsigned char c = s_[i];
            if (std::isspace(c)) {
                ++i;
            } else if (c == '/' && i + 1 < s_.size() && s_[i + 1] == '/') {
                while (i < s_.size() && s_[i] != '\n') ++i;
            } else if (c == '"') {
                std::string t;
                ++i;
                while (true) {
                    if (i >= s_.size()) throw std::string("unterminated string");
                    if (s_[i] == '\\' && i + 1 < s_.size()) {
                        t += s_[i];
                        t += s_[i + 1];
                        i += 2;
                        continue;
                    }
                    if (s_[i] == '"') break;
                    if (s_[i] == '\n') throw std::string("raw newline in string");
                    t += s_[i++];
                }
                ++i;
                toks_.push_back({Tok::Id, t});
            } else if (std::isalpha(c) || c == '_' || c >= 0x80) {
                std::size_t j = i;
                while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
                                         static_cast<unsigned char>(s_[j]) >= 0x80))
                    ++j;
                toks_.push_back({Tok::Id, s_.substr(i, j - i)});
                i = j;
            } else if (std::isdigit(c) || c == '.' || (c == '-' && i + 1 < s_.size() && (std::isdigit(s_[i + 1]) || s_[i + 1] == '.'))) {
                std::size_t j = i + (c == '-' ? 1 : 0);
                bool dot = false;
                while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || (s_[j] == '.' && !dot))) {
                    if (s_[j] == '.') dot = true;
                    ++j;
                }
                toks_.push_back({Tok::Id, s_.substr(i, j - i)});
                i = j;
            } else if (c == '-' && i + 1 < s_.size() && (s_[i + 1] == '>' || s_[i + 1] == '-')) {
                toks_.push_back({Tok::Edge, s_.substr(i, 2)});
                i += 2;
            } else if (std::string("{}[];,=:").find(static_cast<char>(c)) != std::string::npos) {
                toks_.push_back({Tok::Punct, std::string(1, static_cast<char>(c))});
                ++i;
            } else {
                throw std::string("unexpected character '") + static_cast<char>(c) + "'";
            }
        }
    }

    static std::string lower(std::string s) {
        for (auto &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    bool at_punct(const char *p) const { return pos_ < toks_.size() && toks_[pos_].kind == Tok::Punct && toks_[pos_].text == p; }
    bool at_id() const { return pos_ < toks_.size() && toks_[pos_].kind == Tok::Id; }
    bool at_keyword(const char *k) const { return at_id() && lower(toks_[pos_].text) == k; }
    bool at_edge() const { return pos_ < toks_.size() && toks_[pos_].kind == Tok::Edge; }

    void expect_punct(const char *p) {
        if (!at_punct(p)) fail(std::string("expected '") + p + "'");
        ++pos_;
    }
    void expect_id() {
        if (!at_id()) fail("expected an ID");
        ++pos_;
    }

    void parse_graph() {
        if (at_keyword("strict")) ++pos_;
        if (at_keyword("digraph")) {
            directed_ = true;
        } else if (!at_keyword("graph")) {
            fail("expected 'graph' or 'digraph'");
        }
        ++pos_;
        if (at_id()) ++pos_;
        expect_punct("{");
        parse_stmt_list();
        expect_punct("}");
    }

    void parse_stmt_list() {
        while (!at_punct("}")) {
            if (pos_ >= toks_.size()) fail("unexpected end of input");
            parse_stmt();
            if (at_punct(";")) ++pos_;
        }
    }

    void parse_attr_list() {
        while (at_punct("[")) {
            ++pos_;
            while (!at_punct("]")) {
                expect_id();
                expect_punct("=");
                expect_id();
                if (at_punct(";") || at_punct(",")) ++pos_;
            }
            ++pos_;
        }
    }

    void parse_subgraph() {
        if (at_keyword("subgraph")) {
            ++pos_;
            if (at_id()) ++pos_;
        }
        expect_punct("{");
        ++subgraphs_;
        parse_stmt_list();
        expect_punct("}");
    }

    void parse_node_id() {
        expect_id();
        if (at_punct(":")) {
            ++pos_;
            expect_id();
            if (at_punct(":")) {
                ++pos_;
                expect_id();
            }
        }
    }

    void parse_stmt() {
        if (at_keyword("graph") || at_keyword("node") || at_keyword("edge")) {
            ++pos_;
            if (!at_punct("[")) fail("expected attribute list");
            parse_attr_list();
            return;
        }
        bool operand_is_subgraph = false;
        if (at_keyword("subgraph") || at_punct("{")) {
            parse_subgraph();
            operand_is_subgraph = true;
        } else {
            const std::size_t start = pos_;
            expect_id();
            if (at_punct("=")) {
                ++pos_;
                expect_id();
                return;
            }
            pos_ = start;
            parse_node_id();
        }
        if (at_edge()) {
            while (at_edge()) {
                if ((toks_[pos_].text == "->") != directed_) fail("edge operator does not match graph kind");
                ++pos_;
                if (at_keyword("subgraph") || at_punct("{")) {
                    parse_subgraph();
                } else {
                    parse_node_id();
                }
            }
            ++edge_stmts_;
            parse_attr_list();
            return;
        }
        if (!operand_is_subgraph) {
            ++node_stmts_;
            parse_attr_list();
        }
    }

    std::string s_;
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    std::size_t node_stmts_ = 0, edge_stmts_ = 0, subgraphs_ = 0;
};

}  // namespace oracle
