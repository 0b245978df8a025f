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

#include "qknow/logic.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

#include <fmt/format.h>

namespace qknow::logic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int precedence(Op op) {
    switch (op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        default: return 3;
    }
}

std::string print(const Formula &f);

std::string print_child(const Formula &child, int min_prec) {
    std::string s = print(child);
    return precedence(child.op()) < min_prec ? "(" + s + ")" : s;
}

std::string_view op_keyword(Op op) {
    switch (op) {
        case Op::AG: return "AG";
        case Op::EG: return "EG";
        case Op::AF: return "AF";
        case Op::EF: return "EF";
        case Op::AX: return "AX";
        case Op::EX: return "EX";
        default: return "";
    }
}

std::string print(const Formula &f) {
    switch (f.op()) {
        case Op::True: return "true";
        case Op::False: return "false";
        case Op::Terminal: return "terminal";
        case Op::Defined: return fmt::format("defined({}.{})", f.agent(), f.variable());
        case Op::Eq: return fmt::format("{} == {}", to_string(f.lhs()), to_string(f.rhs()));
        case Op::Not: return "!" + print_child(f.child(), 3);
        case Op::And: return print_child(f.child(0), 2) + " & " + print_child(f.child(1), 3);
        case Op::Or: return print_child(f.child(0), 1) + " | " + print_child(f.child(1), 2);
        case Op::Know: return fmt::format("K[{}] {}", f.agent(), print_child(f.child(), 3));
        default: return fmt::format("{} {}", op_keyword(f.op()), print_child(f.child(), 3));
    }
}

std::string join_nodes(const netsem::ConfigGraph &g, const std::vector<NodeId> &nodes) {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) out += " -> ";
        out += fmt::format("n{} {}", nodes[i], g.label(nodes[i]));
    }
    return out;
}

}  // namespace

bool is_quantum(const Term &t) {
    return std::holds_alternative<QubitRef>(t) || std::holds_alternative<InitQubit>(t) ||
           std::holds_alternative<RigidState>(t);
}

std::string to_string(const Term &t) {
    return std::visit(overloaded{
                          [](const VarTerm &v) { return fmt::format("{}.{}", v.agent, v.variable); },
                          [](const BitLit &b) { return std::to_string(b.value); },
                          [](const QubitRef &q) { return fmt::format("q{}", q.qubit.value); },
                          [](const InitQubit &q) { return fmt::format("init(q{})", q.qubit.value); },
                          [](const RigidState &r) {
                              if (!r.label.empty()) return fmt::format("state[{}]", r.label);
                              std::string out = "state[";
                              for (std::size_t i = 0; i < r.amplitudes.size(); ++i) {
                                  if (i > 0) out += ",";
                                  out += fmt::format("({},{})", format_double(r.amplitudes[i].real()),
                                                     format_double(r.amplitudes[i].imag()));
                              }
                              return out + "]";
                          },
                      },
                      t);
}

RigidState rigid_state(const std::string &alias) {
    auto amps = qsim::named_sample(alias);
    if (!amps) throw LookupError(fmt::format("unknown state alias '{}'", alias));
    return {alias, *amps};
}

RigidState rigid_state(std::vector<qsim::Complex> amplitudes) {
    if (amplitudes.size() != 2) throw QuantumError("state literals must be single-qubit (two amplitudes)");
    qsim::make_state({QubitId{1}}, amplitudes);  // validation only
    return {"", std::move(amplitudes)};
}

bool is_temporal(Op op) {
    return op == Op::AG || op == Op::EG || op == Op::AF || op == Op::EF || op == Op::AX || op == Op::EX;
}

bool is_atomic(Op op) {
    return op == Op::True || op == Op::False || op == Op::Terminal || op == Op::Defined || op == Op::Eq;
}

bool Formula::operator==(const Formula &o) const {
    if (node_ == o.node_) return true;
    return op() == o.op() && node_->agent == o.node_->agent && node_->variable == o.node_->variable &&
           node_->lhs == o.node_->lhs && node_->rhs == o.node_->rhs && node_->children == o.node_->children;
}

Formula Formula::make(Op op, std::vector<Formula> children, std::string agent, std::string variable,
                      std::optional<Term> lhs, std::optional<Term> rhs) {
    return Formula(std::make_shared<const Node>(
        Node{op, std::move(lhs), std::move(rhs), std::move(agent), std::move(variable), std::move(children)}));
}

std::string to_string(const Formula &f) { return print(f); }

std::vector<Formula> subformulas(const Formula &f) {
    std::vector<Formula> out;
    std::set<std::string> seen;
    auto walk = [&](auto &&self, const Formula &g) -> void {
        for (const auto &c : g.children()) self(self, c);
        if (seen.insert(to_string(g)).second) out.push_back(g);
    };
    walk(walk, f);
    return out;
}

Formula True() { return Formula::make(Op::True); }
Formula False() { return Formula::make(Op::False); }
Formula Terminal() { return Formula::make(Op::Terminal); }
Formula Defined(std::string agent, std::string variable) {
    return Formula::make(Op::Defined, {}, std::move(agent), std::move(variable));
}
Formula Eq(Term a, Term b) { return Formula::make(Op::Eq, {}, {}, {}, std::move(a), std::move(b)); }
Formula Not(Formula f) { return Formula::make(Op::Not, {std::move(f)}); }
Formula And(Formula a, Formula b) { return Formula::make(Op::And, {std::move(a), std::move(b)}); }
Formula Or(Formula a, Formula b) { return Formula::make(Op::Or, {std::move(a), std::move(b)}); }
Formula Know(std::string agent, Formula f) { return Formula::make(Op::Know, {std::move(f)}, std::move(agent)); }
Formula Temporal(Op op, Formula f) {
    if (!is_temporal(op)) throw Error("not a temporal operator");
    return Formula::make(op, {std::move(f)});
}
Formula AG(Formula f) { return Temporal(Op::AG, std::move(f)); }
Formula EG(Formula f) { return Temporal(Op::EG, std::move(f)); }
Formula AF(Formula f) { return Temporal(Op::AF, std::move(f)); }
Formula EF(Formula f) { return Temporal(Op::EF, std::move(f)); }
Formula AX(Formula f) { return Temporal(Op::AX, std::move(f)); }
Formula EX(Formula f) { return Temporal(Op::EX, std::move(f)); }

VarTerm Var(std::string agent, std::string variable) { return {std::move(agent), std::move(variable)}; }
BitLit Bit(int value) { return {value}; }
QubitRef Qubit(int id) { return {QubitId{id}}; }
InitQubit Init(int id) { return {QubitId{id}}; }

namespace {

bool agent_declares(const netsem::Agent &a, const std::string &var) {
    for (const auto &in : a.inputs) {
        if (in.name == var) return true;
    }
    for (const auto &e : a.program) {
        for (const auto &w : netsem::variables_written(e)) {
            if (w == var) return true;
        }
    }
    return false;
}

void check_term_scope(const Term &t, const netsem::Network &n) {
    if (const auto *v = std::get_if<VarTerm>(&t)) {
        const auto &agent = n.agent(v->agent);
        if (!agent_declares(agent, v->variable)) {
            throw LookupError(fmt::format("agent {} has no variable '{}'", v->agent, v->variable));
        }
    }
    auto check_qubit = [&](QubitId q) {
        if (q.value < 1 || q.value > n.declared_qubits) throw LookupError(fmt::format("unknown qubit q{}", q.value));
    };
    if (const auto *q = std::get_if<QubitRef>(&t)) check_qubit(q->qubit);
    if (const auto *q = std::get_if<InitQubit>(&t)) check_qubit(q->qubit);
    if (const auto *r = std::get_if<RigidState>(&t); r && r->amplitudes.size() != 2) {
        throw LookupError("state literals must be single-qubit");
    }
}

}  // namespace

void check_scope(const Formula &f, const netsem::Network &n) {
    switch (f.op()) {
        case Op::Defined:
            if (!agent_declares(n.agent(f.agent()), f.variable())) {
                throw LookupError(fmt::format("agent {} has no variable '{}'", f.agent(), f.variable()));
            }
            break;
        case Op::Eq:
            check_term_scope(f.lhs(), n);
            check_term_scope(f.rhs(), n);
            if (is_quantum(f.lhs()) != is_quantum(f.rhs())) {
                throw LookupError(fmt::format("cannot compare {} with {}", to_string(f.lhs()), to_string(f.rhs())));
            }
            break;
        case Op::Know: n.agent(f.agent()); break;
        default: break;
    }
    for (const auto &c : f.children()) check_scope(c, n);
}

std::string to_string(Evidence::Kind k) {
    switch (k) {
        case Evidence::Kind::None: return "none";
        case Evidence::Kind::EquivalentNode: return "equivalent-node";
        case Evidence::Kind::Successor: return "successor";
        case Evidence::Kind::WitnessPath: return "witness-path";
        case Evidence::Kind::CounterexamplePath: return "counterexample-path";
    }
    return "none";
}

std::string describe(const netsem::ConfigGraph &g, const Evidence &e) {
    if (e.kind == Evidence::Kind::None || e.nodes.empty()) return e.note;
    return fmt::format("{}: {}", e.note, join_nodes(g, e.nodes));
}

ModelChecker::ModelChecker(const netsem::ConfigGraph &g, std::vector<epistemics::PossibilityPartition> partitions,
                           CheckOptions options)
    : graph_(g), partitions_(std::move(partitions)), options_(options), succ_(g.size()), pred_(g.size()) {
    for (NodeId n = 0; n < g.size(); ++n) {
        auto s = g.successors(n);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (NodeId t : s) pred_[t].push_back(n);
        succ_[n] = std::move(s);
    }
}

const epistemics::PossibilityPartition &ModelChecker::partition(const std::string &agent) const {
    for (const auto &p : partitions_) {
        if (p.agent() == agent) return p;
    }
    throw LookupError(fmt::format("unknown agent '{}'", agent));
}

const std::vector<bool> &ModelChecker::labels(const Formula &f) {
    const std::string key = to_string(f);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto computed = compute(f);
    return memo_.emplace(key, std::move(computed)).first->second;
}

const qsim::DensityMatrix &ModelChecker::qubit_density(NodeId node, QubitId q, bool initial) {
    // Initial snapshots are shared by every node of a run.
    const NodeId owner = initial ? graph_.initial_node_of(node) : node;
    auto key = std::make_tuple(owner, q.value, initial);
    if (auto it = densities_.find(key); it != densities_.end()) return it->second;
    const auto &config = graph_.node(node).config;
    const auto &state = initial ? config.run->initial_state : config.state;
    return densities_.emplace(key, qsim::reduced_density(state, {q})).first->second;
}

std::optional<int> ModelChecker::classical_value(const Term &t, NodeId node) const {
    if (const auto *b = std::get_if<BitLit>(&t)) return b->value;
    const auto &v = std::get<VarTerm>(t);
    const auto idx = graph_.network().agent_index(v.agent);
    if (!idx) throw LookupError(fmt::format("unknown agent '{}'", v.agent));
    const auto &store = graph_.node(node).config.agents[*idx].store;
    auto it = store.find(v.variable);
    if (it == store.end()) return std::nullopt;
    return it->second;
}

qsim::DensityMatrix ModelChecker::quantum_value(const Term &t, NodeId node) {
    if (const auto *q = std::get_if<QubitRef>(&t)) return qubit_density(node, q->qubit, false);
    if (const auto *q = std::get_if<InitQubit>(&t)) return qubit_density(node, q->qubit, true);
    const auto &r = std::get<RigidState>(t);
    return qsim::pure_density(qsim::make_state({QubitId{0}}, r.amplitudes));
}

bool ModelChecker::eval_atomic(const Formula &f, NodeId at) {
    switch (f.op()) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::Terminal: return graph_.is_terminal(at);
        case Op::Defined: {
            const auto idx = graph_.network().agent_index(f.agent());
            if (!idx) throw LookupError(fmt::format("unknown agent '{}'", f.agent()));
            return graph_.node(at).config.agents[*idx].store.contains(f.variable());
        }
        case Op::Eq: {
            const bool ql = is_quantum(f.lhs());
            if (ql != is_quantum(f.rhs())) {
                throw LookupError(fmt::format("cannot compare {} with {}", to_string(f.lhs()), to_string(f.rhs())));
            }
            if (!ql) {
                auto a = classical_value(f.lhs(), at);
                auto b = classical_value(f.rhs(), at);
                return a && b && *a == *b;
            }
            return qsim::dm_equal(quantum_value(f.lhs(), at), quantum_value(f.rhs(), at), options_.tolerance);
        }
        default: throw Error("eval_atomic called on a compound formula");
    }
}

std::vector<bool> ModelChecker::compute(const Formula &f) {
    const std::size_t n = graph_.size();
    std::vector<bool> out(n, false);
    if (is_atomic(f.op())) {
        for (NodeId i = 0; i < n; ++i) out[i] = eval_atomic(f, i);
        return out;
    }
    switch (f.op()) {
        case Op::Not: {
            const auto &a = labels(f.child());
            for (NodeId i = 0; i < n; ++i) out[i] = !a[i];
            return out;
        }
        case Op::And:
        case Op::Or: {
            const auto a = labels(f.child(0));
            const auto &b = labels(f.child(1));
            for (NodeId i = 0; i < n; ++i) out[i] = f.op() == Op::And ? (a[i] && b[i]) : (a[i] || b[i]);
            return out;
        }
        case Op::Know: {
            const auto &body = labels(f.child());
            const auto &p = partition(f.agent());
            for (const auto &cls : p.classes()) {
                const bool all = std::all_of(cls.members.begin(), cls.members.end(), [&](NodeId m) { return body[m]; });
                for (NodeId m : cls.members) out[m] = all;
            }
            return out;
        }
        case Op::EX:
        case Op::AX: {
            const auto &body = labels(f.child());
            for (NodeId i = 0; i < n; ++i) {
                auto pred = [&](NodeId s) { return body[s]; };
                out[i] = f.op() == Op::EX ? std::any_of(succ_[i].begin(), succ_[i].end(), pred)
                                          : std::all_of(succ_[i].begin(), succ_[i].end(), pred);
            }
            return out;
        }
        case Op::EF: {
            // Least fixpoint of body | EX Z, by backward reachability.
            out = labels(f.child());
            std::deque<NodeId> work;
            for (NodeId i = 0; i < n; ++i) {
                if (out[i]) work.push_back(i);
            }
            while (!work.empty()) {
                NodeId t = work.front();
                work.pop_front();
                for (NodeId p : pred_[t]) {
                    if (!out[p]) {
                        out[p] = true;
                        work.push_back(p);
                    }
                }
            }
            return out;
        }
        case Op::AF: {
            // Least fixpoint of body | AX Z: a node joins once all successors have.
            out = labels(f.child());
            std::vector<std::size_t> pending(n);
            std::deque<NodeId> work;
            for (NodeId i = 0; i < n; ++i) {
                pending[i] = succ_[i].size();
                if (out[i]) work.push_back(i);
            }
            while (!work.empty()) {
                NodeId t = work.front();
                work.pop_front();
                for (NodeId p : pred_[t]) {
                    if (out[p]) continue;
                    if (--pending[p] == 0) {
                        out[p] = true;
                        work.push_back(p);
                    }
                }
            }
            return out;
        }
        case Op::EG: {
            // Greatest fixpoint of body & EX Z: drop nodes with no successor left.
            out = labels(f.child());
            std::vector<std::size_t> alive(n, 0);
            std::deque<NodeId> work;
            for (NodeId i = 0; i < n; ++i) {
                if (!out[i]) continue;
                alive[i] = static_cast<std::size_t>(
                    std::count_if(succ_[i].begin(), succ_[i].end(), [&](NodeId s) { return out[s]; }));
                if (alive[i] == 0) work.push_back(i);
            }
            while (!work.empty()) {
                NodeId t = work.front();
                work.pop_front();
                if (!out[t]) continue;
                out[t] = false;
                for (NodeId p : pred_[t]) {
                    if (out[p] && --alive[p] == 0) work.push_back(p);
                }
            }
            return out;
        }
        case Op::AG: {
            // AG f = !EF !f
            const auto &ef_not = labels(EF(Not(f.child())));
            for (NodeId i = 0; i < n; ++i) out[i] = !ef_not[i];
            return out;
        }
        default: break;
    }
    throw Error("unhandled formula operator");
}

std::vector<NodeId> ModelChecker::path_to(NodeId from, const std::vector<bool> &target) const {
    std::vector<std::optional<NodeId>> parent(graph_.size());
    std::vector<bool> seen(graph_.size(), false);
    std::deque<NodeId> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        NodeId t = queue.front();
        queue.pop_front();
        if (target[t]) {
            std::vector<NodeId> path{t};
            while (parent[path.back()]) path.push_back(*parent[path.back()]);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (NodeId s : succ_[t]) {
            if (!seen[s]) {
                seen[s] = true;
                parent[s] = t;
                queue.push_back(s);
            }
        }
    }
    return {};
}

std::vector<NodeId> ModelChecker::lasso_within(NodeId from, const std::vector<bool> &region) const {
    std::vector<NodeId> path{from};
    std::vector<bool> on_path(graph_.size(), false);
    on_path[from] = true;
    while (true) {
        NodeId next = path.back();
        bool found = false;
        for (NodeId s : succ_[path.back()]) {
            if (region[s]) {
                next = s;
                found = true;
                break;
            }
        }
        if (!found) return path;
        path.push_back(next);
        if (on_path[next]) return path;
        on_path[next] = true;
    }
}

Evidence ModelChecker::explain(const Formula &f, NodeId at, bool value) {
    using Kind = Evidence::Kind;
    switch (f.op()) {
        case Op::Not: return explain(f.child(), at, !value);
        case Op::And:
        case Op::Or: {
            // A false conjunction / true disjunction is explained by one child.
            const bool decisive = f.op() == Op::Or;
            if (value != decisive) return {Kind::None, {}, fmt::format("all operands are {}", value)};
            for (const auto &c : f.children()) {
                if (holds(c, at) == value) return explain(c, at, value);
            }
            return {};
        }
        case Op::Know: {
            const auto &eq = partition(f.agent()).equivalents(at);
            if (value) {
                return {Kind::None, {}, fmt::format("body holds in all {} world(s) {} considers possible", eq.size(),
                                                    f.agent())};
            }
            // Prefer a world from another run at the same stage: it shows what
            // the agent cannot tell apart most directly.
            std::optional<NodeId> best;
            int best_rank = 3;
            const auto &here = graph_.node(at);
            for (NodeId m : eq) {
                if (holds(f.child(), m)) continue;
                const auto &there = graph_.node(m);
                const int rank = (there.config.run == here.config.run ? 2 : 0) + (there.depth == here.depth ? 0 : 1);
                if (rank < best_rank) {
                    best = m;
                    best_rank = rank;
                }
            }
            if (!best) return {};
            return {Kind::EquivalentNode, {*best},
                    fmt::format("{} cannot distinguish this world, where the body fails", f.agent())};
        }
        case Op::EX:
        case Op::AX: {
            const auto &body = labels(f.child());
            // EX is witnessed by a satisfying successor, AX refuted by a violating one.
            const bool want = f.op() == Op::EX;
            if (value != want) return {Kind::None, {}, "checked all successors"};
            for (NodeId s : succ_[at]) {
                if (body[s] == want) {
                    return {Kind::Successor, {at, s}, want ? "successor satisfying the body" : "successor violating the body"};
                }
            }
            return {};
        }
        case Op::EF:
        case Op::AG: {
            const bool witness = f.op() == Op::EF ? value : !value;
            if (!witness) return {Kind::None, {}, "checked every reachable node"};
            const auto &body = labels(f.child());
            std::vector<bool> target(body.size());
            for (std::size_t i = 0; i < body.size(); ++i) target[i] = f.op() == Op::EF ? body[i] : !body[i];
            auto path = path_to(at, target);
            return {f.op() == Op::EF ? Kind::WitnessPath : Kind::CounterexamplePath, path,
                    f.op() == Op::EF ? "path reaching the body" : "path reaching a violation"};
        }
        case Op::EG: {
            if (!value) return {Kind::None, {}, "no path keeps the body forever"};
            return {Kind::WitnessPath, lasso_within(at, labels(f)), "path along which the body always holds"};
        }
        case Op::AF: {
            if (value) return {Kind::None, {}, "every path reaches the body"};
            const auto &af = labels(f);
            std::vector<bool> region(af.size());
            for (std::size_t i = 0; i < af.size(); ++i) region[i] = !af[i];
            return {Kind::CounterexamplePath, lasso_within(at, region), "path along which the body never holds"};
        }
        default: return {Kind::None, {}, "atomic proposition"};
    }
}

CheckResult ModelChecker::check(const Formula &f, NodeId at) {
    if (at >= graph_.size()) throw LookupError(fmt::format("node {} does not exist", at));
    check_scope(f, graph_.network());
    CheckResult result;
    result.holds = holds(f, at);
    result.evidence = explain(f, at, result.holds);
    for (const auto &sub : subformulas(f)) {
        const auto &lab = labels(sub);
        std::vector<NodeId> nodes;
        for (NodeId i = 0; i < lab.size(); ++i) {
            if (lab[i]) nodes.push_back(i);
        }
        result.satisfying.emplace(to_string(sub), std::move(nodes));
    }
    return result;
}

bool eval_atomic(const netsem::ConfigGraph &g, NodeId node, const Formula &f, CheckOptions options) {
    ModelChecker checker(g, {}, options);
    return checker.eval_atomic(f, node);
}

CheckResult check(const netsem::ConfigGraph &g, const std::vector<epistemics::PossibilityPartition> &partitions,
                  const Formula &f, NodeId at, CheckOptions options) {
    ModelChecker checker(g, partitions, options);
    return checker.check(f, at);
}

}  // namespace qknow::logic
