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

#include "qknow/netsem.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace qknow::netsem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string join(const std::vector<std::string> &items, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

std::string qubit_list(const std::vector<QubitId> &qs) {
    std::vector<std::string> parts;
    for (QubitId q : qs) parts.push_back(std::to_string(q.value));
    return join(parts, ", ");
}

bool owns(const AgentState &a, QubitId q) { return std::binary_search(a.owned.begin(), a.owned.end(), q); }

void write_once(const Agent &agent, std::size_t event, AgentState &a, const std::string &var, int value) {
    if (!a.store.emplace(var, value).second) {
        throw ModelError(agent.name, event, fmt::format("variable '{}' is already assigned", var));
    }
}

int read_var(const Agent &agent, std::size_t event, const AgentState &a, const std::string &var) {
    auto it = a.store.find(var);
    if (it == a.store.end()) {
        throw ModelError(agent.name, event, fmt::format("variable '{}' is not assigned", var));
    }
    return it->second;
}

void require_owned(const Agent &agent, std::size_t event, const AgentState &a, QubitId q) {
    if (!owns(a, q)) {
        throw ModelError(agent.name, event, fmt::format("qubit {} is not owned by {}", q.value, agent.name));
    }
}

std::string outcome_text(const std::vector<std::string> &vars, const std::vector<int> &bits) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < vars.size(); ++i) parts.push_back(fmt::format("{}={}", vars[i], bits[i]));
    return join(parts);
}

}  // namespace

std::string to_string(const Event &e) {
    return std::visit(
        overloaded{
            [](const ApplyGate &g) { return fmt::format("{}({})", qsim::gate_name(g.gate), qubit_list(g.targets)); },
            [](const CondPauli &c) {
                return fmt::format("cond{}({}, {})", c.pauli == Pauli::X ? "X" : "Z", c.target.value, c.condition);
            },
            [](const MeasureComp &m) { return fmt::format("{} := measure({})", m.outcome, m.target.value); },
            [](const MeasureBell &m) {
                return fmt::format("({}, {}) := bell({}, {})", m.outcome_first, m.outcome_second, m.first.value,
                                   m.second.value);
            },
            [](const ClassicalSend &s) { return fmt::format("csend ({}) -> {}", join(s.variables, ", "), s.peer); },
            [](const ClassicalRecv &r) { return fmt::format("crecv ({}) <- {}", join(r.variables, ", "), r.peer); },
            [](const QuantumSend &s) { return fmt::format("qsend {} -> {}", s.qubit.value, s.peer); },
            [](const QuantumRecv &r) { return fmt::format("qrecv {} <- {}", r.qubit.value, r.peer); },
        },
        e);
}

bool is_local_unitary(const Event &e) {
    return std::holds_alternative<ApplyGate>(e) || std::holds_alternative<CondPauli>(e);
}

std::vector<std::string> variables_read(const Event &e) {
    if (const auto *c = std::get_if<CondPauli>(&e)) return {c->condition};
    if (const auto *s = std::get_if<ClassicalSend>(&e)) return s->variables;
    return {};
}

std::vector<std::string> variables_written(const Event &e) {
    if (const auto *m = std::get_if<MeasureComp>(&e)) return {m->outcome};
    if (const auto *m = std::get_if<MeasureBell>(&e)) return {m->outcome_first, m->outcome_second};
    if (const auto *r = std::get_if<ClassicalRecv>(&e)) return r->variables;
    return {};
}

std::vector<QubitId> qubits_touched(const Event &e) {
    return std::visit(overloaded{
                          [](const ApplyGate &g) { return g.targets; },
                          [](const CondPauli &c) { return std::vector<QubitId>{c.target}; },
                          [](const MeasureComp &m) { return std::vector<QubitId>{m.target}; },
                          [](const MeasureBell &m) { return std::vector<QubitId>{m.first, m.second}; },
                          [](const ClassicalSend &) { return std::vector<QubitId>{}; },
                          [](const ClassicalRecv &) { return std::vector<QubitId>{}; },
                          [](const QuantumSend &s) { return std::vector<QubitId>{s.qubit}; },
                          [](const QuantumRecv &r) { return std::vector<QubitId>{r.qubit}; },
                      },
                      e);
}

std::optional<std::size_t> Network::agent_index(std::string_view agent_name) const {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].name == agent_name) return i;
    }
    return std::nullopt;
}

const Agent &Network::agent(std::string_view agent_name) const {
    auto idx = agent_index(agent_name);
    if (!idx) throw LookupError(fmt::format("unknown agent '{}'", agent_name));
    return agents[*idx];
}

qsim::StateVector Network::resource() const {
    qsim::StateVector state;
    for (const auto &part : resource_parts) {
        if (part.kind == ResourcePart::Kind::Ebit) {
            if (part.qubits.size() != 2) throw ModelError("<network>", 0, "ebit needs exactly two qubits");
            state = qsim::tensor(state, qsim::ebit(part.qubits[0], part.qubits[1]));
        } else {
            state = qsim::tensor(state, qsim::make_state(part.qubits, part.amplitudes));
        }
    }
    return state;
}

std::vector<Issue> static_issues(const Network &n) {
    std::vector<Issue> issues;
    auto add = [&](std::optional<std::size_t> agent, std::optional<std::size_t> event, std::string msg) {
        issues.push_back({agent, event, std::move(msg)});
    };

    std::set<std::string> names;
    std::map<QubitId, std::size_t> owner;
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        const Agent &a = n.agents[i];
        if (!names.insert(a.name).second) add(i, std::nullopt, fmt::format("duplicate agent name '{}'", a.name));
        for (QubitId q : a.owned) {
            if (q.value < 1 || q.value > n.declared_qubits) {
                add(i, std::nullopt, fmt::format("qubit {} is outside the declared range 1..{}", q.value,
                                                 n.declared_qubits));
            }
            auto [it, fresh] = owner.emplace(q, i);
            if (!fresh) {
                add(i, std::nullopt,
                    fmt::format("qubit {} is owned by both {} and {}", q.value, n.agents[it->second].name, a.name));
            }
        }
    }
    for (int q = 1; q <= n.declared_qubits; ++q) {
        if (!owner.contains(QubitId{q})) add(std::nullopt, std::nullopt, fmt::format("qubit {} has no owner", q));
    }

    std::set<QubitId> covered;
    for (const auto &part : n.resource_parts) {
        for (QubitId q : part.qubits) {
            if (!owner.contains(q)) add(std::nullopt, std::nullopt, fmt::format("resource qubit {} has no owner", q.value));
            if (!covered.insert(q).second) {
                add(std::nullopt, std::nullopt, fmt::format("qubit {} appears twice in the resource", q.value));
            }
        }
        if (part.kind == ResourcePart::Kind::Ebit && part.qubits.size() != 2) {
            add(std::nullopt, std::nullopt, "ebit needs exactly two qubits");
        }
        if (part.kind == ResourcePart::Kind::Amplitudes) {
            try {
                qsim::make_state(part.qubits, part.amplitudes);
            } catch (const QuantumError &err) {
                add(std::nullopt, std::nullopt, fmt::format("resource: {}", err.what()));
            }
        }
    }
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        for (QubitId q : n.agents[i].quantum_inputs) {
            if (!std::binary_search(n.agents[i].owned.begin(), n.agents[i].owned.end(), q)) {
                add(i, std::nullopt, fmt::format("quantum input {} is not owned by {}", q.value, n.agents[i].name));
            }
            if (!covered.insert(q).second) {
                add(i, std::nullopt, fmt::format("qubit {} is both a resource qubit and a quantum input", q.value));
            }
        }
    }
    for (const auto &[q, i] : owner) {
        if (!covered.contains(q)) {
            add(i, std::nullopt,
                fmt::format("qubit {} is neither part of the resource nor a quantum input", q.value));
        }
    }

    // Per-agent program walk.
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        const Agent &a = n.agents[i];
        std::set<std::string> assigned;
        for (const auto &in : a.inputs) {
            if (!assigned.insert(in.name).second) add(i, std::nullopt, fmt::format("duplicate input '{}'", in.name));
            if (in.domain.empty()) add(i, std::nullopt, fmt::format("input '{}' has an empty domain", in.name));
        }
        std::set<QubitId> owned(a.owned.begin(), a.owned.end());
        for (std::size_t k = 0; k < a.program.size(); ++k) {
            const Event &e = a.program[k];
            for (const auto &v : variables_read(e)) {
                if (!assigned.contains(v)) add(i, k, fmt::format("variable '{}' is used before it is assigned", v));
            }
            for (const auto &v : variables_written(e)) {
                if (!assigned.insert(v).second) add(i, k, fmt::format("variable '{}' is assigned twice", v));
            }
            if (const auto *g = std::get_if<ApplyGate>(&e)) {
                if (g->targets.size() != qsim::gate_arity(g->gate)) {
                    add(i, k, fmt::format("gate {} takes {} qubit(s)", qsim::gate_name(g->gate),
                                          qsim::gate_arity(g->gate)));
                } else if (g->targets.size() == 2 && g->targets[0] == g->targets[1]) {
                    add(i, k, "two-qubit gate needs distinct qubits");
                }
            }
            if (const auto *m = std::get_if<MeasureBell>(&e); m && m->first == m->second) {
                add(i, k, "Bell measurement needs distinct qubits");
            }
            if (const auto *r = std::get_if<QuantumRecv>(&e)) {
                if (owned.contains(r->qubit)) add(i, k, fmt::format("{} already owns qubit {}", a.name, r->qubit.value));
                owned.insert(r->qubit);
            } else {
                for (QubitId q : qubits_touched(e)) {
                    if (!owned.contains(q)) {
                        add(i, k, fmt::format("qubit {} is not owned by {} at this point", q.value, a.name));
                    }
                }
                if (const auto *s = std::get_if<QuantumSend>(&e)) owned.erase(s->qubit);
            }
            std::string peer;
            std::visit(overloaded{[&](const ClassicalSend &s) { peer = s.peer; },
                                  [&](const ClassicalRecv &r) { peer = r.peer; },
                                  [&](const QuantumSend &s) { peer = s.peer; },
                                  [&](const QuantumRecv &r) { peer = r.peer; }, [](const auto &) {}},
                       e);
            if (!peer.empty()) {
                if (peer == a.name) {
                    add(i, k, "an agent cannot communicate with itself");
                } else if (!n.agent_index(peer)) {
                    add(i, k, fmt::format("unknown peer agent '{}'", peer));
                }
            }
        }
    }

    // Rendezvous matching per ordered pair, in program order.
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        for (std::size_t j = 0; j < n.agents.size(); ++j) {
            if (i == j) continue;
            const Agent &from = n.agents[i];
            const Agent &to = n.agents[j];
            std::vector<std::size_t> sends, recvs;
            for (std::size_t k = 0; k < from.program.size(); ++k) {
                const Event &e = from.program[k];
                if (const auto *s = std::get_if<ClassicalSend>(&e); s && s->peer == to.name) sends.push_back(k);
                if (const auto *s = std::get_if<QuantumSend>(&e); s && s->peer == to.name) sends.push_back(k);
            }
            for (std::size_t k = 0; k < to.program.size(); ++k) {
                const Event &e = to.program[k];
                if (const auto *r = std::get_if<ClassicalRecv>(&e); r && r->peer == from.name) recvs.push_back(k);
                if (const auto *r = std::get_if<QuantumRecv>(&e); r && r->peer == from.name) recvs.push_back(k);
            }
            const std::size_t common = std::min(sends.size(), recvs.size());
            for (std::size_t m = 0; m < common; ++m) {
                const Event &s = from.program[sends[m]];
                const Event &r = to.program[recvs[m]];
                if (const auto *cs = std::get_if<ClassicalSend>(&s)) {
                    const auto *cr = std::get_if<ClassicalRecv>(&r);
                    if (!cr) {
                        add(j, recvs[m], fmt::format("expected a classical receive matching {}'s send", from.name));
                    } else if (cr->variables.size() != cs->variables.size()) {
                        add(j, recvs[m], fmt::format("receives {} value(s) but {} sends {}", cr->variables.size(),
                                                     from.name, cs->variables.size()));
                    }
                } else {
                    const auto &qs = std::get<QuantumSend>(s);
                    const auto *qr = std::get_if<QuantumRecv>(&r);
                    if (!qr) {
                        add(j, recvs[m], fmt::format("expected a quantum receive matching {}'s send", from.name));
                    } else if (qr->qubit != qs.qubit) {
                        add(j, recvs[m],
                            fmt::format("receives qubit {} but {} sends qubit {}", qr->qubit.value, from.name,
                                        qs.qubit.value));
                    }
                }
            }
            for (std::size_t m = common; m < sends.size(); ++m) {
                add(i, sends[m], fmt::format("send to {} has no matching receive", to.name));
            }
            for (std::size_t m = common; m < recvs.size(); ++m) {
                add(j, recvs[m], fmt::format("receive from {} has no matching send", from.name));
            }
        }
    }
    return issues;
}

void validate(const Network &n) {
    auto issues = static_issues(n);
    if (issues.empty()) return;
    const Issue &first = issues.front();
    std::string agent = first.agent ? n.agents[*first.agent].name : std::string("<network>");
    throw ModelError(agent, first.event.value_or(0), first.message);
}

std::vector<LabeledState> samples_from_aliases(const std::vector<std::string> &aliases) {
    std::vector<LabeledState> out;
    for (const auto &alias : aliases) {
        auto amps = qsim::named_sample(alias);
        if (!amps) {
            throw LookupError(fmt::format("unknown sample '{}' (known: {})", alias, join(qsim::named_sample_aliases())));
        }
        out.push_back({alias, *amps});
    }
    return out;
}

std::vector<LabeledState> default_samples() { return samples_from_aliases({"0", "1", "plus", "plusi"}); }

std::string RunInfo::label() const {
    std::vector<std::string> parts;
    for (const auto &in : inputs) parts.push_back(fmt::format("{}={}", in.variable, in.value));
    if (samples.size() == 1) {
        parts.push_back(fmt::format("psi={}", samples[0].label));
    } else {
        for (const auto &s : samples) parts.push_back(fmt::format("q{}={}", s.qubit.value, s.label));
    }
    return join(parts);
}

void check_configuration(const Network &n, const Configuration &c) {
    std::set<QubitId> seen;
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
        const auto &a = c.agents[i];
        if (a.pc > n.agents[i].program.size()) throw ModelError(n.agents[i].name, a.pc, "program counter out of range");
        for (QubitId q : a.owned) {
            if (!seen.insert(q).second) {
                throw ModelError(n.agents[i].name, a.pc, fmt::format("qubit {} owned twice", q.value));
            }
        }
    }
    std::vector<QubitId> all(seen.begin(), seen.end());
    if (all != c.state.qubits()) throw ModelError("<network>", 0, "owned qubits do not match the state register");
}

std::vector<Configuration> initial_configurations(const Network &n, const std::vector<LabeledState> &samples) {
    // Classical assignments: first declared input varies slowest.
    std::vector<std::vector<InputValue>> assignments{{}};
    for (const auto &agent : n.agents) {
        for (const auto &input : agent.inputs) {
            if (input.domain.empty()) throw ModelError(agent.name, 0, fmt::format("input '{}' has an empty domain", input.name));
            std::vector<std::vector<InputValue>> next;
            for (const auto &prefix : assignments) {
                for (int v : input.domain) {
                    auto extended = prefix;
                    extended.push_back({agent.name, input.name, v});
                    next.push_back(std::move(extended));
                }
            }
            assignments = std::move(next);
        }
    }

    std::vector<QubitId> qinputs;
    for (const auto &agent : n.agents) {
        qinputs.insert(qinputs.end(), agent.quantum_inputs.begin(), agent.quantum_inputs.end());
    }
    if (!qinputs.empty() && samples.empty()) throw Error("network has quantum inputs but no samples were given");

    std::vector<std::vector<SampleBinding>> sample_choices{{}};
    std::vector<std::vector<qsim::StateVector>> sample_states{{}};
    for (QubitId q : qinputs) {
        std::vector<std::vector<SampleBinding>> next_choices;
        std::vector<std::vector<qsim::StateVector>> next_states;
        for (std::size_t p = 0; p < sample_choices.size(); ++p) {
            for (const auto &sample : samples) {
                if (sample.amplitudes.size() != 2) {
                    throw QuantumError(fmt::format("sample '{}' is not a single-qubit state", sample.label));
                }
                auto choice = sample_choices[p];
                choice.push_back({q, sample.label});
                auto states = sample_states[p];
                states.push_back(qsim::make_state({q}, sample.amplitudes));
                next_choices.push_back(std::move(choice));
                next_states.push_back(std::move(states));
            }
        }
        sample_choices = std::move(next_choices);
        sample_states = std::move(next_states);
    }

    const qsim::StateVector resource = n.resource();
    std::vector<Configuration> out;
    for (const auto &assignment : assignments) {
        for (std::size_t s = 0; s < sample_choices.size(); ++s) {
            qsim::StateVector state = resource;
            for (const auto &input_state : sample_states[s]) state = qsim::tensor(state, input_state);

            Configuration c;
            c.state = state;
            for (const auto &agent : n.agents) {
                AgentState a;
                a.owned = agent.owned;
                std::sort(a.owned.begin(), a.owned.end());
                for (const auto &v : assignment) {
                    if (v.agent == agent.name) a.store[v.variable] = v.value;
                }
                c.agents.push_back(std::move(a));
            }
            auto run = std::make_shared<RunInfo>();
            run->index = out.size();
            run->inputs = assignment;
            run->samples = sample_choices[s];
            run->initial_state = state;
            c.run = std::move(run);
            check_configuration(n, c);
            out.push_back(std::move(c));
        }
    }
    return out;
}

bool is_finished(const Network &n, const Configuration &c) {
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        if (c.agents[i].pc < n.agents[i].program.size()) return false;
    }
    return true;
}

std::vector<Step> enabled_steps(const Network &n, const Configuration &c) {
    std::vector<Step> steps;
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
        const Agent &agent = n.agents[i];
        const AgentState &self = c.agents[i];
        if (self.pc >= agent.program.size()) continue;
        const Event &head = agent.program[self.pc];

        if (is_local_unitary(head)) {
            // Consecutive local unitaries of one agent form one atomic step.
            Configuration next = c;
            std::vector<std::string> parts;
            std::size_t k = self.pc;
            for (; k < agent.program.size() && is_local_unitary(agent.program[k]); ++k) {
                const Event &e = agent.program[k];
                for (QubitId q : qubits_touched(e)) require_owned(agent, k, self, q);
                if (const auto *g = std::get_if<ApplyGate>(&e)) {
                    next.state = qsim::apply_gate(next.state, g->gate, g->targets);
                } else {
                    const auto &cp = std::get<CondPauli>(e);
                    if (read_var(agent, k, self, cp.condition) % 2 != 0) {
                        next.state = qsim::apply_gate(next.state, cp.pauli == Pauli::X ? qsim::Gate::X : qsim::Gate::Z,
                                                      {cp.target});
                    }
                }
                parts.push_back(to_string(e));
            }
            next.agents[i].pc = k;
            steps.push_back({{i}, fmt::format("{}: {}", agent.name, join(parts, "; ")), {{std::move(next), 1.0, ""}}});
            continue;
        }

        if (const auto *m = std::get_if<MeasureComp>(&head)) {
            require_owned(agent, self.pc, self, m->target);
            Step step{{i}, fmt::format("{}: {}", agent.name, to_string(head)), {}};
            for (auto &branch : qsim::measure_computational(c.state, m->target)) {
                Configuration next = c;
                next.state = std::move(branch.post_state);
                write_once(agent, self.pc, next.agents[i], m->outcome, branch.outcome[0]);
                next.agents[i].pc += 1;
                step.successors.push_back({std::move(next), branch.probability, outcome_text({m->outcome}, branch.outcome)});
            }
            steps.push_back(std::move(step));
            continue;
        }

        if (const auto *m = std::get_if<MeasureBell>(&head)) {
            require_owned(agent, self.pc, self, m->first);
            require_owned(agent, self.pc, self, m->second);
            Step step{{i}, fmt::format("{}: {}", agent.name, to_string(head)), {}};
            for (auto &branch : qsim::measure_bell(c.state, m->first, m->second)) {
                Configuration next = c;
                next.state = std::move(branch.post_state);
                write_once(agent, self.pc, next.agents[i], m->outcome_first, branch.outcome[0]);
                write_once(agent, self.pc, next.agents[i], m->outcome_second, branch.outcome[1]);
                next.agents[i].pc += 1;
                step.successors.push_back({std::move(next), branch.probability,
                                           outcome_text({m->outcome_first, m->outcome_second}, branch.outcome)});
            }
            steps.push_back(std::move(step));
            continue;
        }

        // Rendezvous: generated from the sender's side when the peer's head is
        // the matching receive.
        auto peer_head = [&](const std::string &peer) -> std::pair<std::size_t, const Event *> {
            auto j = n.agent_index(peer);
            if (!j) throw ModelError(agent.name, self.pc, fmt::format("unknown peer agent '{}'", peer));
            const auto &ps = c.agents[*j];
            if (ps.pc >= n.agents[*j].program.size()) return {*j, nullptr};
            return {*j, &n.agents[*j].program[ps.pc]};
        };

        if (const auto *send = std::get_if<ClassicalSend>(&head)) {
            auto [j, other] = peer_head(send->peer);
            const auto *recv = other ? std::get_if<ClassicalRecv>(other) : nullptr;
            if (!recv || recv->peer != agent.name) continue;
            const Agent &peer = n.agents[j];
            if (recv->variables.size() != send->variables.size()) {
                throw ModelError(peer.name, c.agents[j].pc,
                                 fmt::format("receives {} value(s) but {} sends {}", recv->variables.size(),
                                             agent.name, send->variables.size()));
            }
            Configuration next = c;
            std::vector<std::string> moved;
            for (std::size_t v = 0; v < send->variables.size(); ++v) {
                const int value = read_var(agent, self.pc, self, send->variables[v]);
                write_once(peer, c.agents[j].pc, next.agents[j], recv->variables[v], value);
                moved.push_back(fmt::format("{}={}", recv->variables[v], value));
            }
            next.agents[i].pc += 1;
            next.agents[j].pc += 1;
            steps.push_back({{i, j},
                             fmt::format("{} -> {}: ({}) => ({})", agent.name, peer.name, join(send->variables, ","),
                                         join(moved, ",")),
                             {{std::move(next), 1.0, ""}}});
            continue;
        }

        if (const auto *send = std::get_if<QuantumSend>(&head)) {
            auto [j, other] = peer_head(send->peer);
            const auto *recv = other ? std::get_if<QuantumRecv>(other) : nullptr;
            if (!recv || recv->peer != agent.name) continue;
            const Agent &peer = n.agents[j];
            if (recv->qubit != send->qubit) {
                throw ModelError(peer.name, c.agents[j].pc,
                                 fmt::format("receives qubit {} but {} sends qubit {}", recv->qubit.value, agent.name,
                                             send->qubit.value));
            }
            require_owned(agent, self.pc, self, send->qubit);
            Configuration next = c;
            auto &from = next.agents[i].owned;
            from.erase(std::find(from.begin(), from.end(), send->qubit));
            auto &to = next.agents[j].owned;
            to.insert(std::upper_bound(to.begin(), to.end(), send->qubit), send->qubit);
            next.agents[i].pc += 1;
            next.agents[j].pc += 1;
            steps.push_back({{i, j},
                             fmt::format("{} -> {}: qubit {}", agent.name, peer.name, send->qubit.value),
                             {{std::move(next), 1.0, ""}}});
            continue;
        }
        // Receives are driven by the sender.
    }
    return steps;
}

namespace {

std::string structural_key(const Configuration &c) {
    std::string key;
    for (const auto &a : c.agents) {
        key += fmt::format("{}|", a.pc);
        for (QubitId q : a.owned) key += fmt::format("{},", q.value);
        key += '|';
        for (const auto &[var, value] : a.store) key += fmt::format("{}={},", var, value);
        key += ';';
    }
    return key;
}

}  // namespace

ConfigGraph build_graph(const Network &n, const std::vector<LabeledState> &samples, const BuildOptions &options) {
    ConfigGraph g;
    g.network_ = n;
    bool has_qinputs = false;
    for (const auto &a : n.agents) has_qinputs = has_qinputs || !a.quantum_inputs.empty();
    if (has_qinputs) g.samples_ = samples;

    std::size_t group = 0;
    for (auto &initial : initial_configurations(n, samples)) {
        g.runs_.push_back(initial.run);
        std::unordered_map<std::string, std::vector<NodeId>> index;

        auto intern = [&](Configuration config, std::size_t depth) -> std::pair<NodeId, bool> {
            auto &bucket = index[structural_key(config)];
            for (NodeId id : bucket) {
                if (qsim::amplitudes_close(g.nodes_[id].config.state, config.state, options.tolerance)) {
                    return {id, false};
                }
            }
            if (g.nodes_.size() >= options.max_nodes) {
                throw Error(fmt::format("configuration graph exceeds the node cap of {}", options.max_nodes));
            }
            const NodeId id = g.nodes_.size();
            g.nodes_.push_back({std::move(config), depth, NodeStatus::Running});
            g.out_.emplace_back();
            g.run_initial_.push_back(id);
            bucket.push_back(id);
            return {id, true};
        };

        const NodeId root = intern(std::move(initial), 0).first;
        std::deque<NodeId> queue{root};
        while (!queue.empty()) {
            const NodeId current = queue.front();
            queue.pop_front();
            auto steps = enabled_steps(n, g.nodes_[current].config);
            if (steps.empty()) {
                g.nodes_[current].status =
                    is_finished(n, g.nodes_[current].config) ? NodeStatus::Terminal : NodeStatus::Deadlock;
                continue;
            }
            for (auto &step : steps) {
                for (auto &succ : step.successors) {
                    auto [target, added] = intern(std::move(succ.config), g.nodes_[current].depth + 1);
                    if (added) {
                        g.run_initial_[target] = root;
                        queue.push_back(target);
                    }
                    g.out_[current].push_back(g.edges_.size());
                    g.edges_.push_back({current, target, group, succ.probability, step.label, succ.outcome});
                }
                ++group;
            }
        }
    }
    return g;
}

std::vector<NodeId> ConfigGraph::successors(NodeId id) const {
    std::vector<NodeId> out;
    for (std::size_t e : out_.at(id)) out.push_back(edges_[e].target);
    if (out.empty()) out.push_back(id);
    return out;
}

std::vector<NodeId> ConfigGraph::initial_nodes() const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (run_initial_[id] == id) out.push_back(id);
    }
    return out;
}

NodeId ConfigGraph::initial_node_of(NodeId id) const { return run_initial_.at(id); }

std::size_t ConfigGraph::terminal_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node &x) { return x.status == NodeStatus::Terminal; }));
}

std::size_t ConfigGraph::deadlock_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node &x) { return x.status == NodeStatus::Deadlock; }));
}

std::string ConfigGraph::label(NodeId id) const {
    const Node &node = nodes_.at(id);
    std::vector<std::string> outcomes;
    for (std::size_t i = 0; i < network_.agents.size(); ++i) {
        const Agent &agent = network_.agents[i];
        for (const Event &e : agent.program) {
            if (!std::holds_alternative<MeasureComp>(e) && !std::holds_alternative<MeasureBell>(e)) continue;
            for (const auto &var : variables_written(e)) {
                auto it = node.config.agents[i].store.find(var);
                if (it != node.config.agents[i].store.end()) {
                    outcomes.push_back(fmt::format("{}.{}={}", agent.name, var, it->second));
                }
            }
        }
    }
    std::string inner = node.config.run ? node.config.run->label() : std::string();
    if (!outcomes.empty()) inner += "|" + join(outcomes);
    if (inner.empty()) return fmt::format("C{}", node.depth + 1);
    return fmt::format("C{}[{}]", node.depth + 1, inner);
}

std::string ConfigGraph::store_summary(NodeId id) const {
    const Node &node = nodes_.at(id);
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < network_.agents.size(); ++i) {
        std::vector<std::string> entries;
        for (const auto &[var, value] : node.config.agents[i].store) entries.push_back(fmt::format("{}={}", var, value));
        parts.push_back(fmt::format("{}{{{}}}", network_.agents[i].name, join(entries)));
    }
    return join(parts, " ");
}

std::vector<std::vector<PathStep>> maximal_paths(const ConfigGraph &g, NodeId start) {
    std::vector<std::vector<PathStep>> paths;
    std::vector<PathStep> current{{start, std::nullopt}};
    std::vector<bool> on_path(g.size(), false);
    on_path[start] = true;

    auto dfs = [&](auto &&self, NodeId node) -> void {
        bool extended = false;
        for (std::size_t e : g.out_edges(node)) {
            const NodeId next = g.edges()[e].target;
            if (on_path[next]) continue;
            extended = true;
            on_path[next] = true;
            current.push_back({next, e});
            self(self, next);
            current.pop_back();
            on_path[next] = false;
        }
        if (!extended) paths.push_back(current);
    };
    dfs(dfs, start);
    return paths;
}

}  // namespace qknow::netsem
