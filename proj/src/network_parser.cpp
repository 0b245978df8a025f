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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lexer.hpp"
#include "qknow/frontends.hpp"

namespace qknow::frontends {

using netsem::QubitId;

namespace {

class NetworkParser {
 public:
    NetworkParser(std::string_view text, const std::string &file) : ts_(tokenize(text, file)), file_(file) {}

    netsem::Network parse() {
        ts_.expect_word("network", "network header");
        name_span_ = ts_.peek().span;
        net_.name = ts_.expect_ident("network header");
        ts_.expect(TokenKind::LBrace, "network header");
        bool saw_qubits = false;
        while (!ts_.at(TokenKind::RBrace)) {
            if (ts_.at_word("qubits")) {
                const Token &kw = ts_.next();
                if (saw_qubits) ts_.fail_at(kw, "duplicate 'qubits' declaration");
                saw_qubits = true;
                net_.declared_qubits = ts_.expect_int("qubits declaration");
                if (net_.declared_qubits < 0) ts_.fail_at(kw, "qubit count must be non-negative");
                ts_.expect(TokenKind::Semicolon, "qubits declaration");
            } else if (ts_.at_word("resource")) {
                ts_.next();
                parse_resource();
            } else if (ts_.at_word("agent")) {
                ts_.next();
                parse_agent();
            } else {
                ts_.fail(fmt::format("in network body: unexpected '{}'", ts_.peek().text),
                         {"'qubits'", "'resource'", "'agent'", "'}'"});
            }
        }
        ts_.expect(TokenKind::RBrace, "network body");
        ts_.expect(TokenKind::End, "network file");
        if (!saw_qubits) {
            // Without an explicit declaration the owned ids define the register.
            int highest = 0;
            for (const auto &a : net_.agents) {
                for (QubitId q : a.owned) highest = std::max(highest, q.value);
            }
            net_.declared_qubits = highest;
        }
        report_issues();
        return std::move(net_);
    }

 private:
    std::vector<QubitId> parse_qubit_list(std::string_view context) {
        std::vector<QubitId> out{QubitId{ts_.expect_int(context)}};
        while (ts_.accept(TokenKind::Comma)) out.push_back(QubitId{ts_.expect_int(context)});
        return out;
    }

    std::vector<std::string> parse_ident_list(std::string_view context) {
        std::vector<std::string> out{ts_.expect_ident(context)};
        while (ts_.accept(TokenKind::Comma)) out.push_back(ts_.expect_ident(context));
        return out;
    }

    qsim::Complex parse_complex(std::string_view context) {
        ts_.expect(TokenKind::LParen, context);
        const double re = ts_.expect_number(context);
        ts_.expect(TokenKind::Comma, context);
        const double im = ts_.expect_number(context);
        ts_.expect(TokenKind::RParen, context);
        return {re, im};
    }

    void parse_resource() {
        netsem::ResourcePart part;
        const Token &start = ts_.peek();
        if (ts_.accept_word("ebit")) {
            part.kind = netsem::ResourcePart::Kind::Ebit;
            ts_.expect(TokenKind::LParen, "ebit resource");
            part.qubits = parse_qubit_list("ebit resource");
            if (part.qubits.size() != 2) ts_.fail_at(start, "ebit takes exactly two qubits");
            ts_.expect(TokenKind::RParen, "ebit resource");
        } else if (ts_.accept_word("amps")) {
            part.kind = netsem::ResourcePart::Kind::Amplitudes;
            ts_.expect(TokenKind::LBracket, "amplitude resource");
            part.amplitudes.push_back(parse_complex("amplitude resource"));
            while (ts_.accept(TokenKind::Comma)) part.amplitudes.push_back(parse_complex("amplitude resource"));
            ts_.expect(TokenKind::RBracket, "amplitude resource");
            ts_.expect_word("on", "amplitude resource");
            ts_.expect(TokenKind::LParen, "amplitude resource");
            part.qubits = parse_qubit_list("amplitude resource");
            ts_.expect(TokenKind::RParen, "amplitude resource");
            try {
                qsim::make_state(part.qubits, part.amplitudes);
            } catch (const QuantumError &e) {
                ts_.fail_at(start, fmt::format("invalid resource state: {}", e.what()));
            }
        } else {
            ts_.fail("in resource: unknown resource kind", {"'ebit'", "'amps'"});
        }
        ts_.expect(TokenKind::Semicolon, "resource declaration");
        net_.resource_parts.push_back(std::move(part));
        resource_spans_.push_back(start.span);
    }

    void parse_agent() {
        netsem::Agent agent;
        agent_spans_.push_back(ts_.peek().span);
        agent.name = ts_.expect_ident("agent declaration");
        if (ts_.accept_word("owns")) {
            if (!ts_.at(TokenKind::LBrace)) agent.owned = parse_qubit_list("agent ownership");
        }
        std::sort(agent.owned.begin(), agent.owned.end());
        ts_.expect(TokenKind::LBrace, "agent declaration");
        bool saw_program = false;
        while (!ts_.at(TokenKind::RBrace)) {
            if (ts_.accept_word("input")) {
                netsem::ClassicalInput in;
                in.name = ts_.expect_ident("input declaration");
                ts_.expect(TokenKind::Colon, "input declaration");
                if (ts_.accept_word("bit")) {
                    in.domain = {0, 1};
                } else if (ts_.accept(TokenKind::LBrace)) {
                    in.domain.push_back(ts_.expect_int("input domain"));
                    while (ts_.accept(TokenKind::Comma)) in.domain.push_back(ts_.expect_int("input domain"));
                    ts_.expect(TokenKind::RBrace, "input domain");
                } else {
                    ts_.fail("in input declaration: expected a domain", {"'bit'", "'{'"});
                }
                ts_.expect(TokenKind::Semicolon, "input declaration");
                agent.inputs.push_back(std::move(in));
            } else if (ts_.accept_word("qinput")) {
                agent.quantum_inputs.push_back(QubitId{ts_.expect_int("quantum input declaration")});
                ts_.expect(TokenKind::Semicolon, "quantum input declaration");
            } else if (ts_.at_word("program")) {
                const Token &kw = ts_.next();
                if (saw_program) ts_.fail_at(kw, fmt::format("agent {} has two programs", agent.name));
                saw_program = true;
                ts_.expect(TokenKind::LBrace, "program");
                while (!ts_.at(TokenKind::RBrace)) {
                    agent.event_spans.push_back(ts_.peek().span);
                    agent.program.push_back(parse_event());
                }
                ts_.expect(TokenKind::RBrace, "program");
            } else {
                ts_.fail(fmt::format("in agent {}: unexpected '{}'", agent.name, ts_.peek().text),
                         {"'input'", "'qinput'", "'program'", "'}'"});
            }
        }
        ts_.expect(TokenKind::RBrace, "agent declaration");
        net_.agents.push_back(std::move(agent));
    }

    netsem::Event parse_event() {
        const Token &head = ts_.peek();
        netsem::Event event;
        if (head.kind == TokenKind::LParen) {
            ts_.next();
            const std::string a = ts_.expect_ident("Bell measurement outcomes");
            ts_.expect(TokenKind::Comma, "Bell measurement outcomes");
            const std::string b = ts_.expect_ident("Bell measurement outcomes");
            ts_.expect(TokenKind::RParen, "Bell measurement outcomes");
            ts_.expect(TokenKind::Assign, "Bell measurement");
            ts_.expect_word("bell", "Bell measurement");
            ts_.expect(TokenKind::LParen, "Bell measurement");
            const int q1 = ts_.expect_int("Bell measurement");
            ts_.expect(TokenKind::Comma, "Bell measurement");
            const int q2 = ts_.expect_int("Bell measurement");
            ts_.expect(TokenKind::RParen, "Bell measurement");
            event = netsem::MeasureBell{QubitId{q1}, QubitId{q2}, a, b};
        } else if (head.kind != TokenKind::Ident) {
            ts_.fail("in program: expected an event", {"gate", "'condX'", "'condZ'", "'csend'", "'crecv'",
                                                       "'qsend'", "'qrecv'", "measurement"});
        } else if (auto gate = qsim::gate_from_name(head.text); gate && ts_.at(TokenKind::LParen, 1)) {
            ts_.next();
            ts_.expect(TokenKind::LParen, "gate");
            auto targets = parse_qubit_list("gate");
            ts_.expect(TokenKind::RParen, "gate");
            if (targets.size() != qsim::gate_arity(*gate)) {
                ts_.fail_at(head, fmt::format("gate {} takes {} qubit(s), got {}", head.text,
                                              qsim::gate_arity(*gate), targets.size()));
            }
            event = netsem::ApplyGate{*gate, std::move(targets)};
        } else if ((head.text == "condX" || head.text == "condZ") && ts_.at(TokenKind::LParen, 1)) {
            ts_.next();
            ts_.expect(TokenKind::LParen, "conditional Pauli");
            const int q = ts_.expect_int("conditional Pauli");
            ts_.expect(TokenKind::Comma, "conditional Pauli");
            std::string var = ts_.expect_ident("conditional Pauli");
            ts_.expect(TokenKind::RParen, "conditional Pauli");
            event = netsem::CondPauli{head.text == "condX" ? netsem::Pauli::X : netsem::Pauli::Z, QubitId{q},
                                      std::move(var)};
        } else if (head.text == "csend" || head.text == "crecv") {
            ts_.next();
            const bool send = head.text == "csend";
            ts_.expect(TokenKind::LParen, "classical message");
            auto vars = parse_ident_list("classical message");
            ts_.expect(TokenKind::RParen, "classical message");
            ts_.expect(send ? TokenKind::Arrow : TokenKind::LArrow, "classical message");
            std::string peer = ts_.expect_ident("classical message");
            if (send) {
                event = netsem::ClassicalSend{std::move(peer), std::move(vars)};
            } else {
                event = netsem::ClassicalRecv{std::move(peer), std::move(vars)};
            }
        } else if (head.text == "qsend" || head.text == "qrecv") {
            ts_.next();
            const bool send = head.text == "qsend";
            const int q = ts_.expect_int("quantum message");
            ts_.expect(send ? TokenKind::Arrow : TokenKind::LArrow, "quantum message");
            std::string peer = ts_.expect_ident("quantum message");
            if (send) {
                event = netsem::QuantumSend{std::move(peer), QubitId{q}};
            } else {
                event = netsem::QuantumRecv{std::move(peer), QubitId{q}};
            }
        } else if (ts_.at(TokenKind::Assign, 1)) {
            std::string var = ts_.next().text;
            ts_.next();
            ts_.expect_word("measure", "measurement");
            ts_.expect(TokenKind::LParen, "measurement");
            const int q = ts_.expect_int("measurement");
            ts_.expect(TokenKind::RParen, "measurement");
            event = netsem::MeasureComp{QubitId{q}, std::move(var)};
        } else {
            ts_.fail(fmt::format("in program: unknown event '{}'", head.text),
                     {"gate", "'condX'", "'condZ'", "'csend'", "'crecv'", "'qsend'", "'qrecv'", "measurement"});
        }
        ts_.expect(TokenKind::Semicolon, "event");
        return event;
    }

    void report_issues() {
        auto issues = netsem::static_issues(net_);
        if (issues.empty()) return;
        const auto &issue = issues.front();
        SourceSpan span = name_span_;
        if (issue.agent) {
            const auto &agent = net_.agents[*issue.agent];
            span = agent_spans_[*issue.agent];
            if (issue.event && *issue.event < agent.event_spans.size()) span = agent.event_spans[*issue.event];
        } else if (!resource_spans_.empty() && issue.message.find("resource") != std::string::npos) {
            span = resource_spans_.front();
        }
        throw ParseError(span, issue.message);
    }

    TokenStream ts_;
    std::string file_;
    netsem::Network net_;
    SourceSpan name_span_;
    std::vector<SourceSpan> agent_spans_;
    std::vector<SourceSpan> resource_spans_;
};

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_ints(const std::vector<QubitId> &qs) {
    std::string out;
    for (std::size_t i = 0; i < qs.size(); ++i) out += (i ? ", " : "") + std::to_string(qs[i].value);
    return out;
}

}  // namespace

netsem::Network parse_network(std::string_view text, const std::string &file) {
    return NetworkParser(text, file).parse();
}

std::string print_network(const netsem::Network &n) {
    std::string out = fmt::format("network {} {{\n", n.name);
    out += fmt::format("  qubits {};\n", n.declared_qubits);
    for (const auto &part : n.resource_parts) {
        if (part.kind == netsem::ResourcePart::Kind::Ebit) {
            out += fmt::format("  resource ebit({});\n", join_ints(part.qubits));
        } else {
            std::string amps;
            for (std::size_t i = 0; i < part.amplitudes.size(); ++i) {
                amps += fmt::format("{}({}, {})", i ? ", " : "", format_double(part.amplitudes[i].real()),
                                    format_double(part.amplitudes[i].imag()));
            }
            out += fmt::format("  resource amps[{}] on ({});\n", amps, join_ints(part.qubits));
        }
    }
    for (const auto &agent : n.agents) {
        out += fmt::format("  agent {}", agent.name);
        if (!agent.owned.empty()) out += fmt::format(" owns {}", join_ints(agent.owned));
        out += " {\n";
        for (const auto &in : agent.inputs) {
            if (in.domain == std::vector<int>{0, 1}) {
                out += fmt::format("    input {}: bit;\n", in.name);
            } else {
                std::string dom;
                for (std::size_t i = 0; i < in.domain.size(); ++i) dom += (i ? ", " : "") + std::to_string(in.domain[i]);
                out += fmt::format("    input {}: {{{}}};\n", in.name, dom);
            }
        }
        for (QubitId q : agent.quantum_inputs) out += fmt::format("    qinput {};\n", q.value);
        out += "    program {\n";
        for (const auto &e : agent.program) out += fmt::format("      {};\n", netsem::to_string(e));
        out += "    }\n  }\n";
    }
    out += "}\n";
    return out;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace qknow::frontends
