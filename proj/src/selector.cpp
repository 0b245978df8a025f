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

#include <fmt/format.h>

#include "qknow/frontends.hpp"

namespace qknow::frontends {

namespace {

using netsem::ConfigGraph;
using netsem::NodeId;

int parse_value(const SelectorFilter &f) {
    int v = 0;
    auto res = std::from_chars(f.value.data(), f.value.data() + f.value.size(), v);
    if (res.ec != std::errc() || res.ptr != f.value.data() + f.value.size()) {
        throw LookupError(fmt::format("{}: filter {}: expected an integer value", f.span.str(), f.key));
    }
    return v;
}

/// A compiled filter: a predicate over nodes.
struct Matcher {
    enum class Kind { Input, Sample, Store } kind;
    std::string agent;
    std::string key;
    std::optional<int> qubit;  // for Sample; empty means the only sampled qubit
    std::string label;
    int value = 0;
    std::size_t agent_index = 0;

    bool matches(const ConfigGraph &g, NodeId id) const {
        const auto &c = g.node(id).config;
        switch (kind) {
            case Kind::Input:
                for (const auto &in : c.run->inputs) {
                    if (in.variable == key && (agent.empty() || in.agent == agent)) return in.value == value;
                }
                return false;
            case Kind::Sample:
                for (const auto &s : c.run->samples) {
                    if (!qubit || s.qubit.value == *qubit) return s.label == label;
                }
                return false;
            case Kind::Store: {
                const auto &store = c.agents[agent_index].store;
                auto it = store.find(key);
                return it != store.end() && it->second == value;
            }
        }
        return false;
    }
};

Matcher compile(const SelectorFilter &f, const ConfigGraph &g) {
    const auto &net = g.network();
    Matcher m;
    m.key = f.key;
    if (!f.agent.empty()) {
        const auto idx = net.agent_index(f.agent);
        if (!idx) throw LookupError(fmt::format("{}: unknown agent '{}'", f.span.str(), f.agent));
        try {
            logic::check_scope(logic::Defined(f.agent, f.key), net);
        } catch (const LookupError &e) {
            throw LookupError(fmt::format("{}: {}", f.span.str(), e.what()));
        }
        m.kind = Matcher::Kind::Store;
        m.agent = f.agent;
        m.agent_index = *idx;
        m.value = parse_value(f);
        return m;
    }

    const bool psi = f.key == "psi";
    const bool qubit_key = f.key.size() > 1 && f.key[0] == 'q' &&
                           std::all_of(f.key.begin() + 1, f.key.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (psi || qubit_key) {
        std::vector<int> sampled;
        for (const auto &a : net.agents) {
            for (auto q : a.quantum_inputs) sampled.push_back(q.value);
        }
        if (sampled.empty()) throw LookupError(fmt::format("{}: network has no quantum inputs", f.span.str()));
        m.kind = Matcher::Kind::Sample;
        if (qubit_key) {
            const int q = std::stoi(f.key.substr(1));
            if (std::find(sampled.begin(), sampled.end(), q) == sampled.end()) {
                throw LookupError(fmt::format("{}: qubit {} is not a quantum input", f.span.str(), f.key));
            }
            m.qubit = q;
        } else if (sampled.size() > 1) {
            throw LookupError(fmt::format("{}: psi is ambiguous with several quantum inputs; use qN=...", f.span.str()));
        }
        const auto &samples = g.samples();
        if (std::none_of(samples.begin(), samples.end(), [&](const auto &s) { return s.label == f.value; })) {
            throw LookupError(fmt::format("{}: no sample labelled '{}'", f.span.str(), f.value));
        }
        m.label = f.value;
        return m;
    }

    for (const auto &a : net.agents) {
        for (const auto &in : a.inputs) {
            if (in.name != f.key) continue;
            m.kind = Matcher::Kind::Input;
            m.value = parse_value(f);
            if (std::find(in.domain.begin(), in.domain.end(), m.value) == in.domain.end()) {
                throw LookupError(fmt::format("{}: value {} outside the domain of input {}", f.span.str(), m.value, f.key));
            }
            return m;
        }
    }
    throw LookupError(fmt::format("{}: unknown run key '{}'", f.span.str(), f.key));
}

}  // namespace

std::vector<NodeId> resolve(const Selector &s, const ConfigGraph &g) {
    std::vector<Matcher> matchers;
    for (const auto &f : s.filters) matchers.push_back(compile(f, g));

    std::vector<NodeId> out;
    for (NodeId id = 0; id < g.size(); ++id) {
        bool base_ok = false;
        switch (s.base) {
            case Selector::Base::All: base_ok = true; break;
            case Selector::Base::Initial: base_ok = g.node(id).depth == 0; break;
            case Selector::Base::Stage: base_ok = g.stage(id) == s.stage; break;
            case Selector::Base::Terminal: base_ok = g.is_terminal(id); break;
        }
        if (!base_ok) continue;
        if (std::all_of(matchers.begin(), matchers.end(), [&](const Matcher &m) { return m.matches(g, id); })) {
            out.push_back(id);
        }
    }
    if (out.empty()) throw LookupError(fmt::format("selector '{}' matches no configuration", to_string(s)));
    return out;
}

}  // namespace qknow::frontends
