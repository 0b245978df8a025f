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

#include "qknow/epistemics.hpp"

#include <map>

#include <fmt/format.h>

namespace qknow::epistemics {

PossibilityPartition::PossibilityPartition(std::string agent, std::vector<EquivalenceClass> classes,
                                           std::vector<std::size_t> class_of)
    : agent_(std::move(agent)), classes_(std::move(classes)), class_of_(std::move(class_of)) {}

PossibilityPartition possibility_partition(const netsem::ConfigGraph &g, const std::string &agent) {
    const auto index = g.network().agent_index(agent);
    if (!index) throw LookupError(fmt::format("unknown agent '{}'", agent));

    // The remaining program is always a suffix of the agent's fixed program, so
    // suffixes are syntactically equal exactly when their start offsets are.
    std::map<std::pair<netsem::LocalStore, std::size_t>, std::size_t> by_key;
    std::vector<EquivalenceClass> classes;
    std::vector<std::size_t> class_of(g.size());
    for (NodeId id = 0; id < g.size(); ++id) {
        const auto &state = g.node(id).config.agents[*index];
        auto [it, fresh] = by_key.try_emplace({state.store, state.pc}, classes.size());
        if (fresh) classes.push_back({state.store, state.pc, {}});
        classes[it->second].members.push_back(id);
        class_of[id] = it->second;
    }
    return {agent, std::move(classes), std::move(class_of)};
}

std::vector<PossibilityPartition> all_partitions(const netsem::ConfigGraph &g) {
    std::vector<PossibilityPartition> out;
    for (const auto &a : g.network().agents) out.push_back(possibility_partition(g, a.name));
    return out;
}

std::string describe_key(const netsem::ConfigGraph &g, const PossibilityPartition &p, std::size_t class_index) {
    const auto &cls = p.classes().at(class_index);
    const auto &program = g.network().agent(p.agent()).program;
    std::string store;
    for (const auto &[var, value] : cls.store) {
        if (!store.empty()) store += ",";
        store += fmt::format("{}={}", var, value);
    }
    std::string suffix;
    for (std::size_t k = cls.pc; k < program.size(); ++k) {
        if (!suffix.empty()) suffix += "; ";
        suffix += netsem::to_string(program[k]);
    }
    return fmt::format("{{{}}} / [{}]", store, suffix);
}

}  // namespace qknow::epistemics
