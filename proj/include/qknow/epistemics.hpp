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

#include <cstddef>
#include <string>
#include <vector>

#include "qknow/netsem.hpp"

namespace qknow::epistemics {

using netsem::NodeId;

struct EquivalenceClass {
    netsem::LocalStore store;  // the agent's store shared by every member
    std::size_t pc = 0;        // remaining program is program[pc..]
    std::vector<NodeId> members;  // ascending
};

/// The possibility relation of one agent: configurations are equivalent iff
/// the agent's local store and remaining event sequence coincide. Classes span
/// all runs (every classical input and every quantum sample).
class PossibilityPartition {
 public:
    PossibilityPartition() = default;
    PossibilityPartition(std::string agent, std::vector<EquivalenceClass> classes, std::vector<std::size_t> class_of);

    const std::string &agent() const { return agent_; }
    const std::vector<EquivalenceClass> &classes() const { return classes_; }
    std::size_t class_of(NodeId node) const { return class_of_.at(node); }
    const std::vector<NodeId> &equivalents(NodeId node) const { return classes_[class_of(node)].members; }
    bool equivalent(NodeId a, NodeId b) const { return class_of(a) == class_of(b); }

 private:
    std::string agent_;
    std::vector<EquivalenceClass> classes_;  // ordered by smallest member
    std::vector<std::size_t> class_of_;
};

PossibilityPartition possibility_partition(const netsem::ConfigGraph &g, const std::string &agent);

/// One partition per agent, in network order.
std::vector<PossibilityPartition> all_partitions(const netsem::ConfigGraph &g);

/// Human-readable class key: "{x1=0,x2=1} / [qsend 1 -> B]".
std::string describe_key(const netsem::ConfigGraph &g, const PossibilityPartition &p, std::size_t class_index);

}  // namespace qknow::epistemics
