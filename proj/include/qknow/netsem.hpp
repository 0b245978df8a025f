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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qknow/error.hpp"
#include "qknow/qsim.hpp"

namespace qknow::netsem {

using qsim::QubitId;

enum class Pauli { X, Z };

struct ApplyGate {
    qsim::Gate gate;
    std::vector<QubitId> targets;
    bool operator==(const ApplyGate &) const = default;
};

/// Pauli^value on target, where value is read from the agent's store.
struct CondPauli {
    Pauli pauli;
    QubitId target;
    std::string condition;
    bool operator==(const CondPauli &) const = default;
};

struct MeasureComp {
    QubitId target;
    std::string outcome;
    bool operator==(const MeasureComp &) const = default;
};

struct MeasureBell {
    QubitId first;
    QubitId second;
    std::string outcome_first;   // phase bit
    std::string outcome_second;  // bit-flip bit
    bool operator==(const MeasureBell &) const = default;
};

struct ClassicalSend {
    std::string peer;
    std::vector<std::string> variables;
    bool operator==(const ClassicalSend &) const = default;
};

struct ClassicalRecv {
    std::string peer;
    std::vector<std::string> variables;
    bool operator==(const ClassicalRecv &) const = default;
};

struct QuantumSend {
    std::string peer;
    QubitId qubit;
    bool operator==(const QuantumSend &) const = default;
};

struct QuantumRecv {
    std::string peer;
    QubitId qubit;
    bool operator==(const QuantumRecv &) const = default;
};

using Event = std::variant<ApplyGate, CondPauli, MeasureComp, MeasureBell, ClassicalSend, ClassicalRecv,
                           QuantumSend, QuantumRecv>;

/// Renders an event in the protocol-description syntax, without the trailing ';'.
std::string to_string(const Event &e);

/// Gates and conditional Paulis: deterministic operations on owned qubits.
bool is_local_unitary(const Event &e);
std::vector<std::string> variables_read(const Event &e);
std::vector<std::string> variables_written(const Event &e);
std::vector<QubitId> qubits_touched(const Event &e);

struct ClassicalInput {
    std::string name;
    std::vector<int> domain;
    bool operator==(const ClassicalInput &) const = default;
};

struct Agent {
    std::string name;
    std::vector<QubitId> owned;  // sorted
    std::vector<ClassicalInput> inputs;
    std::vector<QubitId> quantum_inputs;
    std::vector<Event> program;  // execution order
    std::vector<SourceSpan> event_spans;  // parallel to program when parsed from text

    bool operator==(const Agent &o) const {
        return name == o.name && owned == o.owned && inputs == o.inputs && quantum_inputs == o.quantum_inputs &&
               program == o.program;
    }
};

/// One tensor factor of the shared resource, remembered in its source form.
struct ResourcePart {
    enum class Kind { Ebit, Amplitudes };
    Kind kind = Kind::Ebit;
    std::vector<QubitId> qubits;
    std::vector<qsim::Complex> amplitudes;  // Amplitudes only, as written
    bool operator==(const ResourcePart &) const = default;
};

struct Network {
    std::string name;
    int declared_qubits = 0;  // ids 1..declared_qubits
    std::vector<Agent> agents;
    std::vector<ResourcePart> resource_parts;

    std::optional<std::size_t> agent_index(std::string_view agent_name) const;
    const Agent &agent(std::string_view agent_name) const;

    /// Tensor product of the resource parts.
    qsim::StateVector resource() const;

    bool operator==(const Network &) const = default;
};

/// A violated static invariant. `event` is set when the problem is tied to one
/// event of the agent's program.
struct Issue {
    std::optional<std::size_t> agent;
    std::optional<std::size_t> event;
    std::string message;
};

/// Checks the static invariants: unique names, disjoint ownership covering the
/// declared qubits, resource/input coverage, def-before-use, write-once
/// variables, ownership of operated qubits along each program, and matched
/// rendezvous pairs.
std::vector<Issue> static_issues(const Network &n);

/// Throws ModelError with the first issue.
void validate(const Network &n);

using LocalStore = std::map<std::string, int>;

struct AgentState {
    LocalStore store;
    std::size_t pc = 0;  // remaining program = program[pc..]
    std::vector<QubitId> owned;
    bool operator==(const AgentState &) const = default;
};

struct LabeledState {
    std::string label;
    std::vector<qsim::Complex> amplitudes;  // single qubit
};

/// Resolves aliases (0, 1, plus, minus, plusi, minusi) to labeled samples.
std::vector<LabeledState> samples_from_aliases(const std::vector<std::string> &aliases);
std::vector<LabeledState> default_samples();

struct InputValue {
    std::string agent;
    std::string variable;
    int value;
    bool operator==(const InputValue &) const = default;
};

struct SampleBinding {
    QubitId qubit;
    std::string label;
    bool operator==(const SampleBinding &) const = default;
};

/// Metadata shared by every configuration of one protocol run.
struct RunInfo {
    std::size_t index = 0;
    std::vector<InputValue> inputs;
    std::vector<SampleBinding> samples;
    qsim::StateVector initial_state;

    /// e.g. "x1=0,x2=1" or "psi=plus".
    std::string label() const;
};

struct Configuration {
    qsim::StateVector state;
    std::vector<AgentState> agents;
    std::shared_ptr<const RunInfo> run;
};

/// Checks the per-configuration invariants (ownership partition and
/// state/ownership agreement). Throws ModelError when violated.
void check_configuration(const Network &n, const Configuration &c);

std::vector<Configuration> initial_configurations(const Network &n, const std::vector<LabeledState> &samples);

struct Successor {
    Configuration config;
    double probability = 1.0;
    std::string outcome;  // "s1=0,s2=1" for measurements, empty otherwise
};

struct Step {
    std::vector<std::size_t> agents;  // acting agent indices
    std::string label;
    std::vector<Successor> successors;
};

/// Every enabled step at c. Empty iff c is terminal or deadlocked.
std::vector<Step> enabled_steps(const Network &n, const Configuration &c);

bool is_finished(const Network &n, const Configuration &c);

using NodeId = std::size_t;

enum class NodeStatus { Running, Terminal, Deadlock };

struct Node {
    Configuration config;
    std::size_t depth = 0;
    NodeStatus status = NodeStatus::Running;
};

struct Edge {
    NodeId source;
    NodeId target;
    std::size_t group;  // edges from one step share a group
    double probability;
    std::string label;
    std::string outcome;
};

struct BuildOptions {
    double tolerance = qsim::kCompareTolerance;
    std::size_t max_nodes = 100000;
};

class ConfigGraph {
 public:
    const Network &network() const { return network_; }
    const std::vector<std::shared_ptr<const RunInfo>> &runs() const { return runs_; }
    const std::vector<Node> &nodes() const { return nodes_; }
    const std::vector<Edge> &edges() const { return edges_; }
    const std::vector<LabeledState> &samples() const { return samples_; }
    const Node &node(NodeId id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<std::size_t> &out_edges(NodeId id) const { return out_.at(id); }
    /// Successors in the total transition relation: nodes without proper
    /// successors (terminal or deadlocked) loop on themselves.
    std::vector<NodeId> successors(NodeId id) const;
    std::vector<NodeId> initial_nodes() const;
    NodeId initial_node_of(NodeId id) const;

    bool is_terminal(NodeId id) const { return nodes_.at(id).status == NodeStatus::Terminal; }
    bool is_deadlocked(NodeId id) const { return nodes_.at(id).status == NodeStatus::Deadlock; }
    std::size_t stage(NodeId id) const { return nodes_.at(id).depth + 1; }

    std::size_t terminal_count() const;
    std::size_t deadlock_count() const;

    /// Stage and run label, e.g. "C3[x1=0,x2=1]" or "C2[psi=plus|A.s1=0,A.s2=1]";
    /// the part after '|' lists measurement outcomes recorded so far.
    std::string label(NodeId id) const;
    std::string store_summary(NodeId id) const;

 private:
    friend ConfigGraph build_graph(const Network &, const std::vector<LabeledState> &, const BuildOptions &);

    Network network_;
    std::vector<LabeledState> samples_;
    std::vector<std::shared_ptr<const RunInfo>> runs_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<NodeId> run_initial_;
};

/// Breadth-first closure of enabled_steps from every initial configuration.
/// Structurally identical configurations of the same run are merged.
ConfigGraph build_graph(const Network &n, const std::vector<LabeledState> &samples = default_samples(),
                        const BuildOptions &options = {});

struct PathStep {
    NodeId node;
    std::optional<std::size_t> via_edge;  // edge entering `node`
};

/// Every maximal path from `start` following proper edges. Paths end at nodes
/// without outgoing edges, or just before a node already on the path.
std::vector<std::vector<PathStep>> maximal_paths(const ConfigGraph &g, NodeId start);

}  // namespace qknow::netsem
