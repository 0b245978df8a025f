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
#include <unordered_map>
#include <variant>
#include <vector>

#include "qknow/epistemics.hpp"
#include "qknow/netsem.hpp"
#include "qknow/qsim.hpp"

namespace qknow::logic {

using netsem::NodeId;
using qsim::QubitId;

struct VarTerm {
    std::string agent;
    std::string variable;
    bool operator==(const VarTerm &) const = default;
};

struct BitLit {
    int value = 0;
    bool operator==(const BitLit &) const = default;
};

/// Current reduced state of a qubit.
struct QubitRef {
    QubitId qubit;
    bool operator==(const QubitRef &) const = default;
};

/// Reduced state of a qubit in the evaluating world's own initial configuration.
struct InitQubit {
    QubitId qubit;
    bool operator==(const InitQubit &) const = default;
};

/// A fixed single-qubit state, identical in every world. `label` is a sample
/// alias ("plus") or empty when the literal was written as amplitudes.
struct RigidState {
    std::string label;
    std::vector<qsim::Complex> amplitudes;
    bool operator==(const RigidState &) const = default;
};

using Term = std::variant<VarTerm, BitLit, QubitRef, InitQubit, RigidState>;

bool is_quantum(const Term &t);
std::string to_string(const Term &t);

/// Builds a rigid state from an alias; throws LookupError for unknown aliases.
RigidState rigid_state(const std::string &alias);
/// Builds a rigid state from amplitudes; throws QuantumError unless normalized.
RigidState rigid_state(std::vector<qsim::Complex> amplitudes);

enum class Op { True, False, Terminal, Defined, Eq, Not, And, Or, Know, AG, EG, AF, EF, AX, EX };

bool is_temporal(Op op);
bool is_atomic(Op op);

class Formula {
 public:
    Op op() const { return node_->op; }
    const Term &lhs() const { return *node_->lhs; }
    const Term &rhs() const { return *node_->rhs; }
    /// Agent of Know or Defined.
    const std::string &agent() const { return node_->agent; }
    /// Variable of Defined.
    const std::string &variable() const { return node_->variable; }
    const std::vector<Formula> &children() const { return node_->children; }
    const Formula &child(std::size_t i = 0) const { return node_->children.at(i); }

    bool operator==(const Formula &o) const;

    static Formula make(Op op, std::vector<Formula> children = {}, std::string agent = {}, std::string variable = {},
                        std::optional<Term> lhs = {}, std::optional<Term> rhs = {});

 private:
    struct Node {
        Op op;
        std::optional<Term> lhs, rhs;
        std::string agent, variable;
        std::vector<Formula> children;
    };
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

std::string to_string(const Formula &f);

/// Every distinct subformula, children before parents.
std::vector<Formula> subformulas(const Formula &f);

// Constructors with the obvious meanings.
Formula True();
Formula False();
Formula Terminal();
Formula Defined(std::string agent, std::string variable);
Formula Eq(Term a, Term b);
Formula Not(Formula f);
Formula And(Formula a, Formula b);
Formula Or(Formula a, Formula b);
Formula Know(std::string agent, Formula f);
Formula AG(Formula f);
Formula EG(Formula f);
Formula AF(Formula f);
Formula EF(Formula f);
Formula AX(Formula f);
Formula EX(Formula f);
Formula Temporal(Op op, Formula f);

VarTerm Var(std::string agent, std::string variable);
BitLit Bit(int value);
QubitRef Qubit(int id);
InitQubit Init(int id);

/// Throws LookupError when the formula names an unknown agent, variable or
/// qubit, or compares a classical with a quantum term.
void check_scope(const Formula &f, const netsem::Network &n);

struct CheckOptions {
    double tolerance = qsim::kCompareTolerance;
};

struct Evidence {
    enum class Kind {
        None,
        EquivalentNode,      // a world the agent cannot rule out, where the body fails
        Successor,           // successor witnessing EX / refuting AX
        WitnessPath,         // path witnessing EF / EG
        CounterexamplePath,  // path refuting AG / AF
    };
    Kind kind = Kind::None;
    std::vector<NodeId> nodes;
    std::string note;

    bool operator==(const Evidence &) const = default;
};

std::string to_string(Evidence::Kind k);
std::string describe(const netsem::ConfigGraph &g, const Evidence &e);

struct CheckResult {
    bool holds = false;
    Evidence evidence;
    /// Satisfying node set of every subformula, keyed by its printed form.
    std::map<std::string, std::vector<NodeId>> satisfying;
};

/// Bottom-up labeling model checker with one label set per distinct subformula.
class ModelChecker {
 public:
    ModelChecker(const netsem::ConfigGraph &g, std::vector<epistemics::PossibilityPartition> partitions,
                 CheckOptions options = {});

    const netsem::ConfigGraph &graph() const { return graph_; }
    const epistemics::PossibilityPartition &partition(const std::string &agent) const;

    /// Label set of f over all nodes.
    const std::vector<bool> &labels(const Formula &f);
    bool holds(const Formula &f, NodeId at) { return labels(f).at(at); }

    CheckResult check(const Formula &f, NodeId at);

    /// Evidence that f evaluates to `value` at `at` (which must be the case).
    Evidence explain(const Formula &f, NodeId at, bool value);

    bool eval_atomic(const Formula &f, NodeId at);

    std::size_t memo_size() const { return memo_.size(); }

 private:
    std::vector<bool> compute(const Formula &f);
    const qsim::DensityMatrix &qubit_density(NodeId node, QubitId q, bool initial);
    std::optional<int> classical_value(const Term &t, NodeId node) const;
    qsim::DensityMatrix quantum_value(const Term &t, NodeId node);
    std::vector<NodeId> path_to(NodeId from, const std::vector<bool> &target) const;
    std::vector<NodeId> lasso_within(NodeId from, const std::vector<bool> &region) const;

    const netsem::ConfigGraph &graph_;
    std::vector<epistemics::PossibilityPartition> partitions_;
    CheckOptions options_;
    std::vector<std::vector<NodeId>> succ_;
    std::vector<std::vector<NodeId>> pred_;
    std::unordered_map<std::string, std::vector<bool>> memo_;
    std::map<std::tuple<NodeId, int, bool>, qsim::DensityMatrix> densities_;
};

bool eval_atomic(const netsem::ConfigGraph &g, NodeId node, const Formula &f, CheckOptions options = {});

CheckResult check(const netsem::ConfigGraph &g, const std::vector<epistemics::PossibilityPartition> &partitions,
                  const Formula &f, NodeId at, CheckOptions options = {});

}  // namespace qknow::logic
