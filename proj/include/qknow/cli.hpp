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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qknow/epistemics.hpp"
#include "qknow/frontends.hpp"
#include "qknow/netsem.hpp"

namespace qknow::cli {

struct NodeVerdict {
    netsem::NodeId node = 0;
    std::string label;
    bool holds = false;
    std::string evidence_kind;
    std::vector<netsem::NodeId> evidence_nodes;
    std::string evidence;

    bool operator==(const NodeVerdict &) const = default;
};

struct FormulaReport {
    std::string name;
    std::string formula;
    std::string selector;
    std::optional<bool> expect;
    std::vector<NodeVerdict> verdicts;
    bool passed = true;  // every verdict equals `expect` (vacuous without one)

    bool operator==(const FormulaReport &) const = default;
};

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t terminals = 0;
    std::size_t deadlocks = 0;

    bool operator==(const GraphStats &) const = default;
};

struct RunReport {
    std::string network;
    std::vector<std::string> samples;  // empty when the network has no quantum inputs
    GraphStats graph;
    std::vector<FormulaReport> formulas;  // sorted by name, then selector
    double build_ms = 0.0;
    double check_ms = 0.0;
    bool all_passed = true;

    bool operator==(const RunReport &) const = default;
};

std::string report_to_json(const RunReport &r);
/// Inverse of report_to_json; throws Error on malformed input.
RunReport report_from_json(const std::string &text);
std::string report_to_text(const RunReport &r);

struct Options {
    std::vector<std::string> samples;  // aliases; empty selects the default set
    double tolerance = 1e-9;
    std::size_t max_nodes = 100000;
};

netsem::ConfigGraph build(const netsem::Network &n, const Options &o);

RunReport run_check(const netsem::Network &n, const std::vector<frontends::FormulaEntry> &entries,
                    const Options &o);

/// Graphviz rendering of g. Each partition in `overlays` becomes a set of
/// clusters: solid borders for the first, dashed for the second.
std::string render_dot(const netsem::ConfigGraph &g, const std::vector<epistemics::PossibilityPartition> &overlays = {});

std::string render_relations(const netsem::ConfigGraph &g, const epistemics::PossibilityPartition &p);
std::string relations_to_json(const netsem::ConfigGraph &g, const epistemics::PossibilityPartition &p);

/// Every maximal path from each start node, with step labels, branch
/// probabilities and state summaries.
std::string render_trace(const netsem::ConfigGraph &g, const std::vector<netsem::NodeId> &starts);

/// Entry point of the `qknow` tool. Returns 0 when every expectation holds,
/// 1 on a verdict mismatch and 2 on any error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qknow::cli
