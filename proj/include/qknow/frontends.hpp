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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qknow/error.hpp"
#include "qknow/logic.hpp"
#include "qknow/netsem.hpp"

namespace qknow::frontends {

/// Parses a `.qnet` protocol description and validates every static invariant
/// of the network. Programs are written in execution order (top to bottom).
///
///     network SC {
///       qubits 2;
///       resource ebit(1, 2);
///       agent A owns 1 {
///         input x1: bit;
///         program { condZ(1, x1); qsend 1 -> B; }
///       }
///       ...
///     }
///
/// Throws ParseError (with the offending span) on syntax or validation errors.
netsem::Network parse_network(std::string_view text, const std::string &file = "");

/// Canonical `.qnet` rendering; parse_network(print_network(n)) == n.
std::string print_network(const netsem::Network &n);

/// Parses one formula and checks it against the network's agents, variables
/// and qubits.
logic::Formula parse_formula(std::string_view text, const netsem::Network &n, const std::string &file = "",
                             std::size_t first_line = 1);

struct SelectorFilter {
    std::string agent;  // empty: run filter (classical input, psi, qN)
    std::string key;
    std::string value;
    SourceSpan span;
    bool operator==(const SelectorFilter &o) const {
        return agent == o.agent && key == o.key && value == o.value;
    }
};

/// Addresses graph nodes: `all`, `all-initial`, `initial[x1=0,x2=1]`,
/// `initial[psi=plus]`, `stage 3 [x1=1]`, `terminal [B.s1=0]`.
struct Selector {
    enum class Base { All, Initial, Stage, Terminal };
    Base base = Base::Initial;
    std::size_t stage = 1;
    std::vector<SelectorFilter> filters;

    bool operator==(const Selector &) const = default;
};

std::string to_string(const Selector &s);

Selector parse_selector(std::string_view text, const std::string &file = "", std::size_t first_line = 1);

/// Nodes selected by s, ascending. Throws LookupError for unknown keys, values
/// outside an input's domain, or an empty selection.
std::vector<netsem::NodeId> resolve(const Selector &s, const netsem::ConfigGraph &g);

/// One line of a `.qf` file: `NAME : FORMULA @ SELECTOR [expect: true|false]`.
struct FormulaEntry {
    std::string name;
    logic::Formula formula;
    Selector selector;
    std::optional<bool> expect;
    SourceSpan span;
};

std::vector<FormulaEntry> parse_formula_file(std::string_view text, const netsem::Network &n,
                                             const std::string &file = "");

std::string print_formula_entry(const FormulaEntry &e);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string &path);

}  // namespace qknow::frontends
