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

#include "qknow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qknow/logic.hpp"

namespace qknow::cli {

using json = nlohmann::json;
using netsem::ConfigGraph;
using netsem::NodeId;

void to_json(json &j, const NodeVerdict &v) {
    j = json{{"node", v.node},
             {"label", v.label},
             {"holds", v.holds},
             {"evidence_kind", v.evidence_kind},
             {"evidence_nodes", v.evidence_nodes},
             {"evidence", v.evidence}};
}

void from_json(const json &j, NodeVerdict &v) {
    j.at("node").get_to(v.node);
    j.at("label").get_to(v.label);
    j.at("holds").get_to(v.holds);
    j.at("evidence_kind").get_to(v.evidence_kind);
    j.at("evidence_nodes").get_to(v.evidence_nodes);
    j.at("evidence").get_to(v.evidence);
}

void to_json(json &j, const FormulaReport &f) {
    j = json{{"name", f.name},         {"formula", f.formula}, {"selector", f.selector},
             {"expect", nullptr},      {"verdicts", f.verdicts}, {"passed", f.passed}};
    if (f.expect) j["expect"] = *f.expect;
}

void from_json(const json &j, FormulaReport &f) {
    j.at("name").get_to(f.name);
    j.at("formula").get_to(f.formula);
    j.at("selector").get_to(f.selector);
    const auto &e = j.at("expect");
    f.expect = e.is_null() ? std::nullopt : std::optional<bool>(e.get<bool>());
    j.at("verdicts").get_to(f.verdicts);
    j.at("passed").get_to(f.passed);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GraphStats, nodes, edges, terminals, deadlocks)

void to_json(json &j, const RunReport &r) {
    j = json{{"network", r.network},
             {"samples", r.samples},
             {"graph", r.graph},
             {"formulas", r.formulas},
             {"timing", {{"build_ms", r.build_ms}, {"check_ms", r.check_ms}}},
             {"all_passed", r.all_passed}};
}

void from_json(const json &j, RunReport &r) {
    j.at("network").get_to(r.network);
    j.at("samples").get_to(r.samples);
    j.at("graph").get_to(r.graph);
    j.at("formulas").get_to(r.formulas);
    j.at("timing").at("build_ms").get_to(r.build_ms);
    j.at("timing").at("check_ms").get_to(r.check_ms);
    j.at("all_passed").get_to(r.all_passed);
}

std::string report_to_json(const RunReport &r) { return json(r).dump(2); }

RunReport report_from_json(const std::string &text) {
    try {
        return json::parse(text).get<RunReport>();
    } catch (const json::exception &e) {
        throw Error(fmt::format("malformed report: {}", e.what()));
    }
}

std::string report_to_text(const RunReport &r) {
    std::string out = fmt::format("network {}: {} nodes, {} edges, {} terminal, {} deadlocked\n", r.network,
                                  r.graph.nodes, r.graph.edges, r.graph.terminals, r.graph.deadlocks);
    if (!r.samples.empty()) out += fmt::format("samples: {}\n", fmt::join(r.samples, ","));
    for (const auto &f : r.formulas) {
        std::string expect = f.expect ? fmt::format(" expect {}", *f.expect ? "true" : "false") : "";
        out += fmt::format("[{}] {} : {} @ {}{}\n", f.passed ? "ok" : "MISMATCH", f.name, f.formula, f.selector,
                           expect);
        for (const auto &v : f.verdicts) {
            out += fmt::format("    {} {}", v.label, v.holds ? "true" : "false");
            if (!v.evidence.empty()) out += fmt::format("  ({})", v.evidence);
            out += "\n";
        }
    }
    out += fmt::format("build {:.1f} ms, check {:.1f} ms\n", r.build_ms, r.check_ms);
    out += r.all_passed ? "all expectations met\n" : "some expectations NOT met\n";
    return out;
}

namespace {

bool has_quantum_inputs(const netsem::Network &n) {
    return std::any_of(n.agents.begin(), n.agents.end(), [](const auto &a) { return !a.quantum_inputs.empty(); });
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

netsem::ConfigGraph build(const netsem::Network &n, const Options &o) {
    const auto samples = o.samples.empty() ? netsem::default_samples() : netsem::samples_from_aliases(o.samples);
    return netsem::build_graph(n, samples, {o.tolerance, o.max_nodes});
}

RunReport run_check(const netsem::Network &n, const std::vector<frontends::FormulaEntry> &entries,
                    const Options &o) {
    RunReport report;
    report.network = n.name;

    auto t0 = std::chrono::steady_clock::now();
    const ConfigGraph g = build(n, o);
    report.build_ms = ms_since(t0);
    if (has_quantum_inputs(n)) {
        for (const auto &s : g.samples()) report.samples.push_back(s.label);
    }
    report.graph = {g.size(), g.edges().size(), g.terminal_count(), g.deadlock_count()};

    t0 = std::chrono::steady_clock::now();
    logic::ModelChecker checker(g, epistemics::all_partitions(g), {o.tolerance});
    for (const auto &entry : entries) {
        FormulaReport fr;
        fr.name = entry.name;
        fr.formula = logic::to_string(entry.formula);
        fr.selector = frontends::to_string(entry.selector);
        fr.expect = entry.expect;
        for (NodeId node : frontends::resolve(entry.selector, g)) {
            const auto result = checker.check(entry.formula, node);
            NodeVerdict v{node, g.label(node), result.holds, logic::to_string(result.evidence.kind),
                          result.evidence.nodes, logic::describe(g, result.evidence)};
            if (entry.expect && v.holds != *entry.expect) fr.passed = false;
            fr.verdicts.push_back(std::move(v));
        }
        report.all_passed = report.all_passed && fr.passed;
        report.formulas.push_back(std::move(fr));
    }
    report.check_ms = ms_since(t0);
    std::sort(report.formulas.begin(), report.formulas.end(), [](const auto &a, const auto &b) {
        return std::tie(a.name, a.selector) < std::tie(b.name, b.selector);
    });
    return report;
}

namespace {

std::string dot_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

std::string dot_id(const std::string &s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

}  // namespace

std::string render_dot(const ConfigGraph &g, const std::vector<epistemics::PossibilityPartition> &overlays) {
    std::string out = fmt::format("digraph \"{}\" {{\n", dot_escape(g.network().name));
    out += "  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (NodeId id = 0; id < g.size(); ++id) {
        std::string text = g.label(id) + "\n" + g.store_summary(id) + "\n" + g.node(id).config.state.summary();
        if (g.is_terminal(id)) text += "\nterminal";
        if (g.is_deadlocked(id)) text += "\ndeadlock";
        out += fmt::format("  n{} [label=\"{}\"{}];\n", id, dot_escape(text), g.is_deadlocked(id) ? ", color=red" : "");
    }
    for (const auto &e : g.edges()) {
        std::string text = e.label;
        if (!e.outcome.empty()) text += fmt::format("\n{} p={:.4g}", e.outcome, e.probability);
        out += fmt::format("  n{} -> n{} [label=\"{}\"];\n", e.source, e.target, dot_escape(text));
    }
    for (std::size_t k = 0; k < overlays.size() && k < 2; ++k) {
        const auto &p = overlays[k];
        const char *style = k == 0 ? "solid" : "dashed";
        for (std::size_t c = 0; c < p.classes().size(); ++c) {
            out += fmt::format("  subgraph cluster_{}_{} {{\n", dot_id(p.agent()), c);
            out += fmt::format("    style={}; label=\"{}: {}\";\n", style, dot_escape(p.agent()),
                               dot_escape(epistemics::describe_key(g, p, c)));
            for (NodeId m : p.classes()[c].members) out += fmt::format("    n{};\n", m);
            out += "  }\n";
        }
    }
    out += "}\n";
    return out;
}

std::string render_relations(const ConfigGraph &g, const epistemics::PossibilityPartition &p) {
    std::string out = fmt::format("agent {}: {} classes\n", p.agent(), p.classes().size());
    for (std::size_t c = 0; c < p.classes().size(); ++c) {
        out += fmt::format("class {}: {}\n", c, epistemics::describe_key(g, p, c));
        for (NodeId m : p.classes()[c].members) out += fmt::format("    n{} {}\n", m, g.label(m));
    }
    return out;
}

std::string relations_to_json(const ConfigGraph &g, const epistemics::PossibilityPartition &p) {
    json classes = json::array();
    for (std::size_t c = 0; c < p.classes().size(); ++c) {
        const auto &cls = p.classes()[c];
        json labels = json::array();
        for (NodeId m : cls.members) labels.push_back(g.label(m));
        classes.push_back({{"key", epistemics::describe_key(g, p, c)},
                           {"store", cls.store},
                           {"pc", cls.pc},
                           {"members", cls.members},
                           {"labels", labels}});
    }
    return json{{"agent", p.agent()}, {"classes", classes}}.dump(2);
}

std::string render_trace(const ConfigGraph &g, const std::vector<NodeId> &starts) {
    std::string out;
    for (NodeId start : starts) {
        const auto paths = netsem::maximal_paths(g, start);
        out += fmt::format("from n{} {}: {} path(s)\n", start, g.label(start), paths.size());
        for (std::size_t k = 0; k < paths.size(); ++k) {
            const auto &path = paths[k];
            double prob = 1.0;
            for (const auto &step : path) {
                if (step.via_edge) prob *= g.edges()[*step.via_edge].probability;
            }
            out += fmt::format("path {} ({} steps, probability {:.6g})\n", k + 1, path.size() - 1, prob);
            for (const auto &step : path) {
                if (step.via_edge) {
                    const auto &e = g.edges()[*step.via_edge];
                    out += fmt::format("    -- {}", e.label);
                    if (!e.outcome.empty()) out += fmt::format(" [{}] p={:.6g}", e.outcome, e.probability);
                    out += "\n";
                }
                out += fmt::format("  n{} {}  {}  {}\n", step.node, g.label(step.node), g.store_summary(step.node),
                                   g.node(step.node).config.state.summary());
            }
            const NodeId last = path.back().node;
            out += fmt::format("  ends {}\n", g.is_terminal(last)     ? "terminal"
                                              : g.is_deadlocked(last) ? "deadlocked"
                                                                      : "in a cycle");
        }
    }
    return out;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Model checker for knowledge in quantum network protocols", "qknow"};
    app.require_subcommand(1);

    Options opts;
    bool as_json = false;
    std::string network_path, formula_path, agent, selector;
    std::vector<std::string> class_agents;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--samples", opts.samples, "Comma-separated sample aliases (0,1,plus,minus,plusi,minusi)")
            ->delimiter(',');
        sub->add_option("--tol", opts.tolerance, "Comparison tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-nodes", opts.max_nodes, "Node limit for graph construction")->check(CLI::PositiveNumber);
        sub->add_flag("--json", as_json, "Machine-readable output");
    };

    auto *check = app.add_subcommand("check", "Check every formula of a formula file");
    check->add_option("network", network_path)->required();
    check->add_option("formulas", formula_path)->required();
    common(check);

    auto *graph = app.add_subcommand("graph", "Print the configuration graph as DOT");
    graph->add_option("network", network_path)->required();
    graph->add_option("--classes", class_agents, "Overlay an agent's possibility classes (at most two)");
    common(graph);

    auto *relations = app.add_subcommand("relations", "List an agent's possibility classes");
    relations->add_option("network", network_path)->required();
    relations->add_option("agent", agent)->required();
    common(relations);

    auto *trace = app.add_subcommand("trace", "List every maximal path from the selected nodes");
    trace->add_option("network", network_path)->required();
    trace->add_option("selector", selector)->required();
    common(trace);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto net = frontends::parse_network(frontends::read_file(network_path), network_path);
        if (check->parsed()) {
            const auto entries = frontends::parse_formula_file(frontends::read_file(formula_path), net, formula_path);
            const RunReport report = run_check(net, entries, opts);
            out << (as_json ? report_to_json(report) + "\n" : report_to_text(report));
            return report.all_passed ? 0 : 1;
        }
        const ConfigGraph g = build(net, opts);
        if (graph->parsed()) {
            if (class_agents.size() > 2) throw Error("--classes accepts at most two agents");
            std::vector<epistemics::PossibilityPartition> overlays;
            for (const auto &a : class_agents) overlays.push_back(epistemics::possibility_partition(g, a));
            out << render_dot(g, overlays);
        } else if (relations->parsed()) {
            const auto p = epistemics::possibility_partition(g, agent);
            out << (as_json ? relations_to_json(g, p) + "\n" : render_relations(g, p));
        } else {
            const auto sel = frontends::parse_selector(selector, "<selector>");
            out << render_trace(g, frontends::resolve(sel, g));
        }
        return 0;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace qknow::cli
