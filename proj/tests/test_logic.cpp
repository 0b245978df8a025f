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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qknow/epistemics.hpp"
#include "qknow/frontends.hpp"
#include "qknow/logic.hpp"

using namespace qknow;
using namespace qknow::logic;
using netsem::NodeId;

namespace {

struct Model {
    netsem::Network net;
    netsem::ConfigGraph graph;
    ModelChecker checker;

    explicit Model(const std::string &file, std::vector<netsem::LabeledState> samples = netsem::default_samples())
        : net(frontends::parse_network(frontends::read_file(std::string(QKNOW_PROTOCOL_DIR) + "/" + file))),
          graph(netsem::build_graph(net, std::move(samples))),
          checker(graph, epistemics::all_partitions(graph)) {}

    Formula f(const std::string &text) const { return frontends::parse_formula(text, net); }
    std::vector<NodeId> at(const std::string &selector) const {
        return frontends::resolve(frontends::parse_selector(selector), graph);
    }
    bool holds(const std::string &formula, NodeId n) { return checker.holds(f(formula), n); }
};

Model &sc() {
    static Model m("sc.qnet");
    return m;
}

Model &tp() {
    static Model m("tp.qnet");
    return m;
}

const std::vector<std::pair<int, int>> kInputs{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
const std::vector<std::string> kSamples{"0", "1", "plus", "plusi"};

std::string input_filter(int a, int b) { return "[x1=" + std::to_string(a) + ",x2=" + std::to_string(b) + "]"; }

std::vector<Formula> atoms(const Model &m, const std::vector<std::string> &texts) {
    std::vector<Formula> out;
    for (const auto &t : texts) out.push_back(m.f(t));
    return out;
}

std::vector<Formula> sc_atoms() {
    return atoms(sc(), {"B.s1 == A.x1", "B.s2 == A.x2", "A.x1 == 1", "B.s1 == 0", "terminal", "defined(B.s1)", "true"});
}

std::vector<Formula> tp_atoms() {
    return atoms(tp(), {"q3 == init(q1)", "q1 == state[plus]", "q3 == state[0]", "A.s1 == 1", "B.x1 == 0", "terminal",
                        "defined(B.x2)"});
}

}  // namespace

// --- superdense coding ------------------------------------------------------

TEST(GoldenSuperdense, CorrectnessEventuallyAndNext) {
    for (auto [a, b] : kInputs) {
        const NodeId c1 = sc().at("initial" + input_filter(a, b)).at(0);
        const NodeId c3 = sc().at("stage 3 " + input_filter(a, b)).at(0);
        EXPECT_TRUE(sc().holds("AF (B.s1 == A.x1 & B.s2 == A.x2)", c1));
        EXPECT_TRUE(sc().holds("AX (B.s1 == A.x1 & B.s2 == A.x2)", c3));
        EXPECT_FALSE(sc().holds("AX (B.s1 == A.x1 & B.s2 == A.x2)", c1));
    }
}

TEST(GoldenSuperdense, AgentAAlwaysKnowsInputs) {
    for (auto [a, b] : kInputs) {
        const NodeId c1 = sc().at("initial" + input_filter(a, b)).at(0);
        const std::string body = "(A.x1 == " + std::to_string(a) + " & A.x2 == " + std::to_string(b) + ")";
        EXPECT_TRUE(sc().holds("AG K[A] " + body, c1));
        for (NodeId n = 0; n < sc().graph.size(); ++n) {
            if (sc().graph.node(n).config.run == sc().graph.node(c1).config.run) EXPECT_TRUE(sc().holds("K[A] " + body, n));
        }
    }
}

TEST(GoldenSuperdense, AgentBKnowsOnlyAtTheEnd) {
    const auto f = sc().f("K[B](B.s1 == A.x1 & B.s2 == A.x2)");
    for (NodeId n = 0; n < sc().graph.size(); ++n) EXPECT_EQ(sc().checker.holds(f, n), sc().graph.stage(n) == 4) << n;
}

TEST(GoldenSuperdense, AgentANeverKnowsThatBKnows) {
    for (auto c1 : sc().at("all-initial")) {
        EXPECT_FALSE(sc().holds("AF K[A] K[B](B.s1 == A.x1 & B.s2 == A.x2)", c1));
        EXPECT_FALSE(sc().holds("EF K[A] K[B](B.s1 == A.x1 & B.s2 == A.x2)", c1));
    }
    // The reason: A confuses C3 with C4, where B's knowledge differs.
    const NodeId c3 = sc().at("stage 3 [x1=1,x2=1]").at(0);
    const auto r = sc().checker.check(sc().f("K[A] K[B](B.s1 == A.x1 & B.s2 == A.x2)"), c3);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.evidence.kind, Evidence::Kind::EquivalentNode);
}

TEST(GoldenSuperdense, BranchFreeAllEqualsExists) {
    const std::vector<std::string> bodies{"(B.s1 == A.x1 & B.s2 == A.x2)", "K[A] K[B](B.s1 == A.x1 & B.s2 == A.x2)",
                                          "K[B](B.s1 == A.x1 & B.s2 == A.x2)", "(A.x1 == 1 & A.x2 == 0)", "terminal"};
    for (const auto &body : bodies) {
        for (NodeId n = 0; n < sc().graph.size(); ++n) {
            EXPECT_EQ(sc().holds("AF " + body, n), sc().holds("EF " + body, n)) << body;
            EXPECT_EQ(sc().holds("AG " + body, n), sc().holds("EG " + body, n)) << body;
            EXPECT_EQ(sc().holds("AX " + body, n), sc().holds("EX " + body, n)) << body;
        }
    }
}

// --- teleportation ----------------------------------------------------------

TEST(GoldenTeleportation, Correctness) {
    for (auto c1 : tp().at("all-initial")) EXPECT_TRUE(tp().holds("AF (terminal & q3 == init(q1))", c1));
}

TEST(GoldenTeleportation, NobodyKnowsTheInputState) {
    for (const auto &s : kSamples) {
        const NodeId c1 = tp().at("initial[psi=" + s + "]").at(0);
        for (const char *agent : {"A", "B"}) {
            const auto r = tp().checker.check(tp().f(std::string("K[") + agent + "](q1 == state[" + s + "])"), c1);
            EXPECT_FALSE(r.holds) << agent << " " << s;
            ASSERT_EQ(r.evidence.kind, Evidence::Kind::EquivalentNode);
            ASSERT_FALSE(r.evidence.nodes.empty());
            const NodeId witness = r.evidence.nodes.back();
            EXPECT_NE(tp().graph.node(witness).config.run->label(), "psi=" + s);
            EXPECT_FALSE(tp().holds("q1 == state[" + s + "]", witness));
        }
        EXPECT_TRUE(tp().holds("q1 == state[" + s + "]", c1));
    }
}

TEST(GoldenTeleportation, NobodyEverKnowsTheOutputState) {
    for (const auto &s : kSamples) {
        const NodeId c1 = tp().at("initial[psi=" + s + "]").at(0);
        EXPECT_FALSE(tp().holds("EF K[A](q3 == state[" + s + "])", c1));
        EXPECT_FALSE(tp().holds("EF K[B](q3 == state[" + s + "])", c1));
        EXPECT_TRUE(tp().holds("AF q3 == state[" + s + "]", c1));
    }
}

TEST(GoldenTeleportation, BobLearnsTheCorrelation) {
    for (auto c1 : tp().at("all-initial")) EXPECT_TRUE(tp().holds("AF K[B](q3 == init(q1))", c1));
}

// Literal semantics: on branch 00 no correction is applied, so every
// configuration A cannot rule out already satisfies q3 == init(q1).
TEST(GoldenTeleportation, DocumentedDiscrepancyOnBranchZero) {
    const auto f = tp().f("K[A](q3 == init(q1))");
    for (int stage = 2; stage <= 4; ++stage) {
        for (auto [a, b] : kInputs) {
            const std::string sel = "stage " + std::to_string(stage) + " [A.s1=" + std::to_string(a) +
                                    ",A.s2=" + std::to_string(b) + "]";
            for (NodeId n : tp().at(sel)) EXPECT_EQ(tp().checker.holds(f, n), a == 0 && b == 0) << sel;
        }
    }
    for (auto c1 : tp().at("all-initial")) {
        EXPECT_TRUE(tp().holds("EF K[A](q3 == init(q1))", c1));
        EXPECT_FALSE(tp().holds("AF K[A](q3 == init(q1))", c1));
    }
}

TEST(GoldenTeleportation, ChannelIsIdentityOnTomographicSet) {
    // The four sample density matrices span 2x2 matrices, so agreement on
    // them fixes every branch map to the identity.
    oracle::Mat basis(4, std::vector<oracle::cd>(4));
    for (std::size_t k = 0; k < 4; ++k) {
        const auto v = *qsim::named_sample(kSamples[k]);
        const auto rho = oracle::outer(oracle::Vec(v.begin(), v.end()));
        for (std::size_t e = 0; e < 4; ++e) basis[e][k] = rho[e / 2][e % 2];
    }
    // Gaussian elimination: full rank.
    auto m = basis;
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        ASSERT_GT(std::abs(m[piv][col]), 1e-9);
        std::swap(m[piv], m[col]);
        for (std::size_t r = col + 1; r < 4; ++r) {
            const auto factor = m[r][col] / m[col][col];
            for (std::size_t c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
        }
    }

    const auto &g = tp().graph;
    std::size_t terminals = 0;
    for (NodeId n = 0; n < g.size(); ++n) {
        if (!g.is_terminal(n)) continue;
        ++terminals;
        const auto &c = g.node(n).config;
        const auto out = oracle::partial_trace(oracle::to_vec(c.state), 3, {2});
        const auto in = oracle::partial_trace(oracle::to_vec(c.run->initial_state), 3, {0});
        EXPECT_LT(oracle::max_diff(out, in), 1e-9) << g.label(n);
    }
    EXPECT_EQ(terminals, 16u);
}

TEST(GoldenTeleportation, ArbitraryInputIsTeleported) {
    std::mt19937 rng(99);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<qsim::Complex> psi{{nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
        const double norm = std::sqrt(std::norm(psi[0]) + std::norm(psi[1]));
        for (auto &a : psi) a /= norm;
        auto g = netsem::build_graph(tp().net, {{"r", psi}});
        ASSERT_EQ(g.size(), 13u);
        for (NodeId n = 0; n < g.size(); ++n) {
            if (!g.is_terminal(n)) continue;
            const auto out = oracle::partial_trace(oracle::to_vec(g.node(n).config.state), 3, {2});
            EXPECT_LT(oracle::max_diff(out, oracle::outer(oracle::Vec(psi.begin(), psi.end()))), 1e-9);
        }
    }
}

// --- atomic semantics ---------------------------------------------------------

TEST(Atomic, UndefinedVariablesAreNeverEqual) {
    const NodeId c1 = sc().at("initial[x1=0,x2=0]").at(0);
    EXPECT_FALSE(sc().holds("B.s1 == 0", c1));
    EXPECT_FALSE(sc().holds("B.s1 == B.s1", c1));
    EXPECT_TRUE(sc().holds("!(B.s1 == 0)", c1));
    EXPECT_FALSE(sc().holds("defined(B.s1)", c1));
    EXPECT_TRUE(eval_atomic(sc().graph, c1, sc().f("A.x1 == 0")));
}

TEST(Atomic, RigidStatesAreWorldIndependent) {
    // state[plus] denotes the same state in every world; init(q1) does not.
    const auto plus = tp().at("initial[psi=plus]").at(0);
    const auto zero = tp().at("initial[psi=0]").at(0);
    EXPECT_TRUE(tp().holds("q1 == state[plus]", plus));
    EXPECT_FALSE(tp().holds("q1 == state[plus]", zero));
    EXPECT_TRUE(tp().holds("q1 == init(q1)", plus));
    EXPECT_TRUE(tp().holds("q1 == init(q1)", zero));
    EXPECT_TRUE(tp().holds("q1 == state[(0.70710678118654752, 0), (0.70710678118654752, 0)]", plus));
}

TEST(Atomic, EntangledQubitIsMaximallyMixed) {
    const auto c1 = tp().at("initial[psi=0]").at(0);
    EXPECT_FALSE(tp().holds("q2 == state[0]", c1));
    EXPECT_TRUE(tp().holds("q2 == q3", c1));
}

// --- printing ------------------------------------------------------------------

TEST(Printing, PrecedenceRoundTrip) {
    const std::vector<std::string> texts{
        "K[A] K[B] (B.s1 == A.x1 & B.s2 == A.x2)",
        "!(A.x1 == 0 | A.x2 == 1) & terminal",
        "AF (terminal & q3 == init(q1))",
        "(A.x1 == 0 | A.x2 == 0) & (B.s1 == 1 | !defined(B.s2))",
        "A.x1 == 0 | A.x2 == 0 & B.s1 == 1",
        "EX AX EG AG true",
    };
    for (const auto &t : texts) {
        Model &m = t.find("q3") != std::string::npos ? tp() : sc();
        const Formula f = m.f(t);
        const std::string printed = to_string(f);
        const Formula again = m.f(printed);
        EXPECT_EQ(f, again) << t << " -> " << printed;
    }
    EXPECT_EQ(to_string(sc().f("(A.x1 == 0 | A.x2 == 0) & B.s1 == 1")), "(A.x1 == 0 | A.x2 == 0) & B.s1 == 1");
    EXPECT_EQ(to_string(sc().f("!(!true)")), "!!true");
}

TEST(Printing, SubformulasChildrenFirst) {
    const auto subs = subformulas(sc().f("AF K[A] (A.x1 == 0 & A.x1 == 0)"));
    ASSERT_EQ(subs.size(), 4u);
    EXPECT_EQ(to_string(subs.front()), "A.x1 == 0");
    EXPECT_EQ(to_string(subs.back()), "AF K[A] (A.x1 == 0 & A.x1 == 0)");
}

// --- properties ----------------------------------------------------------------

TEST(Properties, S5OnRandomFormulas) {
    for (auto *m : {&sc(), &tp()}) {
        oracle::FormulaGen gen(m == &sc() ? sc_atoms() : tp_atoms(), {"A", "B"}, 5);
        int violations = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const Formula phi = gen(3);
            const NodeId n = gen.pick(m->graph.size());
            const std::string agent = gen.pick(2) ? "A" : "B";
            const bool k = m->checker.holds(Know(agent, phi), n);
            if (k && !m->checker.holds(phi, n)) ++violations;
            if (k != m->checker.holds(Know(agent, Know(agent, phi)), n)) ++violations;
            if (!k && !m->checker.holds(Know(agent, Not(Know(agent, phi))), n)) ++violations;
        }
        EXPECT_EQ(violations, 0);
    }
}

TEST(Properties, PathQuantifierEntailments) {
    for (auto *m : {&sc(), &tp()}) {
        oracle::FormulaGen gen(m == &sc() ? sc_atoms() : tp_atoms(), {"A", "B"}, 6);
        int violations = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const Formula phi = gen(3);
            const auto &ag = m->checker.labels(AG(phi));
            const auto &eg = m->checker.labels(EG(phi));
            const auto &af = m->checker.labels(AF(phi));
            const auto &ef = m->checker.labels(EF(phi));
            const auto &ax = m->checker.labels(AX(phi));
            const auto &ex = m->checker.labels(EX(phi));
            const auto &dual = m->checker.labels(Not(AG(Not(phi))));
            for (NodeId n = 0; n < m->graph.size(); ++n) {
                if (ag[n] && !eg[n]) ++violations;
                if (af[n] && !ef[n]) ++violations;
                if (ax[n] && !ex[n]) ++violations;
                if (ag[n] && !af[n]) ++violations;
                if (ef[n] != dual[n]) ++violations;
            }
        }
        EXPECT_EQ(violations, 0);
    }
}

TEST(Properties, MemoizedAgreesWithNaiveOnRandomFormulas) {
    for (auto *m : {&sc(), &tp()}) {
        oracle::FormulaGen gen(m == &sc() ? sc_atoms() : tp_atoms(), {"A", "B"}, 8);
        oracle::NaiveChecker naive(m->graph);
        for (int trial = 0; trial < 60; ++trial) {
            const Formula phi = gen(3);
            const auto &labels = m->checker.labels(phi);
            for (NodeId n = 0; n < m->graph.size(); ++n) EXPECT_EQ(labels[n], naive.eval(phi, n)) << to_string(phi);
        }
    }
}

TEST(Properties, MemoizedAgreesWithNaiveOnGoldenCorpus) {
    for (const auto &[net_file, qf_file] : {std::pair{"sc.qnet", "sc.qf"}, std::pair{"tp.qnet", "tp.qf"}}) {
        Model &m = std::string(net_file) == "sc.qnet" ? sc() : tp();
        const std::string path = std::string(QKNOW_PROTOCOL_DIR) + "/" + qf_file;
        oracle::NaiveChecker naive(m.graph);
        std::size_t compared = 0;
        for (const auto &entry : frontends::parse_formula_file(frontends::read_file(path), m.net, path)) {
            for (const auto &sub : subformulas(entry.formula)) {
                const auto &labels = m.checker.labels(sub);
                for (NodeId n = 0; n < m.graph.size(); ++n) {
                    EXPECT_EQ(labels[n], naive.eval(sub, n)) << to_string(sub) << " at " << m.graph.label(n);
                    ++compared;
                }
            }
        }
        EXPECT_GT(compared, 0u);
    }
}

TEST(Properties, MemoTableIsShared) {
    Model m("sc.qnet");
    m.checker.labels(m.f("AF K[B](B.s1 == A.x1)"));
    const auto size = m.checker.memo_size();
    m.checker.labels(m.f("EF K[B](B.s1 == A.x1)"));
    EXPECT_EQ(m.checker.memo_size(), size + 1);
}

// --- evidence -------------------------------------------------------------------

TEST(Evidence, PathsAndSuccessors) {
    const NodeId c1 = sc().at("initial[x1=0,x2=1]").at(0);
    auto ef = sc().checker.check(sc().f("EF B.s2 == 1"), c1);
    EXPECT_TRUE(ef.holds);
    EXPECT_EQ(ef.evidence.kind, Evidence::Kind::WitnessPath);
    EXPECT_EQ(ef.evidence.nodes.front(), c1);
    EXPECT_TRUE(sc().holds("B.s2 == 1", ef.evidence.nodes.back()));

    auto ag = sc().checker.check(sc().f("AG !terminal"), c1);
    EXPECT_FALSE(ag.holds);
    EXPECT_EQ(ag.evidence.kind, Evidence::Kind::CounterexamplePath);
    EXPECT_TRUE(sc().graph.is_terminal(ag.evidence.nodes.back()));

    auto ax = sc().checker.check(sc().f("AX terminal"), c1);
    EXPECT_FALSE(ax.holds);
    EXPECT_EQ(ax.evidence.kind, Evidence::Kind::Successor);

    auto atom = sc().checker.check(sc().f("A.x1 == 0"), c1);
    EXPECT_EQ(atom.evidence.kind, Evidence::Kind::None);
    EXPECT_FALSE(atom.satisfying.empty());
}

TEST(Scope, RejectsUnknownNames) {
    EXPECT_THROW(check_scope(Defined("C", "x"), sc().net), LookupError);
    EXPECT_THROW(check_scope(Defined("A", "zz"), sc().net), LookupError);
    EXPECT_THROW(check_scope(Eq(Qubit(9), Qubit(1)), sc().net), LookupError);
    EXPECT_THROW(check_scope(Eq(Var("A", "x1"), Qubit(1)), sc().net), LookupError);
    EXPECT_NO_THROW(check_scope(Know("B", Eq(Var("B", "s1"), Bit(1))), sc().net));
}
