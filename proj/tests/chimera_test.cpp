#include <gtest/gtest.h>

#include <random>

#include "chimera_sat/chimera.hpp"
#include "chimera_sat/solver.hpp"
#include "oracles.hpp"

using namespace chimera_sat;

namespace {

// Independent audit: disjoint chains, connectivity by coordinate adjacency,
// and a physical edge for every nonzero coupling.
::testing::AssertionResult valid_embedding(const Embedding& e, const IsingModel& model) {
    oracle::ChimeraOracle o{e.graph.rows(), e.graph.cols()};
    std::map<int, Vertex> owner;
    for (const auto& [v, chain] : e.chains) {
        for (int q : chain) {
            if (q < 0 || q >= e.graph.rows() * e.graph.cols() * 8) {
                return ::testing::AssertionFailure() << "qubit out of range in " << v.str();
            }
            if (!owner.emplace(q, v).second) return ::testing::AssertionFailure() << "qubit " << q << " shared";
        }
        if (!o.connected(chain)) return ::testing::AssertionFailure() << "chain " << v.str() << " disconnected";
    }
    for (const auto& v : model.vertices()) {
        if (!e.chains.count(v)) return ::testing::AssertionFailure() << "no chain for " << v.str();
    }
    for (const auto& [pr, j] : model.couplings()) {
        if (j == 0) continue;
        bool found = false;
        for (int a : e.chains.at(pr.first)) {
            for (int b : e.chains.at(pr.second)) found |= o.adjacent(a, b);
        }
        if (!found) return ::testing::AssertionFailure() << "no edge for " << pr.first.str() << "-" << pr.second.str();
    }
    return ::testing::AssertionSuccess();
}

IsingModel complete_model(int n) {
    IsingModel m;
    for (int i = 1; i <= n; ++i) m.add_vertex(Vertex::logical(i));
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) m.add_coupling(Vertex::logical(i), Vertex::logical(j), 1.0);
    }
    return m;
}

Problem or_problem(int n, int clauses, int k, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Problem p(n);
    for (int c = 0; c < clauses; ++c) {
        std::vector<int> vars(n);
        for (int i = 0; i < n; ++i) vars[i] = i + 1;
        std::vector<Literal> lits;
        for (int j = 0; j < k; ++j) {
            std::swap(vars[j], vars[j + rng() % (n - j)]);
            lits.push_back({vars[j], (rng() & 1) != 0});
        }
        p.add_clause(Clause::make_or(lits, 1.0));
    }
    return p;
}

}  // namespace

TEST(ChimeraGraph, Sizes) {
    const ChimeraGraph one = build_chimera(1, 1);
    EXPECT_EQ(one.num_vertices(), 8);
    EXPECT_EQ(one.num_edges(), 16u);
    EXPECT_EQ(build_chimera(3, 2).num_vertices(), 48);
    EXPECT_EQ(build_chimera(2, 2).num_edges(), 80u);
    EXPECT_EQ(build_chimera(2, 2).num_edges(), (oracle::ChimeraOracle{2, 2}.edge_count()));
    EXPECT_THROW(build_chimera(0, 3), EmbeddingError);
}

TEST(ChimeraGraph, AdjacencyMatchesOracle) {
    for (auto [m, n] : {std::pair{1, 1}, {2, 3}, {3, 2}, {4, 4}}) {
        const ChimeraGraph g(m, n);
        const oracle::ChimeraOracle o{m, n};
        EXPECT_EQ(g.num_edges(), o.edge_count());
        EXPECT_EQ(g.edges().size(), g.num_edges());
        for (const auto& [a, b] : g.edges()) EXPECT_TRUE(o.adjacent(a, b));
        for (int q = 0; q < g.num_vertices(); ++q) {
            EXPECT_EQ(g.index(g.coord(q)), q);
            for (int p : g.neighbors(q)) EXPECT_TRUE(o.adjacent(p, q));
            EXPECT_LE(g.neighbors(q).size(), 6u);
        }
        EXPECT_EQ(g.index(1, 0, 1, 2) - g.index(0, 0, 0, 0), ((1 * n + 0) * 2 + 1) * 4 + 2);
    }
}

TEST(CompleteGraph, FourVariables) {
    const ChimeraGraph g(1, 1);
    const Embedding e = embed_complete_graph(4, g);
    EXPECT_EQ(e.block_size, 1);
    for (int i = 1; i <= 4; ++i) EXPECT_EQ(e.chain(Vertex::logical(i)).size(), 2u);
    EXPECT_TRUE(valid_embedding(e, complete_model(4)));
}

TEST(CompleteGraph, TwelveVariablesUseThreeRows) {
    const ChimeraGraph g(6, 6);
    const Embedding e = embed_complete_graph(12, g);
    EXPECT_EQ(e.block_size, 3);
    int max_row = 0, max_col = 0;
    for (const auto& [v, c] : e.chains) {
        for (int q : c) {
            max_row = std::max(max_row, g.coord(q).row);
            max_col = std::max(max_col, g.coord(q).col);
        }
    }
    EXPECT_EQ(max_row, 2);
    EXPECT_EQ(max_col, 2);
    EXPECT_TRUE(valid_embedding(e, complete_model(12)));
}

TEST(CompleteGraph, SingleVariableAndCapacity) {
    const Embedding e = embed_complete_graph(1, ChimeraGraph(1, 1));
    EXPECT_EQ(e.chain(Vertex::logical(1)).size(), 1u);
    for (int n = 2; n <= 24; ++n) EXPECT_TRUE(valid_embedding(embed_complete_graph(n, ChimeraGraph(6, 6)), complete_model(n)));
    try {
        embed_complete_graph(13, ChimeraGraph(3, 3));
        FAIL() << "expected capacity error";
    } catch (const CapacityError& err) {
        EXPECT_EQ(err.required_rows(), 4);
    }
}

TEST(AncillaRows, OneGadgetOverTwelveLogicals) {
    std::vector<Literal> l;
    for (int i = 1; i <= 4; ++i) l.push_back({i * 3, false});
    const CompiledProblem cp = compile_problem(Problem(12, {Clause::make_or(l, 1.0)}));
    const Embedding base = embed_complete_graph(12, ChimeraGraph(4, 3));
    const auto groups = ancilla_groups(cp);
    const Embedding e = extend_chains_with_ancilla_rows(base, groups);
    EXPECT_EQ(e.ancilla_rows, 1);
    EXPECT_TRUE(valid_embedding(e, cp.model));
    EXPECT_TRUE(audit_embedding(e, cp.model).ok);
}

TEST(AncillaRows, NoAncillaeLeavesEmbedding) {
    const Embedding base = embed_complete_graph(5, ChimeraGraph(3, 3));
    const Embedding e = extend_chains_with_ancilla_rows(base, {});
    EXPECT_EQ(e.chains, base.chains);
    EXPECT_EQ(e.ancilla_rows, 0);
}

TEST(AncillaRows, TwoGadgetsTwoRows) {
    const Problem p(6, {Clause::make_or({{1, false}, {2, true}, {3, false}, {4, false}}, 1.0),
                        Clause::make_or({{3, true}, {4, false}, {5, false}, {6, true}}, 1.0)});
    const CompiledProblem cp = compile_problem(p);
    const Embedding e = extend_chains_with_ancilla_rows(embed_complete_graph(6, ChimeraGraph(4, 2)), ancilla_groups(cp));
    EXPECT_EQ(e.ancilla_rows, 2);
    EXPECT_TRUE(valid_embedding(e, cp.model));
    // every ancilla chain meets every logical chain of its gadget
    oracle::ChimeraOracle o{4, 2};
    for (const auto& c : cp.clauses) {
        for (const auto& a : c.ancillae) {
            for (const auto& v : c.logical) {
                bool touch = false;
                for (int x : e.chain(a)) {
                    for (int y : e.chain(v)) touch |= o.adjacent(x, y);
                }
                EXPECT_TRUE(touch) << a.str() << " " << v.str();
            }
        }
    }
}

TEST(Serpentine, OneStripMatchesLinear) {
    const CompiledProblem cp = compile_problem(or_problem(8, 4, 3, 1));
    const ChimeraGraph g(8, 8);
    const Embedding lin = linear_layout(cp, g);
    const Embedding ser = serpentine_layout(cp, g);
    EXPECT_EQ(ser.chains, lin.chains);
    EXPECT_EQ(ser.strips, 1);
}

TEST(Serpentine, MultipleStripsAreValid) {
    const CompiledProblem cp = compile_problem(or_problem(8, 30, 3, 2));
    const ChimeraGraph g(12, 12);
    EXPECT_THROW(linear_layout(cp, g), CapacityError);
    const Embedding e = serpentine_layout(cp, g);
    EXPECT_GE(e.strips, 2);
    EXPECT_TRUE(valid_embedding(e, cp.model));
    EXPECT_TRUE(audit_embedding(e, cp.model).ok);
    const PhysicalModel pm = realize(cp.model, e, cp.params);
    EXPECT_EQ(pm.model.size(), e.num_qubits());
}

TEST(Serpentine, CapacityErrorReportsSize) {
    const CompiledProblem cp = compile_problem(or_problem(8, 200, 3, 3));
    try {
        serpentine_layout(cp, ChimeraGraph(6, 6));
        FAIL() << "expected capacity error";
    } catch (const CapacityError& err) {
        EXPECT_EQ(err.required_cols(), 2);
        EXPECT_EQ(err.required_rows(), 2 + 150);
    }
}

TEST(Audit, DetectsBrokenEmbeddings) {
    const CompiledProblem cp = compile_problem(or_problem(4, 1, 3, 4));
    Embedding e = linear_layout(cp, minimal_linear_graph(cp));
    EXPECT_TRUE(audit_embedding(e, cp.model).ok);
    Embedding shared = e;
    shared.chains[Vertex::logical(1)].push_back(shared.chains[Vertex::logical(2)][0]);
    std::sort(shared.chains[Vertex::logical(1)].begin(), shared.chains[Vertex::logical(1)].end());
    EXPECT_FALSE(audit_embedding(shared, cp.model).ok);
    Embedding split = e;
    split.chains[Vertex::logical(1)] = {split.chains[Vertex::logical(1)].front(), split.chains[Vertex::logical(1)].back()};
    EXPECT_FALSE(oracle::ChimeraOracle({e.graph.rows(), e.graph.cols()}).connected(split.chains[Vertex::logical(1)]));
    EXPECT_FALSE(audit_embedding(split, cp.model).ok);
}

TEST(Realize, SingleVertex) {
    IsingModel m;
    m.add_field(Vertex::logical(1), 0.7);
    const CompiledProblem cp = compile_problem(Problem(1));
    const Embedding e = embed_complete_graph(1, ChimeraGraph(1, 1));
    const PhysicalModel pm = realize(m, e, GadgetParams{});
    ASSERT_EQ(pm.model.size(), 1u);
    EXPECT_DOUBLE_EQ(pm.model.fields().begin()->second, 0.7);
    EXPECT_TRUE(pm.model.couplings().empty());
    EXPECT_EQ(cp.model.size(), 1u);
}

TEST(Realize, FourBitOrOnTwoCells) {
    const CompiledProblem cp = compile_problem(Problem(4, {Clause::make_or({{1, false}, {2, false}, {3, false}, {4, false}}, 1.0)}));
    const ChimeraGraph g = minimal_linear_graph(cp);
    EXPECT_EQ(g.rows(), 2);
    EXPECT_EQ(g.cols(), 1);
    const Embedding e = linear_layout(cp, g);
    EXPECT_EQ(e.num_qubits(), 16u);
    const PhysicalModel pm = realize(cp.model, e, cp.params);
    // each logical chain has 3 qubits and 2 internal links
    const auto owners = e.owners();
    int chain_links = 0;
    for (const auto& [pr, j] : pm.model.couplings()) chain_links += owners.at(pr.first.index) == owners.at(pr.second.index);
    EXPECT_EQ(chain_links, 8);
    const FidelityReport f = check_realization(cp.model, pm);
    EXPECT_TRUE(f.checked);
    EXPECT_EQ(f.states, 256u);
    EXPECT_LE(f.max_deviation, 1e-9);
}

TEST(Realize, ChainStrengthAndFidelityOracle) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        const Problem p = oracle::random_problem(rng, 5, 3, 3, 0.5, 2.0);
        const CompiledProblem cp = compile_problem(p);
        const Embedding e = linear_layout(cp, minimal_linear_graph(cp));
        const PhysicalModel pm = realize(cp.model, e, cp.params);
        for (const auto& v : cp.model.vertices()) {
            double mag = std::fabs(cp.model.field(v));
            for (const auto& [pr, j] : cp.model.couplings()) {
                if (pr.first == v || pr.second == v) mag += std::fabs(j);
            }
            if (mag == 0) mag = cp.model.max_magnitude();
            EXPECT_NEAR(pm.chain_strength.at(v), 2 * mag, 1e-12);
        }
        // random chain-intact states: physical energy equals abstract energy
        const auto vs = cp.model.vertices();
        for (int s = 0; s < 50; ++s) {
            SpinAssignment a;
            for (const auto& v : vs) a[v] = (rng() & 1) ? 1 : -1;
            EXPECT_NEAR(oracle::energy(pm.model, expand_assignment(pm, a)), oracle::energy(cp.model, a) + pm.constant,
                        1e-9);
        }
    }
}

TEST(Realize, ExactGroundStateHasIntactChains) {
    std::mt19937_64 rng(7);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 5; ++trial) {
        const Problem p = oracle::random_problem(rng, 3, 2, 2, 0.5, 2.0);
        const CompiledProblem cp = compile_problem(p);
        const Embedding e = linear_layout(cp, minimal_linear_graph(cp));
        if (e.num_qubits() > 16) continue;
        ++tested;
        const PhysicalModel pm = realize(cp.model, e, cp.params);
        const auto ground = oracle::ground_states(pm.model);
        const Optimum opt = brute_force_optimum(p);
        for (const auto& s : ground.states) {
            const DecodeResult d = decode(s, e);
            EXPECT_TRUE(d.broken.empty());
            std::vector<bool> bits = logical_assignment(d.abstract, p.num_variables());
            EXPECT_NEAR(problem_energy(p, bits), opt.energy, 1e-9);
        }
    }
    EXPECT_EQ(tested, 5);
}

TEST(Budget, EmptyProblemIsBlockOnly) {
    const CompiledProblem cp = compile_problem(Problem(8));
    const QubitBudget b = count_physical_qubits(cp, Layout::Linear);
    EXPECT_EQ(b.ancillae, 0);
    EXPECT_EQ(b.ancilla_rows, 0);
    EXPECT_EQ(b.block_size, 2);
    // variable i = 4b+u: (b+1) horizontal + (t-b) vertical qubits
    EXPECT_EQ(b.physical, 4 * (1 + 2) + 4 * (2 + 1));
    EXPECT_EQ(b.block_qubits, b.physical);
}

TEST(Budget, MaxThreeSatSlope) {
    std::vector<double> x, y;
    for (int n : {8, 12, 16, 20}) {
        const CompiledProblem cp = compile_problem(or_problem(n, n, 3, 100 + n));
        x.push_back(n);
        y.push_back(count_physical_qubits(cp, Layout::Linear).physical);
    }
    EXPECT_NEAR(loglog_slope(x, y), 2.0, 0.3);
}

TEST(Budget, LoglogSlopeOfPowerLaw) {
    const std::vector<double> x{1, 2, 4, 8}, y{3, 24, 192, 1536};
    EXPECT_NEAR(loglog_slope(x, y), 3.0, 1e-12);
}

TEST(Metadata, RoundTrip) {
    const CompiledProblem cp = compile_problem(or_problem(6, 3, 3, 9));
    const Embedding e = linear_layout(cp, minimal_linear_graph(cp));
    const PhysicalModel pm = realize(cp.model, e, cp.params);
    const std::string text = write_metadata(pm, cp);
    const EmbeddingMetadata md = parse_metadata(text);
    EXPECT_EQ(md.graph, e.graph);
    EXPECT_EQ(md.embedding.chains, e.chains);
    EXPECT_EQ(md.chain_strength, pm.chain_strength);
    EXPECT_EQ(md.num_variables, 6);
    EXPECT_DOUBLE_EQ(md.energy_scale, cp.energy_scale);
    EXPECT_THROW(parse_metadata("{}"), EmbeddingError);
}

TEST(Layout, Parse) {
    EXPECT_EQ(parse_layout("linear"), Layout::Linear);
    EXPECT_EQ(parse_layout("serpentine"), Layout::Serpentine);
    EXPECT_THROW(parse_layout("spiral"), EmbeddingError);
}
