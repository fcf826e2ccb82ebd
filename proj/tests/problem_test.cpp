#include <gtest/gtest.h>

#include <random>

#include "chimera_sat/problem.hpp"
#include "oracles.hpp"

using namespace chimera_sat;

namespace {

std::vector<Literal> lits(std::initializer_list<int> values) {
    std::vector<Literal> out;
    for (int v : values) out.push_back(Literal::from_dimacs(v));
    return out;
}

}  // namespace

TEST(ParseWcnf, MinimalCnf) {
    const Problem p = parse_wcnf("p cnf 2 1\n1 -2 0\n");
    ASSERT_EQ(p.num_variables(), 2);
    ASSERT_EQ(p.clauses().size(), 1u);
    EXPECT_EQ(p.clauses()[0], Clause::make_or(lits({1, -2}), 1.0));
}

TEST(ParseWcnf, WeightedClause) {
    const Problem p = parse_wcnf("p wcnf 3 1 100\n5 1 2 3 0\n");
    ASSERT_EQ(p.clauses().size(), 1u);
    EXPECT_EQ(p.clauses()[0], Clause::make_or(lits({1, 2, 3}), 5.0));
}

TEST(ParseWcnf, XorLine) {
    const Problem p = parse_wcnf("p cnf 4 1\nx 1 2 3 4 0\n");
    ASSERT_EQ(p.clauses().size(), 1u);
    EXPECT_EQ(p.clauses()[0], Clause::make_xor(lits({1, 2, 3, 4}), 1.0));
}

TEST(ParseWcnf, CommentsAndExtensions) {
    const Problem p = parse_wcnf(
        "c header comment\n"
        "p wcnf 4 4 50\n"
        "c inline comment\n"
        "x 2.5 -1 2 0\n"
        "a 1.5 1 3 0\n"
        "s 2 0 1 1 0 : 1 2 -4 0\n"
        "t 1 101 : 1 2 3 0\n");
    ASSERT_EQ(p.clauses().size(), 4u);
    EXPECT_EQ(p.clauses()[0], Clause::make_xor(lits({-1, 2}), 2.5));
    EXPECT_EQ(p.clauses()[1], Clause::make_and(lits({1, 3}), 1.5));
    EXPECT_EQ(p.clauses()[2], Clause::make_symmetric(lits({1, 2, -4}), 2.0, {false, true, true, false}));
    EXPECT_EQ(p.clauses()[3], Clause::make_table(lits({1, 2, 3}), 1.0, {0b101}));
}

TEST(ParseWcnf, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) {
        try {
            parse_wcnf(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("p cnf x 1\n1 0\n"), 1);
    EXPECT_EQ(line_of("p cnf 2 1\n1 3 0\n"), 2);
    EXPECT_EQ(line_of("p wcnf 2 1 10\n0 1 2 0\n"), 2);
    EXPECT_EQ(line_of("p cnf 3 2\n1 2 0\n1 -1 0\n"), 3);
    EXPECT_EQ(line_of("c nothing\n1 2 0\n"), 2);
}

TEST(ParseWcnf, RoundTripRandomCorpus) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 8);
        const Problem p = oracle::random_problem(rng, n, 1 + static_cast<int>(rng() % 8), 5, 0.5, 2.0);
        const Problem back = parse_wcnf(serialize_wcnf(p));
        EXPECT_EQ(back, p) << serialize_wcnf(p);
    }
}

TEST(ClauseSpectrum, OrFourBits) {
    const Clause c = Clause::make_or(lits({1, 2, 3, 4}), 0.2);
    const auto s = clause_spectrum(c);
    EXPECT_DOUBLE_EQ(s[0b0000], 0.2);
    EXPECT_DOUBLE_EQ(s[0b0101], 0.0);
}

TEST(ClauseSpectrum, XorTwoBits) {
    const Clause c = Clause::make_xor(lits({1, 2}), 1.0);
    const auto s = clause_spectrum(c);
    EXPECT_DOUBLE_EQ(s[0b10], 0.0);
    EXPECT_DOUBLE_EQ(s[0b11], 1.0);
}

TEST(ClauseSpectrum, TableSingleRow) {
    const Clause c = Clause::make_table(lits({1, 2, 3}), 1.0, {0b101});
    const auto s = clause_spectrum(c);
    for (uint64_t a = 0; a < 8; ++a) EXPECT_DOUBLE_EQ(s[a], a == 0b101 ? 1.0 : 0.0);
}

TEST(ClauseSpectrum, TwoLevelsMatchOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Problem p = oracle::random_problem(rng, 6, 1, 6, 0.5, 2.0);
        const Clause& c = p.clauses()[0];
        const auto s = clause_spectrum(c);
        ASSERT_EQ(s.size(), size_t{1} << c.width());
        bool any_zero = false, any_weight = false;
        for (uint64_t a = 0; a < s.size(); ++a) {
            uint64_t vars = 0;
            for (int i = 0; i < c.width(); ++i) {
                if ((a >> i) & 1) vars |= uint64_t{1} << (c.literals()[i].variable - 1);
            }
            const bool v = oracle::violated(c, oracle::literal_bits(c, vars));
            EXPECT_NEAR(s[a], v ? c.weight() : 0.0, kWeightTolerance);
            any_zero |= !v;
            any_weight |= v;
        }
        EXPECT_TRUE(any_zero);
        EXPECT_TRUE(any_weight);
    }
}

TEST(ClauseSpectrum, SymmetricReexpression) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        std::vector<Literal> l;
        for (int i = 0; i < k; ++i) l.push_back({i + 1, (rng() & 1) != 0});
        for (const Clause& c : {Clause::make_or(l, 1.5), Clause::make_and(l, 1.5), Clause::make_xor(l, 1.5)}) {
            const Clause s = as_symmetric(c);
            EXPECT_EQ(s.kind(), ClauseKind::Symmetric);
            EXPECT_EQ(clause_spectrum(s), clause_spectrum(c));
        }
    }
}

TEST(Clause, RejectsBadConstruction) {
    EXPECT_THROW(Clause::make_or({}, 1.0), ProblemError);
    EXPECT_THROW(Clause::make_or(lits({1, -1}), 1.0), ProblemError);
    EXPECT_THROW(Clause::make_or(lits({1}), 0.0), ProblemError);
    EXPECT_THROW(Clause::make_table(lits({1, 2}), 1.0, {0, 1, 2, 3}), ProblemError);
    EXPECT_THROW(Clause::make_table(lits({1, 2}), 1.0, {}), ProblemError);
    EXPECT_THROW(Clause::make_symmetric(lits({1, 2}), 1.0, {true, true, true}), ProblemError);
    EXPECT_THROW(Problem(2, {Clause::make_or(lits({3}), 1.0)}), ProblemError);
}

TEST(ProblemEnergy, Examples) {
    EXPECT_DOUBLE_EQ(problem_energy(Problem(3), Assignment{true, false, true}), 0.0);
    const Problem p(1, {Clause::make_or(lits({1}), 1.0), Clause::make_or(lits({-1}), 1.0)});
    EXPECT_DOUBLE_EQ(problem_energy(p, Assignment{true}), 1.0);
    EXPECT_THROW(problem_energy(p, Assignment{true, false}), ProblemError);
}

TEST(ProblemEnergy, MatchesPerClauseOracle) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Problem p = oracle::random_problem(rng, 8, 6, 4, 0.5, 2.0);
        for (uint64_t m = 0; m < 256; ++m) {
            EXPECT_NEAR(problem_energy(p, m), oracle::problem_energy(p, m), 1e-12);
            EXPECT_NEAR(problem_energy(p, from_mask(m, 8)), oracle::problem_energy(p, m), 1e-12);
        }
    }
}

TEST(BruteForce, Examples) {
    const Optimum a = brute_force_optimum(Problem(2, {Clause::make_or(lits({1, 2}), 1.0)}));
    EXPECT_DOUBLE_EQ(a.energy, 0.0);
    EXPECT_EQ(a.argmins, (std::vector<uint64_t>{0b01, 0b10, 0b11}));
    const Optimum b =
        brute_force_optimum(Problem(1, {Clause::make_or(lits({1}), 1.0), Clause::make_or(lits({-1}), 1.0)}));
    EXPECT_DOUBLE_EQ(b.energy, 1.0);
    EXPECT_THROW(brute_force_optimum(Problem(30)), ProblemError);
}

TEST(BruteForce, RandomMax2SatMatchesRescan) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        Problem p(10);
        for (int c = 0; c < 15; ++c) {
            int a = 1 + static_cast<int>(rng() % 10), b;
            do b = 1 + static_cast<int>(rng() % 10);
            while (b == a);
            p.add_clause(Clause::make_or({{a, (rng() & 1) != 0}, {b, (rng() & 1) != 0}}, 1.0));
        }
        const Optimum opt = brute_force_optimum(p);
        double best = 1e300;
        for (uint64_t m = 0; m < 1024; ++m) best = std::min(best, oracle::problem_energy(p, m));
        std::vector<uint64_t> argmins;
        for (uint64_t m = 0; m < 1024; ++m) {
            if (oracle::problem_energy(p, m) <= best + 1e-9) argmins.push_back(m);
        }
        EXPECT_NEAR(opt.energy, best, 1e-12);
        EXPECT_EQ(opt.argmins, argmins);
    }
}
