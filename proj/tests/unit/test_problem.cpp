#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qmcts/errors.hpp"
#include "qmcts/problem.hpp"
#include "qmcts/rng.hpp"

using namespace qmcts;

namespace {

SatInstance random_sat(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> var(0, n - 1), sign(0, 1);
  SatInstance f{n, {}};
  for (int k = 0; k < m; ++k) {
    Clause c;
    for (auto& lit : c) lit = {var(rng), sign(rng) == 1};
    f.clauses.push_back(c);
  }
  return f;
}

}  // namespace

TEST(SatEnergy, SingleClauseAllFalse) {
  SatInstance f{3, {{Literal{0, false}, Literal{1, false}, Literal{2, false}}}};
  EXPECT_EQ(sat_energy(f, 0b000), 1);
  for (Bitstring z = 1; z < 8; ++z) EXPECT_EQ(sat_energy(f, z), 0);
}

TEST(SatEnergy, MatchesDirectClauseEvaluation) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_sat(5, 15, s);
    for (Bitstring z = 0; z < 32; ++z) EXPECT_EQ(sat_energy(f, z), oracle::violated_clauses(f, z));
  }
}

TEST(SatEnergy, RejectsOutOfRangeVariable) {
  SatInstance f{2, {{Literal{0, false}, Literal{1, false}, Literal{2, true}}}};
  EXPECT_THROW(f.validate(), InvalidInstance);
  EXPECT_THROW(build_diagonal(f), InvalidInstance);
}

TEST(MaxCutEnergy, UniformAssignmentCutsNothing) {
  const auto g = generate_regular_graph(10, 3, 5);
  EXPECT_EQ(maxcut_energy(g, 0), g.num_edges());
  EXPECT_EQ(maxcut_energy(g, (1u << 10) - 1), g.num_edges());
}

TEST(MaxCutEnergy, BipartitionCutsEverything) {
  // 6-cycle with alternating sides.
  auto g = MaxCutGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  EXPECT_EQ(maxcut_energy(g, 0b101010), 0);
  EXPECT_EQ(cut_size(g, 0b101010), 6);
}

TEST(MaxCutEnergy, K4) {
  const auto k4 = generate_regular_graph(4, 3, 123);
  ASSERT_EQ(k4.num_edges(), 6);
  EXPECT_EQ(maxcut_energy(k4, 0b0011), 2);
  EXPECT_EQ(cut_size(k4, 0b0011), 4);
  int best = 0;
  for (Bitstring z = 0; z < 16; ++z) best = std::max(best, cut_size(k4, z));
  EXPECT_EQ(best, 4);
}

TEST(MaxCutGraph, NormalizesAndRejectsLoops) {
  auto g = MaxCutGraph::from_edges(3, {{2, 0}, {0, 2}, {1, 0}});
  EXPECT_EQ(g.edges, (std::vector<std::pair<int, int>>{{0, 1}, {0, 2}}));
  EXPECT_THROW(MaxCutGraph::from_edges(3, {{1, 1}}), InvalidInstance);
  EXPECT_THROW(MaxCutGraph::from_edges(3, {{0, 3}}), InvalidInstance);
}

TEST(BuildDiagonal, SingleEdge) {
  const auto d = build_diagonal(MaxCutGraph::from_edges(2, {{0, 1}}));
  EXPECT_EQ(d.energies, (std::vector<std::int32_t>{1, 0, 0, 1}));
  EXPECT_EQ(d.ground_energy, 0);
  EXPECT_EQ(d.ground_states, (std::vector<Bitstring>{1, 2}));
  EXPECT_EQ(d.num_terms, 1);
}

TEST(BuildDiagonal, EnergyPlusCutIsEdgeCount) {
  const auto g = generate_regular_graph(10, 3, 9);
  const auto d = build_diagonal(g);
  for (Bitstring z = 0; z < d.dimension(); ++z) {
    EXPECT_EQ(d.energies[z], oracle::uncut_edges(g, z));
    EXPECT_EQ(d.energies[z] + cut_size(g, z), g.num_edges());
  }
}

TEST(BuildDiagonal, ExhaustiveAgreementUpToTenQubits) {
  for (int n = 3; n <= 10; ++n) {
    const auto f = random_sat(n, 3 * n, 100 + n);
    const auto d = build_diagonal(f);
    int lo = 1 << 30;
    for (Bitstring z = 0; z < d.dimension(); ++z) {
      ASSERT_EQ(d.energies[z], oracle::violated_clauses(f, z));
      lo = std::min(lo, d.energies[z]);
    }
    EXPECT_EQ(d.ground_energy, lo);
  }
}

TEST(BuildDiagonal, UnsatisfiableHasPositiveGround) {
  // All eight sign patterns over three variables: every assignment violates one.
  SatInstance f{3, {}};
  for (int mask = 0; mask < 8; ++mask)
    f.clauses.push_back({Literal{0, (mask & 1) != 0}, Literal{1, (mask & 2) != 0},
                         Literal{2, (mask & 4) != 0}});
  const auto d = build_diagonal(f);
  EXPECT_EQ(d.ground_energy, 1);
  EXPECT_EQ(d.ground_states.size(), 8u);
}

TEST(BuildDiagonal, QubitCap) {
  SatInstance f{25, {{Literal{0, false}, Literal{1, false}, Literal{24, false}}}};
  EXPECT_THROW(build_diagonal(f), ResourceLimit);
  EXPECT_THROW(build_diagonal(f, 10), ResourceLimit);
}

TEST(GenerateSat, UniqueSolutionAndDeterministic) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = generate_sat_unique(7, 3.0, s);
    EXPECT_EQ(f.clauses.size(), 21u);
    EXPECT_DOUBLE_EQ(f.density(), 3.0);
    int zeros = 0;
    for (Bitstring z = 0; z < 128; ++z) zeros += oracle::violated_clauses(f, z) == 0;
    EXPECT_EQ(zeros, 1);
    const auto d = build_diagonal(f);
    EXPECT_EQ(d.ground_energy, 0);
    EXPECT_EQ(d.ground_states.size(), 1u);
    EXPECT_EQ(f, generate_sat_unique(7, 3.0, s));
  }
  EXPECT_NE(generate_sat_unique(7, 3.0, 1), generate_sat_unique(7, 3.0, 2));
}

TEST(GenerateSat, BudgetExhaustion) {
  // alpha = 0.5 on n = 6 leaves variables free, so no unique solution exists.
  try {
    generate_sat_unique(6, 0.5, 1, 50);
    FAIL() << "expected GenerationFailure";
  } catch (const GenerationFailure& e) {
    EXPECT_EQ(e.attempts(), 50u);
  }
}

TEST(GenerateGraph, RegularConnectedDeterministic) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = generate_regular_graph(10, 3, s);
    EXPECT_TRUE(g.is_regular(3));
    EXPECT_TRUE(g.is_connected());
    EXPECT_EQ(g.num_edges(), 15);
    EXPECT_EQ(g, generate_regular_graph(10, 3, s));
  }
  const auto k4 = generate_regular_graph(4, 3, 77);
  EXPECT_EQ(k4.edges, (std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
}

TEST(GenerateGraph, OddDegreeSumRejected) {
  EXPECT_THROW(generate_regular_graph(5, 3, 0), Error);
}

TEST(Dimacs, ParsesSignsAndIndices) {
  const auto f = parse_dimacs("c comment\np cnf 3 1\n1 -2 3 0\n");
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_EQ(f.num_variables, 3);
  EXPECT_EQ(f.clauses[0][0], (Literal{0, false}));
  EXPECT_EQ(f.clauses[0][1], (Literal{1, true}));
  EXPECT_EQ(f.clauses[0][2], (Literal{2, false}));
}

TEST(Dimacs, RoundTrip) {
  const auto f = generate_sat_unique(7, 3.0, 4);
  EXPECT_EQ(parse_dimacs(write_dimacs(f)), f);
}

TEST(Dimacs, ArityErrorCarriesLine) {
  try {
    parse_dimacs("p cnf 3 2\n1 2 3 0\n1 -2 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 3 1\n1 x 3 0\n"), ParseError);
}

TEST(EdgeList, RoundTripAndErrors) {
  const auto g = generate_regular_graph(10, 3, 3);
  EXPECT_EQ(parse_edgelist(write_edgelist(g)), g);
  EXPECT_EQ(parse_edgelist("# c\nn 3\n0 1 # tail\n\n1 2\n"),
            MaxCutGraph::from_edges(3, {{0, 1}, {1, 2}}));
  EXPECT_THROW(parse_edgelist("0 1\n"), ParseError);
  EXPECT_THROW(parse_edgelist("n 2\n0 2\n"), ParseError);
  EXPECT_THROW(parse_edgelist("n 2\n0\n"), ParseError);
}

TEST(CuratedGraphs, NineteenConnectedCubicGraphs) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(QMCTS_DATA_DIR) / "maxcut_n10_3regular";
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto g = parse_edgelist(ss.str());
    EXPECT_EQ(g.num_vertices, 10);
    EXPECT_TRUE(g.is_regular(3));
    EXPECT_TRUE(g.is_connected());
    ++count;
  }
  EXPECT_EQ(count, 19);
}
