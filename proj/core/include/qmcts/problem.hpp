#pragma once

// Classical optimization instances (MAX-3-SAT, unweighted MaxCut) and their
// diagonal cost Hamiltonians.
//
// Bit convention used everywhere: bit i of a bitstring z (least significant
// bit = qubit 0) is the value of variable / vertex i. A SAT literal x_i is
// true when bit i is 1; its negation is true when bit i is 0.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qmcts {

using Bitstring = std::uint64_t;

/// Largest qubit count build_diagonal accepts unless told otherwise.
inline constexpr int kDefaultMaxQubits = 24;

struct Literal {
  int variable = 0;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

using Clause = std::array<Literal, 3>;

struct SatInstance {
  int num_variables = 0;
  std::vector<Clause> clauses;

  /// Clause density m/n.
  double density() const;

  /// Throws InvalidInstance if a literal refers to a variable outside [0, n).
  void validate() const;

  bool operator==(const SatInstance&) const = default;
};

struct MaxCutGraph {
  int num_vertices = 0;
  /// Undirected edges stored as (i, j) with i < j, sorted and unique.
  std::vector<std::pair<int, int>> edges;

  /// Normalizes orientation, sorts and deduplicates. Throws InvalidInstance
  /// on self-loops or out-of-range vertices.
  static MaxCutGraph from_edges(int num_vertices,
                                std::vector<std::pair<int, int>> edges);

  int num_edges() const { return static_cast<int>(edges.size()); }
  std::vector<int> degrees() const;
  bool is_regular(int degree) const;
  bool is_connected() const;
  void validate() const;

  bool operator==(const MaxCutGraph&) const = default;
};

using ProblemInstance = std::variant<SatInstance, MaxCutGraph>;

int num_qubits(const ProblemInstance& instance);

/// Number of clauses violated by the assignment encoded in `z`.
int sat_energy(const SatInstance& instance, Bitstring z);

/// Number of uncut edges (both endpoints carry the same bit).
int maxcut_energy(const MaxCutGraph& graph, Bitstring z);

/// Cut size N_E - energy.
int cut_size(const MaxCutGraph& graph, Bitstring z);

/// The cost Hamiltonian's spectrum over all 2^n computational basis states.
struct DiagonalCost {
  int num_qubits = 0;
  std::vector<std::int32_t> energies;
  std::int32_t ground_energy = 0;
  std::int32_t max_energy = 0;
  std::vector<Bitstring> ground_states;
  /// Number of terms in H_C (clauses or edges).
  int num_terms = 0;

  std::size_t dimension() const { return energies.size(); }
};

DiagonalCost build_diagonal(const ProblemInstance& instance,
                            int max_qubits = kDefaultMaxQubits);

/// Random 3-SAT instance with exactly one satisfying assignment, found by
/// rejection sampling; uniqueness is verified by exhaustive enumeration.
/// Deterministic in `seed`.
SatInstance generate_sat_unique(int num_variables, double alpha,
                                std::uint64_t seed,
                                std::size_t max_attempts = 1'000'000);

/// Simple connected `degree`-regular graph from the pairing model with
/// rejection of loops, multi-edges and disconnected samples.
MaxCutGraph generate_regular_graph(int num_vertices, int degree,
                                   std::uint64_t seed,
                                   std::size_t max_attempts = 1'000'000);

/// DIMACS CNF. Every clause must have exactly three literals.
SatInstance parse_dimacs(std::string_view text);
std::string write_dimacs(const SatInstance& instance);

/// Edge list: a "n <count>" header followed by one "i j" pair per line,
/// 0-based vertex labels. '#' starts a comment.
MaxCutGraph parse_edgelist(std::string_view text);
std::string write_edgelist(const MaxCutGraph& graph);

}  // namespace qmcts
