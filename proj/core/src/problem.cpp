#include "qmcts/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qmcts/errors.hpp"
#include "qmcts/rng.hpp"

namespace qmcts {

double SatInstance::density() const {
  return num_variables > 0
             ? static_cast<double>(clauses.size()) / num_variables
             : 0.0;
}

void SatInstance::validate() const {
  if (num_variables < 1)
    throw InvalidInstance("SAT instance needs at least one variable");
  for (std::size_t a = 0; a < clauses.size(); ++a) {
    for (const auto& lit : clauses[a]) {
      if (lit.variable < 0 || lit.variable >= num_variables)
        throw InvalidInstance("clause " + std::to_string(a) +
                              " references variable " +
                              std::to_string(lit.variable) + " outside [0, " +
                              std::to_string(num_variables) + ")");
    }
  }
}

MaxCutGraph MaxCutGraph::from_edges(int num_vertices,
                                    std::vector<std::pair<int, int>> edges) {
  MaxCutGraph g;
  g.num_vertices = num_vertices;
  for (auto& [i, j] : edges) {
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.validate();
  return g;
}

void MaxCutGraph::validate() const {
  if (num_vertices < 1)
    throw InvalidInstance("graph needs at least one vertex");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [i, j] = edges[e];
    if (i == j)
      throw InvalidInstance("self-loop on vertex " + std::to_string(i));
    if (i < 0 || j < 0 || i >= num_vertices || j >= num_vertices)
      throw InvalidInstance("edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ") outside [0, " +
                            std::to_string(num_vertices) + ")");
    if (i > j) throw InvalidInstance("edge orientation not normalized");
    if (e > 0 && edges[e - 1] >= edges[e])
      throw InvalidInstance("edges not sorted/unique");
  }
}

std::vector<int> MaxCutGraph::degrees() const {
  std::vector<int> deg(num_vertices, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool MaxCutGraph::is_regular(int degree) const {
  auto deg = degrees();
  return std::all_of(deg.begin(), deg.end(),
                     [degree](int d) { return d == degree; });
}

bool MaxCutGraph::is_connected() const {
  if (num_vertices == 0) return true;
  std::vector<int> parent(num_vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = num_vertices;
  for (auto [i, j] : edges) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

int num_qubits(const ProblemInstance& instance) {
  return std::visit(
      [](const auto& inst) {
        if constexpr (std::is_same_v<std::decay_t<decltype(inst)>, SatInstance>)
          return inst.num_variables;
        else
          return inst.num_vertices;
      },
      instance);
}

namespace {

inline bool bit(Bitstring z, int i) { return (z >> i) & 1U; }

void check_bitstring(int n, Bitstring z) {
  if (n < 64 && (z >> n) != 0)
    throw InvalidInstance("bitstring " + std::to_string(z) + " has more than " +
                          std::to_string(n) + " bits");
}

}  // namespace

int sat_energy(const SatInstance& instance, Bitstring z) {
  instance.validate();
  check_bitstring(instance.num_variables, z);
  int violated = 0;
  for (const auto& clause : instance.clauses) {
    bool satisfied = false;
    for (const auto& lit : clause)
      satisfied = satisfied || (bit(z, lit.variable) != lit.negated);
    if (!satisfied) ++violated;
  }
  return violated;
}

int maxcut_energy(const MaxCutGraph& graph, Bitstring z) {
  check_bitstring(graph.num_vertices, z);
  int uncut = 0;
  for (auto [i, j] : graph.edges) uncut += bit(z, i) == bit(z, j);
  return uncut;
}

int cut_size(const MaxCutGraph& graph, Bitstring z) {
  return graph.num_edges() - maxcut_energy(graph, z);
}

DiagonalCost build_diagonal(const ProblemInstance& instance, int max_qubits) {
  const int n = num_qubits(instance);
  if (n < 1) throw InvalidInstance("instance has no qubits");
  if (n > max_qubits)
    throw ResourceLimit("instance has " + std::to_string(n) +
                        " qubits; the configured maximum is " +
                        std::to_string(max_qubits));

  DiagonalCost cost;
  cost.num_qubits = n;
  const std::size_t dim = std::size_t{1} << n;
  cost.energies.assign(dim, 0);

  // Each term adds 1 on the bitstrings that violate it. Clause a is violated
  // exactly when every literal is false, i.e. bit(var) == negated.
  if (const auto* sat = std::get_if<SatInstance>(&instance)) {
    sat->validate();
    cost.num_terms = static_cast<int>(sat->clauses.size());
    for (const auto& clause : sat->clauses) {
      Bitstring mask = 0, want = 0;
      bool contradictory = false;
      for (const auto& lit : clause) {
        Bitstring b = Bitstring{1} << lit.variable;
        Bitstring v = lit.negated ? b : 0;
        if ((mask & b) && (want & b) != v) contradictory = true;
        mask |= b;
        want |= v;
      }
      if (contradictory) continue;  // x or not-x: never violated
      for (Bitstring z = 0; z < dim; ++z)
        cost.energies[z] += (z & mask) == want;
    }
  } else {
    const auto& graph = std::get<MaxCutGraph>(instance);
    graph.validate();
    cost.num_terms = graph.num_edges();
    for (auto [i, j] : graph.edges)
      for (Bitstring z = 0; z < dim; ++z)
        cost.energies[z] += bit(z, i) == bit(z, j);
  }

  auto [lo, hi] = std::minmax_element(cost.energies.begin(), cost.energies.end());
  cost.ground_energy = *lo;
  cost.max_energy = *hi;
  for (Bitstring z = 0; z < dim; ++z)
    if (cost.energies[z] == cost.ground_energy) cost.ground_states.push_back(z);
  return cost;
}

SatInstance generate_sat_unique(int num_variables, double alpha,
                                std::uint64_t seed, std::size_t max_attempts) {
  if (num_variables < 3)
    throw ConfigError("3-SAT generation needs at least 3 variables");
  if (num_variables > kDefaultMaxQubits)
    throw ResourceLimit("uniqueness check by enumeration is capped at " +
                        std::to_string(kDefaultMaxQubits) + " variables");
  const double m_real = alpha * num_variables;
  const auto m = static_cast<long>(std::llround(m_real));
  if (std::abs(m_real - static_cast<double>(m)) > 1e-9 || m < 1)
    throw ConfigError("alpha * n must be a positive integer");

  Rng rng(seed);
  std::uniform_int_distribution<int> pick_var(0, num_variables - 1);
  std::bernoulli_distribution coin(0.5);
  const Bitstring dim = Bitstring{1} << num_variables;

  SatInstance inst;
  inst.num_variables = num_variables;
  std::vector<std::pair<Bitstring, Bitstring>> masks(m);
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    inst.clauses.clear();
    for (long a = 0; a < m; ++a) {
      Clause clause;
      Bitstring mask = 0, want = 0;
      for (int k = 0; k < 3; ++k) {
        int v;
        do {
          v = pick_var(rng);
        } while (mask & (Bitstring{1} << v));
        bool neg = coin(rng);
        clause[k] = Literal{v, neg};
        mask |= Bitstring{1} << v;
        if (neg) want |= Bitstring{1} << v;
      }
      inst.clauses.push_back(clause);
      masks[a] = {mask, want};
    }

    int solutions = 0;
    for (Bitstring z = 0; z < dim && solutions < 2; ++z) {
      bool ok = true;
      for (const auto& [mask, want] : masks) {
        if ((z & mask) == want) {
          ok = false;
          break;
        }
      }
      solutions += ok;
    }
    if (solutions == 1) return inst;
  }
  throw GenerationFailure("no unique-solution 3-SAT instance with n=" +
                              std::to_string(num_variables) +
                              ", m=" + std::to_string(m),
                          max_attempts);
}

MaxCutGraph generate_regular_graph(int num_vertices, int degree,
                                   std::uint64_t seed,
                                   std::size_t max_attempts) {
  if (num_vertices < 1 || degree < 0 || degree >= num_vertices)
    throw ConfigError("regular graph needs 0 <= degree < n");
  if ((num_vertices * degree) % 2 != 0)
    throw ConfigError("n * degree must be even");

  Rng rng(seed);
  std::vector<int> points(static_cast<std::size_t>(num_vertices) * degree);
  for (int v = 0; v < num_vertices; ++v)
    for (int k = 0; k < degree; ++k) points[v * degree + k] = v;

  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::shuffle(points.begin(), points.end(), rng);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(points.size() / 2);
    bool simple = true;
    for (std::size_t k = 0; k < points.size(); k += 2) {
      int i = points[k], j = points[k + 1];
      if (i == j) {
        simple = false;
        break;
      }
      edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    MaxCutGraph g;
    g.num_vertices = num_vertices;
    g.edges = std::move(edges);
    if (num_vertices > 1 && !g.is_connected()) continue;
    return g;
  }
  throw GenerationFailure("no simple connected " + std::to_string(degree) +
                              "-regular graph on " +
                              std::to_string(num_vertices) + " vertices",
                          max_attempts);
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long parse_int(std::string_view tok, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  return value;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!f(line, line_no)) return;
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

SatInstance parse_dimacs(std::string_view text) {
  SatInstance inst;
  long declared_clauses = -1;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto toks = tokens(line);
    if (toks.empty() || toks[0][0] == 'c') return true;
    if (toks[0] == "%") return false;  // SATLIB end marker
    if (toks[0] == "p") {
      if (declared_clauses >= 0) throw ParseError(line_no, "duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf")
        throw ParseError(line_no, "header must read 'p cnf <vars> <clauses>'");
      long n = parse_int(toks[2], line_no);
      declared_clauses = parse_int(toks[3], line_no);
      if (n < 1 || n > 64 || declared_clauses < 0)
        throw ParseError(line_no, "header counts out of range");
      inst.num_variables = static_cast<int>(n);
      return true;
    }
    if (declared_clauses < 0)
      throw ParseError(line_no, "clause before 'p cnf' header");
    for (auto tok : toks) {
      long v = parse_int(tok, line_no);
      if (pending.empty()) pending_line = line_no;
      if (v == 0) {
        if (pending.size() != 3)
          throw ParseError(pending_line, "clause has " +
                                             std::to_string(pending.size()) +
                                             " literals; 3-SAT needs exactly 3");
        inst.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
        continue;
      }
      long var = std::labs(v);
      if (var > inst.num_variables)
        throw ParseError(line_no, "variable " + std::to_string(var) +
                                      " exceeds declared count " +
                                      std::to_string(inst.num_variables));
      pending.push_back(Literal{static_cast<int>(var - 1), v < 0});
    }
    return true;
  });

  if (declared_clauses < 0) throw ParseError(1, "missing 'p cnf' header");
  if (!pending.empty())
    throw ParseError(pending_line, "clause not terminated by 0");
  if (static_cast<long>(inst.clauses.size()) != declared_clauses)
    throw ParseError(1, "header declares " + std::to_string(declared_clauses) +
                            " clauses, found " +
                            std::to_string(inst.clauses.size()));
  return inst;
}

std::string write_dimacs(const SatInstance& instance) {
  std::ostringstream out;
  out << "p cnf " << instance.num_variables << ' ' << instance.clauses.size()
      << '\n';
  for (const auto& clause : instance.clauses) {
    for (const auto& lit : clause)
      out << (lit.negated ? "-" : "") << lit.variable + 1 << ' ';
    out << "0\n";
  }
  return out.str();
}

MaxCutGraph parse_edgelist(std::string_view text) {
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto toks = tokens(line);
    if (toks.empty()) return true;
    if (n < 0) {
      if (toks.size() != 2 || toks[0] != "n")
        throw ParseError(line_no, "expected header 'n <count>'");
      long count = parse_int(toks[1], line_no);
      if (count < 1 || count > 64)
        throw ParseError(line_no, "vertex count out of range");
      n = static_cast<int>(count);
      return true;
    }
    if (toks.size() != 2)
      throw ParseError(line_no, "edge line must hold exactly two vertices");
    long i = parse_int(toks[0], line_no), j = parse_int(toks[1], line_no);
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ParseError(line_no, "vertex index outside [0, " + std::to_string(n) + ")");
    if (i == j) throw ParseError(line_no, "self-loop");
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return true;
  });
  if (n < 0) throw ParseError(1, "missing 'n <count>' header");
  return MaxCutGraph::from_edges(n, std::move(edges));
}

std::string write_edgelist(const MaxCutGraph& graph) {
  std::ostringstream out;
  out << "n " << graph.num_vertices << '\n';
  for (auto [i, j] : graph.edges) out << i << ' ' << j << '\n';
  return out.str();
}

}  // namespace qmcts
