#include "qmcts/qaoa.hpp"

#include <cmath>

#include "qmcts/errors.hpp"

namespace qmcts {

Schedule::Schedule(std::vector<double> interleaved) : angles(std::move(interleaved)) {
  if (angles.size() % 2 != 0)
    throw ContractViolation("schedule needs an even number of angles");
}

Schedule Schedule::from_pairs(std::span<const std::pair<double, double>> pairs) {
  Schedule s;
  s.angles.reserve(2 * pairs.size());
  for (auto [g, b] : pairs) {
    s.angles.push_back(g);
    s.angles.push_back(b);
  }
  return s;
}

std::vector<double> Schedule::gammas() const {
  std::vector<double> out;
  for (int i = 0; i < depth(); ++i) out.push_back(gamma(i));
  return out;
}

std::vector<double> Schedule::betas() const {
  std::vector<double> out;
  for (int i = 0; i < depth(); ++i) out.push_back(beta(i));
  return out;
}

Schedule Schedule::negated() const {
  Schedule s = *this;
  for (auto& a : s.angles) a = -a;
  return s;
}

double Statevector::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return acc;
}

Statevector prepare_plus(int num_qubits, int max_qubits) {
  if (num_qubits < 1 || num_qubits > max_qubits)
    throw ResourceLimit("qubit count " + std::to_string(num_qubits) +
                        " outside [1, " + std::to_string(max_qubits) + "]");
  Statevector s;
  s.num_qubits = num_qubits;
  const std::size_t dim = std::size_t{1} << num_qubits;
  s.amplitudes.assign(dim, Amplitude(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  return s;
}

namespace {

void check_dimension(const Statevector& state, std::size_t expected) {
  if (state.amplitudes.size() != expected)
    throw ContractViolation("statevector dimension " +
                            std::to_string(state.amplitudes.size()) +
                            " does not match " + std::to_string(expected));
}

void fill_phase_table(std::vector<Amplitude>& table, std::int32_t max_energy,
                      double gamma) {
  table.resize(static_cast<std::size_t>(max_energy) + 1);
  for (std::int32_t e = 0; e <= max_energy; ++e)
    table[e] = std::polar(1.0, -gamma * static_cast<double>(e));
}

void phase_with_table(Statevector& state, const DiagonalCost& cost,
                      const std::vector<Amplitude>& table) {
  auto* amp = state.amplitudes.data();
  const auto* e = cost.energies.data();
  const std::size_t dim = state.amplitudes.size();
  for (std::size_t z = 0; z < dim; ++z) amp[z] *= table[e[z]];
}

}  // namespace

void apply_cost_phase(Statevector& state, const DiagonalCost& cost, double gamma) {
  check_dimension(state, cost.dimension());
  std::vector<Amplitude> table;
  fill_phase_table(table, cost.max_energy, gamma);
  phase_with_table(state, cost, table);
}

void apply_mixer(Statevector& state, double beta) {
  const std::size_t dim = state.amplitudes.size();
  if (dim != (std::size_t{1} << state.num_qubits))
    throw ContractViolation("statevector dimension is not 2^num_qubits");
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  auto* amp = reinterpret_cast<double*>(state.amplitudes.data());
  // [[c, -is], [-is, c]] on each qubit; complex arithmetic spelled out.
  for (int q = 0; q < state.num_qubits; ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t k = base; k < base + stride; ++k) {
        double* a = amp + 2 * k;
        double* b = amp + 2 * (k + stride);
        const double ar = a[0], ai = a[1], br = b[0], bi = b[1];
        a[0] = c * ar + s * bi;
        a[1] = c * ai - s * br;
        b[0] = c * br + s * ai;
        b[1] = c * bi - s * ar;
      }
    }
  }
}

void apply_schedule(Statevector& state, const DiagonalCost& cost,
                    std::span<const double> angles) {
  if (angles.size() % 2 != 0)
    throw ContractViolation("schedule needs an even number of angles");
  check_dimension(state, cost.dimension());
  std::vector<Amplitude> table;
  for (std::size_t i = 0; i < angles.size(); i += 2) {
    fill_phase_table(table, cost.max_energy, angles[i]);
    phase_with_table(state, cost, table);
    apply_mixer(state, angles[i + 1]);
  }
}

namespace {

CostEvaluation measure(const Statevector& state, const DiagonalCost& cost) {
  CostEvaluation out;
  const std::size_t dim = state.amplitudes.size();
  for (std::size_t z = 0; z < dim; ++z) {
    double p = std::norm(state.amplitudes[z]);
    out.energy += p * cost.energies[z];
  }
  for (auto z : cost.ground_states) out.ground_overlap += std::norm(state.amplitudes[z]);
  return out;
}

}  // namespace

CostEvaluation evaluate_cost(const DiagonalCost& cost, std::span<const double> angles) {
  Statevector state = prepare_plus(cost.num_qubits);
  apply_schedule(state, cost, angles);
  return measure(state, cost);
}

QaoaEvaluator::QaoaEvaluator(const DiagonalCost& cost)
    : cost_(&cost), state_(prepare_plus(cost.num_qubits)) {}

void QaoaEvaluator::simulate(std::span<const double> angles) {
  if (angles.size() % 2 != 0)
    throw ContractViolation("schedule needs an even number of angles");
  ++evaluations_;
  const double amp0 = 1.0 / std::sqrt(static_cast<double>(state_.dimension()));
  std::fill(state_.amplitudes.begin(), state_.amplitudes.end(), Amplitude(amp0, 0.0));
  for (std::size_t i = 0; i < angles.size(); i += 2) {
    fill_phase_table(phases_, cost_->max_energy, angles[i]);
    phase_with_table(state_, *cost_, phases_);
    apply_mixer(state_, angles[i + 1]);
  }
}

double QaoaEvaluator::energy(std::span<const double> angles) {
  simulate(angles);
  double acc = 0.0;
  const auto* e = cost_->energies.data();
  const auto* amp = state_.amplitudes.data();
  for (std::size_t z = 0; z < state_.dimension(); ++z) acc += std::norm(amp[z]) * e[z];
  return acc;
}

CostEvaluation QaoaEvaluator::evaluate(std::span<const double> angles) {
  simulate(angles);
  return measure(state_, *cost_);
}

}  // namespace qmcts
