#pragma once

// Exact statevector simulation of the QAOA ansatz
//
//   |g, b> = prod_{i=1..P} exp(-i b_i H_M) exp(-i g_i H_C) |+>^n,
//
// with H_M = sum_i X_i and H_C diagonal. Within a layer the cost phase acts
// first, then the mixer.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qmcts/problem.hpp"

namespace qmcts {

using Amplitude = std::complex<double>;

/// Interleaved QAOA angles (gamma_1, beta_1, ..., gamma_P, beta_P), radians.
struct Schedule {
  std::vector<double> angles;

  Schedule() = default;
  explicit Schedule(std::vector<double> interleaved);
  static Schedule from_pairs(std::span<const std::pair<double, double>> pairs);

  int depth() const { return static_cast<int>(angles.size() / 2); }
  double gamma(int layer) const { return angles[2 * layer]; }
  double beta(int layer) const { return angles[2 * layer + 1]; }
  std::vector<double> gammas() const;
  std::vector<double> betas() const;
  Schedule negated() const;

  bool operator==(const Schedule&) const = default;
};

struct Statevector {
  int num_qubits = 0;
  std::vector<Amplitude> amplitudes;

  std::size_t dimension() const { return amplitudes.size(); }
  double norm_squared() const;
};

/// Uniform superposition |+>^n.
Statevector prepare_plus(int num_qubits, int max_qubits = kDefaultMaxQubits);

/// amplitude[z] *= exp(-i gamma energies[z]).
void apply_cost_phase(Statevector& state, const DiagonalCost& cost, double gamma);

/// exp(-i beta X) on every qubit.
void apply_mixer(Statevector& state, double beta);

/// Applies the P layers of `schedule` to `state` in place.
void apply_schedule(Statevector& state, const DiagonalCost& cost,
                    std::span<const double> angles);

struct CostEvaluation {
  double energy = 0.0;          ///< F_P = <H_C>
  double ground_overlap = 0.0;  ///< total probability on ground states
};

/// Expectation of H_C in the QAOA state for `angles` (interleaved).
CostEvaluation evaluate_cost(const DiagonalCost& cost, std::span<const double> angles);
inline CostEvaluation evaluate_cost(const DiagonalCost& cost, const Schedule& schedule) {
  return evaluate_cost(cost, schedule.angles);
}

/// Reusable evaluator holding a scratch statevector; cheaper than
/// evaluate_cost in tight loops. One instance per thread.
class QaoaEvaluator {
 public:
  explicit QaoaEvaluator(const DiagonalCost& cost);

  double energy(std::span<const double> angles);
  CostEvaluation evaluate(std::span<const double> angles);
  const Statevector& state() const { return state_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  void simulate(std::span<const double> angles);

  const DiagonalCost* cost_;
  Statevector state_;
  std::vector<Amplitude> phases_;
  std::size_t evaluations_ = 0;
};

}  // namespace qmcts
