#include "qmcts/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qmcts/errors.hpp"
#include "qmcts/rng.hpp"

namespace qmcts {

void LocalMinimizerConfig::validate() const {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be > 0");
  if (!(tolerance > 0.0)) throw ConfigError("gradient tolerance must be > 0");
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(max_step > 0.0)) throw ConfigError("max_step must be > 0");
}

std::string to_string(MinimizerStop s) {
  switch (s) {
    case MinimizerStop::converged: return "converged";
    case MinimizerStop::max_iterations: return "max_iterations";
    case MinimizerStop::no_progress: return "no_progress";
  }
  return "?";
}

namespace {

[[noreturn]] void non_finite(std::span<const double> x, double value) {
  std::ostringstream os;
  os.precision(12);
  os << "non-finite cost " << value << " at (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw MinimizerFailure(os.str());
}

// Cost wrapper that counts calls. A non-finite value is remembered rather
// than thrown, since the minimizer calls back through C frames.
class Counted {
 public:
  explicit Counted(const ContinuousCost& f) : f_(f) {}
  double operator()(std::span<const double> x) {
    ++calls;
    const double v = f_(x);
    if (!std::isfinite(v) && bad_point.empty()) {
      bad_point.assign(x.begin(), x.end());
      bad_value = v;
    }
    return v;
  }
  void check() const {
    if (!bad_point.empty()) non_finite(bad_point, bad_value);
  }
  long calls = 0;
  std::vector<double> bad_point;
  double bad_value = 0.0;

 private:
  const ContinuousCost& f_;
};

std::vector<double> fd_gradient(Counted& f, std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

std::vector<double> finite_difference_gradient(const ContinuousCost& f,
                                               std::span<const double> x, double h) {
  Counted counted(f);
  return fd_gradient(counted, x, h);
}

MinimizeResult minimize_bfgs(const ContinuousCost& cost, std::vector<double> x,
                             const LocalMinimizerConfig& config) {
  config.validate();
  for (double v : x)
    if (!std::isfinite(v)) throw ContractViolation("minimizer start must be finite");
  static const auto previous_handler = gsl_set_error_handler_off();
  (void)previous_handler;

  struct Problem {
    Counted f;
    double h;
  } prob{Counted(cost), config.step};
  const std::size_t n = x.size();
  MinimizeResult out;
  out.start_energy = prob.f(x);
  prob.f.check();
  out.point = x;
  out.energy = out.start_energy;
  if (n == 0) {
    out.evaluations = prob.f.calls;
    return out;
  }

  auto view = [](const gsl_vector* v) { return std::span<const double>(v->data, v->size); };
  gsl_multimin_function_fdf fdf;
  fdf.n = n;
  fdf.params = &prob;
  fdf.f = [](const gsl_vector* v, void* p) {
    auto& pr = *static_cast<Problem*>(p);
    return pr.f(std::span<const double>(v->data, v->size));
  };
  fdf.df = [](const gsl_vector* v, void* p, gsl_vector* g) {
    auto& pr = *static_cast<Problem*>(p);
    const auto grad = fd_gradient(pr.f, std::span<const double>(v->data, v->size), pr.h);
    std::copy(grad.begin(), grad.end(), g->data);
  };
  fdf.fdf = [](const gsl_vector* v, void* p, double* f, gsl_vector* g) {
    auto& pr = *static_cast<Problem*>(p);
    const std::span<const double> at(v->data, v->size);
    *f = pr.f(at);
    const auto grad = fd_gradient(pr.f, at, pr.h);
    std::copy(grad.begin(), grad.end(), g->data);
  };

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> start(gsl_vector_alloc(n),
                                                                &gsl_vector_free);
  std::copy(x.begin(), x.end(), start->data);
  std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> m(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n),
      &gsl_multimin_fdfminimizer_free);
  gsl_multimin_fdfminimizer_set(m.get(), &fdf, start.get(), config.max_step, 0.1);
  prob.f.check();

  out.stop = MinimizerStop::max_iterations;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    if (gsl_blas_dnrm2(m->gradient) <= config.tolerance) {
      out.stop = MinimizerStop::converged;
      break;
    }
    const int status = gsl_multimin_fdfminimizer_iterate(m.get());
    prob.f.check();
    if (status != GSL_SUCCESS) {
      out.stop = MinimizerStop::no_progress;
      break;
    }
  }
  if (iter == config.max_iterations && gsl_blas_dnrm2(m->gradient) <= config.tolerance)
    out.stop = MinimizerStop::converged;

  // The line search only accepts decreasing steps; keep the start otherwise.
  if (m->f <= out.start_energy) {
    const auto p = view(m->x);
    out.point.assign(p.begin(), p.end());
    out.energy = m->f;
  }
  out.gradient_norm = gsl_blas_dnrm2(m->gradient);
  out.iterations = iter;
  out.evaluations = prob.f.calls;
  return out;
}

LocalMinimum local_minimize(const DiagonalCost& cost, const Schedule& start,
                            const LocalMinimizerConfig& config) {
  QaoaEvaluator evaluator(cost);
  ContinuousCost f = [&evaluator](std::span<const double> a) { return evaluator.energy(a); };
  LocalMinimum out;
  out.details = minimize_bfgs(f, start.angles, config);
  out.schedule = Schedule(out.details.point);
  out.energy = out.details.energy;
  return out;
}

HybridResult mcts_then_descend(const DiagonalCost& cost, int depth, const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer, int repeats) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  const SearchSpace space = SearchSpace::unrestricted(depth, config.branching);
  HybridResult out;
  for (int r = 0; r < repeats; ++r) {
    MctsConfig c = config;
    c.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(r)});
    DescentRecord rec;
    rec.game = play_game(space, qaoa_leaf_cost(cost), c);
    rec.descended = local_minimize(cost, rec.game.schedule, minimizer);
    out.mcts_evaluations += rec.game.n_fev;
    out.minimizer_evaluations += rec.descended.details.evaluations;
    if (out.runs.empty() || rec.descended.energy < out.runs[out.best_run].descended.energy)
      out.best_run = out.runs.size();
    out.runs.push_back(std::move(rec));
  }
  out.schedule = out.runs[out.best_run].descended.schedule;
  out.energy = out.runs[out.best_run].descended.energy;
  return out;
}

BasinCache::BasinCache(ContinuousCost cost, LocalMinimizerConfig config)
    : cost_(std::move(cost)), config_(config) {
  config_.validate();
}

const LocalMinimum& BasinCache::lookup(std::span<const int> choices,
                                       std::span<const double> angles) {
  std::vector<int> key(choices.begin(), choices.end());
  auto it = cache_.find(key);
  if (it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  LocalMinimum m;
  m.details = minimize_bfgs(cost_, std::vector<double>(angles.begin(), angles.end()), config_);
  m.schedule = Schedule(m.details.point);
  m.energy = m.details.energy;
  evaluations_ += m.details.evaluations;
  return cache_.emplace(std::move(key), std::move(m)).first->second;
}

BasinResult basin_rollout_game(const ContinuousCost& cost, const SearchSpace& space,
                               const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer) {
  auto cache = std::make_shared<BasinCache>(cost, minimizer);
  LeafCost leaf = [cache](std::span<const int> c, std::span<const double> a) {
    return cache->lookup(c, a).energy;
  };
  BasinResult out;
  out.game = play_game(space, leaf, config);
  out.leaf_schedule = out.game.schedule;
  out.leaf_energy = cost(out.leaf_schedule.angles);
  const LocalMinimum& m = cache->lookup(out.game.choices, out.leaf_schedule.angles);
  out.game.schedule = m.schedule;
  out.game.energy = m.energy;
  out.mcts_evaluations = out.game.n_fev;
  out.minimizer_evaluations = cache->evaluations();
  out.distinct_leaves = cache->size();
  return out;
}

BasinResult basin_rollout_game(const DiagonalCost& cost, const SearchSpace& space,
                               const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer) {
  auto evaluator = std::make_shared<QaoaEvaluator>(cost);
  ContinuousCost f = [evaluator](std::span<const double> a) { return evaluator->energy(a); };
  return basin_rollout_game(f, space, config, minimizer);
}

}  // namespace qmcts
