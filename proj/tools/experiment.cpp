#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "qmcts/errors.hpp"
#include "qmcts/rng.hpp"

namespace qmcts::cli {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::vanilla: return "vanilla";
    case Protocol::sp: return "sp";
    case Protocol::ssr: return "ssr";
    case Protocol::ssr_sp: return "ssr_sp";
    case Protocol::hybrid_init: return "hybrid_init";
    case Protocol::hybrid_basin: return "hybrid_basin";
  }
  return "?";
}

Protocol parse_protocol(const std::string& s) {
  for (auto p : {Protocol::vanilla, Protocol::sp, Protocol::ssr, Protocol::ssr_sp,
                 Protocol::hybrid_init, Protocol::hybrid_basin})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown protocol '" + s + "'");
}

fs::path default_outdir() {
  if (const char* env = std::getenv("QMCTS_OUTDIR"); env && *env) return env;
  return "results";
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void check_keys(const Json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Trend parse_trend(const std::string& s) {
  if (s == "increasing") return Trend::increasing;
  if (s == "decreasing") return Trend::decreasing;
  throw ConfigError("trend must be 'increasing' or 'decreasing', got '" + s + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  if (p_min < 1 || p_max < p_min) throw ConfigError("need 1 <= p_min <= p_max");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (hybrid_repeats < 1) throw ConfigError("hybrid_repeats must be >= 1");
  if (noise.empty()) throw ConfigError("noise grid must not be empty");
  for (double s : noise)
    if (!(s >= 0.0)) throw ConfigError("noise levels must be >= 0");
  for (int p : noise_steps)
    if (p < 1) throw ConfigError("noise steps must be >= 1");
  if (problem.files.empty() && !problem.generate)
    throw ConfigError("problem needs 'files', 'directory' or 'generate'");
  for (const auto& f : problem.files)
    if (!fs::exists(f)) throw ConfigError("instance file not found: " + f.string());
  for (double d : softening.deltas)
    if (!(d >= 0.0)) throw ConfigError("softening values must be >= 0");
  edges.validate();
  minimizer.validate();
  if (landscape.depth < 1) throw ConfigError("landscape depth must be >= 1");
  if (!landscape.restrict_from.empty() && !fs::exists(landscape.restrict_from))
    throw ConfigError("landscape restrict_from not found: " + landscape.restrict_from.string());
}

ExperimentConfig parse_config(const Json& doc, const fs::path& base_dir) {
  check_keys(doc, "config",
             {"name", "problem", "protocol", "mcts", "p_min", "p_max", "softening", "edges",
              "noise", "noise_steps", "repeats", "seed", "outdir", "minimizer",
              "hybrid_repeats", "landscape", "jobs", "resume"});
  ExperimentConfig c;
  c.name = get<std::string>(doc, "name", c.name);
  c.outdir = default_outdir();

  if (!doc.contains("problem")) throw ConfigError("config needs a 'problem' section");
  const Json& prob = doc.at("problem");
  check_keys(prob, "problem", {"type", "files", "directory", "generate"});
  const auto type = get<std::string>(prob, "type", "sat");
  if (type == "sat") c.problem.kind = ProblemKind::sat;
  else if (type == "maxcut") c.problem.kind = ProblemKind::maxcut;
  else throw ConfigError("problem type must be 'sat' or 'maxcut', got '" + type + "'");
  for (const auto& f : get<std::vector<std::string>>(prob, "files", {}))
    c.problem.files.push_back(resolve(base_dir, f));
  if (prob.contains("directory")) {
    const fs::path dir = resolve(base_dir, prob.at("directory").get<std::string>());
    if (!fs::is_directory(dir)) throw ConfigError("problem directory not found: " + dir.string());
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().filename().string().front() != '.')
        found.push_back(e.path());
    std::sort(found.begin(), found.end());
    c.problem.files.insert(c.problem.files.end(), found.begin(), found.end());
  }
  if (prob.contains("generate")) {
    const Json& g = prob.at("generate");
    check_keys(g, "problem.generate", {"count", "n", "alpha", "degree", "seed"});
    GeneratorSpec spec;
    spec.count = get(g, "count", spec.count);
    spec.n = get(g, "n", spec.n);
    spec.alpha = get(g, "alpha", spec.alpha);
    spec.degree = get(g, "degree", spec.degree);
    spec.seed = get<std::uint64_t>(g, "seed", spec.seed);
    if (spec.count < 1) throw ConfigError("generate.count must be >= 1");
    c.problem.generate = spec;
  }

  c.protocol = parse_protocol(get<std::string>(doc, "protocol", "ssr"));
  if (doc.contains("mcts")) {
    const Json& m = doc.at("mcts");
    check_keys(m, "mcts",
               {"exploration", "nu", "branching", "cycles_initial", "cycles_per_turn",
                "final_move", "reuse_subtree"});
    c.mcts.exploration = get(m, "exploration", c.mcts.exploration);
    c.mcts.nu = get(m, "nu", c.mcts.nu);
    c.mcts.branching = get(m, "branching", c.mcts.branching);
    c.mcts.budget.initial = get(m, "cycles_initial", c.mcts.budget.initial);
    c.mcts.budget.per_turn = get(m, "cycles_per_turn", c.mcts.budget.per_turn);
    c.mcts.reuse_subtree = get(m, "reuse_subtree", c.mcts.reuse_subtree);
    if (m.contains("final_move"))
      c.final_move = parse_final_move(m.at("final_move").get<std::string>());
  }
  c.p_min = get(doc, "p_min", c.p_min);
  c.p_max = get(doc, "p_max", std::max(c.p_min, c.p_max));
  if (doc.contains("softening"))
    c.softening.deltas = get<std::vector<double>>(doc, "softening", {});
  if (doc.contains("edges")) {
    const Json& e = doc.at("edges");
    check_keys(e, "edges",
               {"gamma_low", "gamma_high", "beta_low", "beta_high", "gamma_trend",
                "beta_trend", "pinch"});
    c.edges.gamma_low = get(e, "gamma_low", c.edges.gamma_low);
    c.edges.gamma_high = get(e, "gamma_high", c.edges.gamma_high);
    c.edges.beta_low = get(e, "beta_low", c.edges.beta_low);
    c.edges.beta_high = get(e, "beta_high", c.edges.beta_high);
    if (e.contains("gamma_trend"))
      c.edges.gamma_trend = parse_trend(e.at("gamma_trend").get<std::string>());
    if (e.contains("beta_trend"))
      c.edges.beta_trend = parse_trend(e.at("beta_trend").get<std::string>());
    c.edges.pinch = get(e, "pinch", c.edges.pinch);
  }
  if (doc.contains("noise")) {
    const Json& n = doc.at("noise");
    c.noise = n.is_array() ? n.get<std::vector<double>>() : std::vector<double>{n.get<double>()};
  }
  c.noise_steps = get(doc, "noise_steps", c.noise_steps);
  c.repeats = get(doc, "repeats", c.repeats);
  c.seed = get<std::uint64_t>(doc, "seed", c.seed);
  if (doc.contains("outdir")) c.outdir = resolve(base_dir, doc.at("outdir").get<std::string>());
  if (doc.contains("minimizer")) {
    const Json& m = doc.at("minimizer");
    check_keys(m, "minimizer", {"step", "tolerance", "max_iterations", "max_step"});
    c.minimizer.step = get(m, "step", c.minimizer.step);
    c.minimizer.tolerance = get(m, "tolerance", c.minimizer.tolerance);
    c.minimizer.max_iterations = get(m, "max_iterations", c.minimizer.max_iterations);
    c.minimizer.max_step = get(m, "max_step", c.minimizer.max_step);
  }
  c.hybrid_repeats = get(doc, "hybrid_repeats", c.hybrid_repeats);
  if (doc.contains("landscape")) {
    const Json& l = doc.at("landscape");
    check_keys(l, "landscape",
               {"depth", "restrict_from", "delta", "max_leaves", "threads",
                "periodic_distance"});
    c.landscape.depth = get(l, "depth", c.landscape.depth);
    if (l.contains("restrict_from"))
      c.landscape.restrict_from = resolve(base_dir, l.at("restrict_from").get<std::string>());
    c.landscape.delta = get(l, "delta", c.landscape.delta);
    c.landscape.max_leaves = get<std::uint64_t>(l, "max_leaves", c.landscape.max_leaves);
    c.landscape.threads = get(l, "threads", c.landscape.threads);
    c.landscape.periodic_distance = get(l, "periodic_distance", c.landscape.periodic_distance);
  }
  c.jobs = get(doc, "jobs", c.jobs);
  c.resume = get(doc, "resume", c.resume);
  return c;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return parse_config(doc, file.parent_path());
}

// ---------------------------------------------------------------------------
// Instances

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

std::string generated_name(const ProblemSpec& spec, int k) {
  char buf[64];
  const auto& g = *spec.generate;
  if (spec.kind == ProblemKind::sat)
    std::snprintf(buf, sizeof buf, "sat_n%d_%03d", g.n, k);
  else
    std::snprintf(buf, sizeof buf, "maxcut_n%d_d%d_%03d", g.n, g.degree, k);
  return buf;
}

ProblemInstance generate_one(const ProblemSpec& spec, int k) {
  const auto& g = *spec.generate;
  const auto seed = derive_seed(g.seed, {static_cast<std::uint64_t>(k)});
  if (spec.kind == ProblemKind::sat) return generate_sat_unique(g.n, g.alpha, seed);
  return generate_regular_graph(g.n, g.degree, seed);
}

}  // namespace

std::vector<NamedInstance> load_instances(const ProblemSpec& spec) {
  std::vector<NamedInstance> out;
  for (const auto& f : spec.files) {
    const std::string text = read_file(f);
    try {
      if (spec.kind == ProblemKind::sat)
        out.push_back({f.stem().string(), parse_dimacs(text)});
      else
        out.push_back({f.stem().string(), parse_edgelist(text)});
    } catch (const ParseError& e) {
      throw ParseError(e.line(), f.string() + ": " + e.what());
    }
  }
  if (spec.generate)
    for (int k = 0; k < spec.generate->count; ++k)
      out.push_back({generated_name(spec, k), generate_one(spec, k)});
  std::set<std::string> names;
  for (const auto& i : out)
    if (!names.insert(i.name).second) throw ConfigError("duplicate instance name " + i.name);
  return out;
}

MctsConfig protocol_config(const ExperimentConfig& cfg) {
  MctsConfig c = cfg.mcts;
  const bool sp = cfg.protocol == Protocol::sp || cfg.protocol == Protocol::ssr_sp ||
                  cfg.protocol == Protocol::hybrid_basin;
  c.variant = sp ? Variant::single_player : Variant::vanilla;
  c.final_move = cfg.final_move.value_or(sp ? FinalMove::best_path : FinalMove::max_child);
  return c;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t instance, int repeat, int depth) {
  return derive_seed(master, {static_cast<std::uint64_t>(instance),
                              static_cast<std::uint64_t>(repeat),
                              static_cast<std::uint64_t>(depth)});
}

// ---------------------------------------------------------------------------
// Records

namespace {

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(round12(v)) : Json(nullptr); }

}  // namespace

Json to_json(const RunRecord& r) {
  Json j;
  j["instance"] = r.instance;
  j["protocol"] = r.protocol;
  j["repeat"] = r.repeat;
  j["noise"] = round12(r.noise);
  j["depth"] = r.depth;
  j["seed"] = r.seed;
  j["energy"] = round12(r.energy);
  j["best_rollout_energy"] = number_or_null(r.best_rollout_energy);
  j["n_fev"] = r.n_fev;
  j["minimizer_fev"] = r.minimizer_fev;
  j["ratio"] = number_or_null(r.ratio);
  Json gammas = Json::array(), betas = Json::array(), exact = Json::array();
  for (int i = 0; i < r.schedule.depth(); ++i) {
    gammas.push_back(round12(r.schedule.gamma(i)));
    betas.push_back(round12(r.schedule.beta(i)));
  }
  for (double a : r.schedule.angles) exact.push_back(hexfloat(a));
  j["gamma"] = gammas;
  j["beta"] = betas;
  j["choices"] = r.choices;
  j["angles_exact"] = exact;
  return j;
}

RunRecord read_record(const fs::path& file) {
  Json j;
  try {
    j = Json::parse(read_file(file));
    RunRecord r;
    r.instance = j.at("instance").get<std::string>();
    r.protocol = j.at("protocol").get<std::string>();
    r.repeat = j.at("repeat").get<int>();
    r.noise = j.at("noise").get<double>();
    r.depth = j.at("depth").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.energy = j.at("energy").get<double>();
    r.best_rollout_energy =
        j.at("best_rollout_energy").is_null() ? NAN : j.at("best_rollout_energy").get<double>();
    r.n_fev = j.at("n_fev").get<long>();
    r.minimizer_fev = j.at("minimizer_fev").get<long>();
    r.ratio = j.at("ratio").is_null() ? NAN : j.at("ratio").get<double>();
    r.choices = j.at("choices").get<std::vector<int>>();
    std::vector<double> angles;
    for (const auto& s : j.at("angles_exact")) angles.push_back(std::strtod(s.get<std::string>().c_str(), nullptr));
    r.schedule = Schedule(std::move(angles));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "instance,protocol,repeat,noise,depth,seed,energy,best_rollout_energy,n_fev,"
         "minimizer_fev,ratio,angles\n";
  for (const auto& r : records) {
    out << r.instance << ',' << r.protocol << ',' << r.repeat << ',' << format_number(r.noise)
        << ',' << r.depth << ',' << r.seed << ',' << format_number(r.energy) << ','
        << format_number(r.best_rollout_energy) << ',' << r.n_fev << ',' << r.minimizer_fev
        << ',' << (std::isfinite(r.ratio) ? format_number(r.ratio) : "") << ',';
    for (std::size_t i = 0; i < r.schedule.angles.size(); ++i)
      out << (i ? ";" : "") << format_number(r.schedule.angles[i]);
    out << '\n';
  }
}

namespace {

struct SummaryRow {
  Statistics energy;
  std::optional<Statistics> ratio;
};

using SummaryKey = std::tuple<std::string, double, int>;

void emit_summary(std::ostream& out, const std::map<SummaryKey, std::vector<double>>& energies,
                  const std::map<SummaryKey, std::vector<double>>& ratios) {
  out << "protocol,noise,depth,count,mean,std,best,ratio_mean,ratio_std,ratio_best\n";
  for (const auto& [key, values] : energies) {
    const auto s = summarize(values);
    out << std::get<0>(key) << ',' << format_number(std::get<1>(key)) << ',' << std::get<2>(key)
        << ',' << s.count << ',' << format_number(s.mean) << ',' << format_number(s.std) << ','
        << format_number(s.best);
    auto it = ratios.find(key);
    if (it != ratios.end() && it->second.size() == values.size()) {
      const auto r = summarize(it->second);
      double best = *std::max_element(it->second.begin(), it->second.end());
      out << ',' << format_number(r.mean) << ',' << format_number(r.std) << ','
          << format_number(best);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  std::map<SummaryKey, std::vector<double>> energies, ratios;
  for (const auto& r : records) {
    SummaryKey key{r.protocol, r.noise, r.depth};
    energies[key].push_back(r.energy);
    if (std::isfinite(r.ratio)) ratios[key].push_back(r.ratio);
  }
  emit_summary(out, energies, ratios);
}

// ---------------------------------------------------------------------------
// Execution

namespace {

// Runs fn(0..count-1) on `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t t = 0; t < n; ++t)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct Prepared {
  std::vector<NamedInstance> instances;
  std::vector<DiagonalCost> costs;
};

Prepared prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  Prepared p;
  p.instances = load_instances(cfg.problem);
  for (const auto& i : p.instances) p.costs.push_back(build_diagonal(i.problem));
  return p;
}

fs::path experiment_dir(const ExperimentConfig& cfg) { return cfg.outdir / cfg.name; }

fs::path run_dir(const ExperimentConfig& cfg, const std::string& instance, double noise,
                 int repeat) {
  fs::path dir = experiment_dir(cfg) / instance / to_string(cfg.protocol);
  if (cfg.noise.size() > 1 || noise != 0.0) dir /= "noise_" + format_number(noise);
  if (cfg.repeats > 1) dir /= "repeat_" + std::to_string(repeat);
  return dir;
}

fs::path depth_file(const fs::path& dir, int depth) {
  return dir / ("depth_" + std::to_string(depth) + ".json");
}

RunRecord make_record(const std::string& instance, const ExperimentConfig& cfg, int repeat,
                      double noise, const GameResult& g, const DiagonalCost& cost) {
  RunRecord r;
  r.instance = instance;
  r.protocol = to_string(cfg.protocol);
  r.repeat = repeat;
  r.noise = noise;
  r.depth = g.depth;
  r.seed = g.seed;
  r.energy = g.energy;
  r.best_rollout_energy = g.best_rollout_energy;
  r.n_fev = g.n_fev;
  r.ratio = cfg.problem.kind == ProblemKind::maxcut ? approximation_ratio(cost, g.energy) : NAN;
  r.schedule = g.schedule;
  r.choices = g.choices;
  return r;
}

GameResult to_game(const RunRecord& r) {
  GameResult g;
  g.schedule = r.schedule;
  g.energy = r.energy;
  g.best_rollout_energy = r.best_rollout_energy;
  g.n_fev = r.n_fev;
  g.choices = r.choices;
  g.seed = r.seed;
  g.depth = r.depth;
  return g;
}

void save(const fs::path& file, const RunRecord& r) { write_file(file, to_json(r).dump(2) + "\n"); }

void write_rollups(const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
  std::ostringstream results, summary;
  write_results_csv(results, records);
  write_summary_csv(summary, records);
  write_file(experiment_dir(cfg) / "results.csv", results.str());
  write_file(experiment_dir(cfg) / "summary.csv", summary.str());
}

// All depths of one (instance, noise, repeat) task.
std::vector<RunRecord> run_task(const ExperimentConfig& cfg, const NamedInstance& inst,
                                const DiagonalCost& cost, std::size_t index, double noise,
                                int repeat) {
  const fs::path dir = run_dir(cfg, inst.name, noise, repeat);
  MctsConfig base = protocol_config(cfg);
  base.noise_sigma = noise;
  std::vector<RunRecord> out;

  switch (cfg.protocol) {
    case Protocol::ssr:
    case Protocol::ssr_sp: {
      IterativeOptions opt;
      opt.p_max = cfg.p_max;
      opt.base = base;
      opt.base.seed = run_seed(cfg.seed, index, repeat, 0);
      opt.softening = cfg.softening;
      opt.edges = cfg.edges;
      if (cfg.resume)
        for (int p = 1; p <= cfg.p_max && fs::exists(depth_file(dir, p)); ++p)
          opt.completed.push_back(to_game(read_record(depth_file(dir, p))));
      opt.on_depth = [&](const GameResult& g) {
        save(depth_file(dir, g.depth), make_record(inst.name, cfg, repeat, noise, g, cost));
      };
      for (const auto& g : run_iterative(cost, opt))
        if (g.depth >= cfg.p_min) out.push_back(make_record(inst.name, cfg, repeat, noise, g, cost));
      break;
    }
    case Protocol::vanilla:
    case Protocol::sp:
      for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
        const fs::path file = depth_file(dir, p);
        if (cfg.resume && fs::exists(file)) {
          out.push_back(read_record(file));
          continue;
        }
        MctsConfig c = base;
        c.seed = run_seed(cfg.seed, index, repeat, p);
        const auto g = play_game(SearchSpace::unrestricted(p, c.branching), qaoa_leaf_cost(cost), c);
        out.push_back(make_record(inst.name, cfg, repeat, noise, g, cost));
        save(file, out.back());
      }
      break;
    case Protocol::hybrid_init:
      for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
        MctsConfig c = base;
        c.seed = run_seed(cfg.seed, index, repeat, p);
        const auto h = mcts_then_descend(cost, p, c, cfg.minimizer, cfg.hybrid_repeats);
        const auto& best = h.runs[h.best_run];
        GameResult g = best.game;
        g.schedule = h.schedule;
        g.energy = h.energy;
        g.n_fev = h.mcts_evaluations;
        g.choices.clear();
        RunRecord r = make_record(inst.name, cfg, repeat, noise, g, cost);
        r.minimizer_fev = h.minimizer_evaluations;
        r.best_rollout_energy = best.game.energy;  // raw MCTS energy of the winning game
        out.push_back(r);
        save(depth_file(dir, p), r);
      }
      break;
    case Protocol::hybrid_basin:
      for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
        MctsConfig c = base;
        c.seed = run_seed(cfg.seed, index, repeat, p);
        const auto b = basin_rollout_game(cost, SearchSpace::unrestricted(p, c.branching), c,
                                          cfg.minimizer);
        RunRecord r = make_record(inst.name, cfg, repeat, noise, b.game, cost);
        r.minimizer_fev = b.minimizer_evaluations;
        out.push_back(r);
        save(depth_file(dir, p), r);
      }
      break;
  }
  return out;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const Prepared prep = prepare(cfg);
  struct Task {
    std::size_t instance;
    double noise;
    int repeat;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < prep.instances.size(); ++i)
    for (double s : cfg.noise)
      for (int r = 0; r < cfg.repeats; ++r) tasks.push_back({i, s, r});

  std::vector<std::vector<RunRecord>> results(tasks.size());
  std::mutex log_mutex;
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
    const auto& t = tasks[k];
    results[k] = run_task(cfg, prep.instances[t.instance], prep.costs[t.instance], t.instance,
                          t.noise, t.repeat);
    std::lock_guard lock(log_mutex);
    log << "[" << (k + 1) << "/" << tasks.size() << "] " << prep.instances[t.instance].name
        << " " << to_string(cfg.protocol) << " noise=" << format_number(t.noise)
        << " repeat=" << t.repeat << " final energy "
        << (results[k].empty() ? std::string("-") : format_number(results[k].back().energy))
        << '\n';
  });

  std::vector<RunRecord> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  write_rollups(cfg, all);
  return all;
}

std::vector<RunRecord> run_noise_study(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.protocol != Protocol::ssr && cfg.protocol != Protocol::ssr_sp)
    throw ConfigError("noise-study needs protocol ssr or ssr_sp");
  const Prepared prep = prepare(cfg);
  const int top = *std::max_element(cfg.noise_steps.begin(), cfg.noise_steps.end());

  // Noiseless optima per instance for every step depth.
  std::vector<std::vector<GameResult>> optima(prep.instances.size());
  parallel_for(prep.instances.size(), cfg.jobs, [&](std::size_t i) {
    IterativeOptions opt;
    opt.p_max = top;
    opt.base = protocol_config(cfg);
    opt.base.noise_sigma = 0.0;
    opt.base.seed = run_seed(cfg.seed, i, 0, 0);
    opt.softening = cfg.softening;
    opt.edges = cfg.edges;
    optima[i] = run_iterative(prep.costs[i], opt);
  });

  struct Task {
    std::size_t instance;
    int step;
    std::size_t level;
    int repeat;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < prep.instances.size(); ++i)
    for (int step : cfg.noise_steps)
      for (std::size_t l = 0; l < cfg.noise.size(); ++l)
        for (int r = 0; r < cfg.repeats; ++r) tasks.push_back({i, step, l, r});

  std::vector<RunRecord> results(tasks.size());
  std::mutex log_mutex;
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
    const auto& t = tasks[k];
    const auto& cost = prep.costs[t.instance];
    MctsConfig c = protocol_config(cfg);
    c.noise_sigma = cfg.noise[t.level];
    c.seed = derive_seed(run_seed(cfg.seed, t.instance, t.repeat, t.step + 1), {t.level});
    const auto space = restrict_space(optima[t.instance][t.step - 1].schedule,
                                      cfg.softening.at(t.step + 1), cfg.edges, c.branching);
    GameResult g = play_game(space, qaoa_leaf_cost(cost), c);
    g.depth = t.step + 1;
    results[k] = make_record(prep.instances[t.instance].name, cfg, t.repeat, c.noise_sigma, g, cost);
    ExperimentConfig layout = cfg;
    layout.noise = {0.0, 1.0};  // always split by noise level
    save(depth_file(run_dir(layout, prep.instances[t.instance].name, c.noise_sigma, t.repeat),
                    g.depth),
         results[k]);
    std::lock_guard lock(log_mutex);
    log << "[" << (k + 1) << "/" << tasks.size() << "] " << prep.instances[t.instance].name
        << " P=" << t.step << "->" << t.step + 1 << " noise=" << format_number(c.noise_sigma)
        << " repeat=" << t.repeat << " energy " << format_number(g.energy) << '\n';
  });
  write_rollups(cfg, results);
  return results;
}

std::vector<LandscapeSummary> run_landscape(const ExperimentConfig& cfg, std::ostream& log) {
  const Prepared prep = prepare(cfg);
  const int b = cfg.mcts.branching;
  const auto& ls = cfg.landscape;
  std::optional<RunRecord> from;
  if (!ls.restrict_from.empty()) {
    from = read_record(ls.restrict_from);
    if (from->schedule.depth() + 1 != ls.depth)
      throw ConfigError("restrict_from holds a depth-" + std::to_string(from->schedule.depth()) +
                        " schedule; landscape depth must be " +
                        std::to_string(from->schedule.depth() + 1));
  }
  const SearchSpace space = from ? restrict_space(from->schedule, ls.delta, cfg.edges, b)
                                 : SearchSpace::unrestricted(ls.depth, b);
  LandscapeOptions opt;
  opt.max_leaves = ls.max_leaves;
  opt.threads = ls.threads;
  opt.periodic_distance = ls.periodic_distance;

  std::vector<LandscapeSummary> out;
  for (std::size_t i = 0; i < prep.instances.size(); ++i) {
    const fs::path file = experiment_dir(cfg) / prep.instances[i].name /
                          ("landscape_P" + std::to_string(ls.depth) + ".csv");
    fs::create_directories(file.parent_path());
    std::ofstream csv(file);
    out.push_back(write_landscape_csv(csv, prep.costs[i], space, opt));
    if (!csv) throw Error("cannot write " + file.string());
    log << prep.instances[i].name << ": " << out.back().leaves << " leaves, optimum "
        << format_number(out.back().optimum_energy) << " -> " << file.string() << '\n';
  }
  return out;
}

std::vector<fs::path> run_generate(const ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.problem.generate) throw ConfigError("generate needs a problem.generate section");
  const auto& g = *cfg.problem.generate;
  const fs::path dir = experiment_dir(cfg) / "instances";
  Json manifest;
  manifest["type"] = cfg.problem.kind == ProblemKind::sat ? "sat" : "maxcut";
  manifest["n"] = g.n;
  if (cfg.problem.kind == ProblemKind::sat) manifest["alpha"] = g.alpha;
  else manifest["degree"] = g.degree;
  manifest["seed"] = g.seed;
  manifest["instances"] = Json::array();

  std::vector<fs::path> files;
  for (int k = 0; k < g.count; ++k) {
    const auto name = generated_name(cfg.problem, k);
    const auto inst = generate_one(cfg.problem, k);
    fs::path file;
    if (const auto* sat = std::get_if<SatInstance>(&inst)) {
      file = dir / (name + ".cnf");
      write_file(file, write_dimacs(*sat));
    } else {
      file = dir / (name + ".txt");
      write_file(file, write_edgelist(std::get<MaxCutGraph>(inst)));
    }
    manifest["instances"].push_back(
        {{"file", file.filename().string()},
         {"seed", derive_seed(g.seed, {static_cast<std::uint64_t>(k)})}});
    files.push_back(file);
    log << "wrote " << file.string() << '\n';
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return files;
}

// ---------------------------------------------------------------------------
// Aggregation of result CSVs (ours or external optimizer traces)

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void aggregate_csv(const std::vector<fs::path>& inputs, std::ostream& out) {
  if (inputs.empty()) throw ConfigError("aggregate needs at least one CSV");
  std::map<SummaryKey, std::vector<double>> energies, ratios;
  for (const auto& file : inputs) {
    std::istringstream in(read_file(file));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, file.string() + ": empty file");
    const auto header = split_csv(line);
    auto column = [&](const std::string& name) -> int {
      auto it = std::find(header.begin(), header.end(), name);
      return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_protocol = column("protocol"), c_noise = column("noise"),
              c_depth = column("depth"), c_energy = column("energy"), c_ratio = column("ratio");
    if (c_depth < 0 || c_energy < 0)
      throw ParseError(1, file.string() + ": need 'depth' and 'energy' columns");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != header.size())
        throw ParseError(line_no, file.string() + ": expected " + std::to_string(header.size()) +
                                      " cells");
      try {
        SummaryKey key{c_protocol >= 0 ? cells[c_protocol] : "external",
                       c_noise >= 0 && !cells[c_noise].empty() ? std::stod(cells[c_noise]) : 0.0,
                       std::stoi(cells[c_depth])};
        energies[key].push_back(std::stod(cells[c_energy]));
        if (c_ratio >= 0 && !cells[c_ratio].empty()) ratios[key].push_back(std::stod(cells[c_ratio]));
      } catch (const std::logic_error&) {
        throw ParseError(line_no, file.string() + ": non-numeric cell");
      }
    }
  }
  emit_summary(out, energies, ratios);
}

}  // namespace qmcts::cli
