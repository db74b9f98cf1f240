#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "qmcts/errors.hpp"

using namespace qmcts;
using namespace qmcts::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("qmcts_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

ExperimentConfig config_from(Json doc, const fs::path& out) {
  doc["outdir"] = out.string();
  return parse_config(doc, out);
}

Json tiny_doc() {
  return Json::parse(R"({
    "name": "tiny",
    "problem": {"type": "sat", "generate": {"count": 2, "n": 5, "alpha": 3.0, "seed": 3}},
    "protocol": "ssr",
    "mcts": {"branching": 8, "cycles_initial": 60, "cycles_per_turn": 30},
    "p_min": 1, "p_max": 3, "seed": 5
  })");
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(QMCTS_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["edges"] = {{"beta_trend", "decreasing"}, {"pinch", 0.25}};
  doc["noise"] = 0.5;
  doc["softening"] = {0.0, 0.2};
  const auto c = config_from(doc, tmp.path());
  EXPECT_EQ(c.name, "tiny");
  EXPECT_EQ(c.protocol, Protocol::ssr);
  EXPECT_EQ(c.mcts.branching, 8);
  EXPECT_EQ(c.mcts.budget.initial, 60);
  EXPECT_EQ(c.edges.beta_trend, Trend::decreasing);
  EXPECT_EQ(c.edges.pinch, 0.25);
  EXPECT_EQ(c.noise, std::vector<double>{0.5});
  EXPECT_EQ(c.softening.at(2), 0.2);
  EXPECT_EQ(c.softening.at(7), 0.2);
  const auto m = protocol_config(c);
  EXPECT_EQ(m.variant, Variant::vanilla);
  EXPECT_EQ(m.final_move, FinalMove::max_child);
  auto sp = c;
  sp.protocol = Protocol::ssr_sp;
  EXPECT_EQ(protocol_config(sp).variant, Variant::single_player);
  EXPECT_EQ(protocol_config(sp).final_move, FinalMove::best_path);
}

TEST(Config, RejectsBadInput) {
  TempDir tmp;
  auto bad = [&](Json patch) {
    auto doc = tiny_doc();
    doc.merge_patch(patch);
    return config_from(doc, tmp.path());
  };
  EXPECT_THROW(bad({{"typo", 1}}), ConfigError);
  EXPECT_THROW(bad({{"protocol", "greedy"}}), ConfigError);
  EXPECT_THROW(bad({{"problem", {{"type", "tsp"}}}}), ConfigError);
  EXPECT_THROW(bad({{"problem", {{"generate", nullptr}, {"files", {"missing.cnf"}}}}}).validate(),
               ConfigError);
  EXPECT_THROW(bad({{"p_min", 3}, {"p_max", 2}}).validate(), ConfigError);
  EXPECT_THROW(bad({{"repeats", 0}}).validate(), ConfigError);
  EXPECT_THROW(bad({{"mcts", {{"branching", "x"}}}}), ConfigError);
  EXPECT_THROW(load_config(tmp.path() / "none.json"), ConfigError);
  std::ofstream(tmp.path() / "broken.json") << "{ \"name\": ";
  EXPECT_THROW(load_config(tmp.path() / "broken.json"), ConfigError);
}

TEST(Seeds, DependOnEveryCoordinate) {
  const auto s = run_seed(1, 0, 0, 1);
  EXPECT_EQ(s, run_seed(1, 0, 0, 1));
  EXPECT_NE(s, run_seed(2, 0, 0, 1));
  EXPECT_NE(s, run_seed(1, 1, 0, 1));
  EXPECT_NE(s, run_seed(1, 0, 1, 1));
  EXPECT_NE(s, run_seed(1, 0, 0, 2));
}

TEST(Run, LayoutDeterminismAndResume) {
  TempDir tmp;
  auto cfg = config_from(tiny_doc(), tmp.path() / "a");
  std::ostringstream log;
  const auto records = run_experiment(cfg, log);
  ASSERT_EQ(records.size(), 6u);
  const fs::path root = tmp.path() / "a" / "tiny";
  for (int p = 1; p <= 3; ++p) EXPECT_TRUE(fs::exists(root / "sat_n5_000" / "ssr" / ("depth_" + std::to_string(p) + ".json")));
  const auto results = slurp(root / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')),
            "instance,protocol,repeat,noise,depth,seed,energy,best_rollout_energy,n_fev,"
            "minimizer_fev,ratio,angles");
  EXPECT_EQ(count_lines(root / "summary.csv"), 4u);

  // Same config, different worker count, different directory: identical CSVs.
  auto again = config_from(tiny_doc(), tmp.path() / "b");
  again.jobs = 3;
  run_experiment(again, log);
  EXPECT_EQ(slurp(tmp.path() / "b" / "tiny" / "results.csv"), results);
  EXPECT_EQ(slurp(tmp.path() / "b" / "tiny" / "summary.csv"), slurp(root / "summary.csv"));

  // Checkpoint restart from depth 1 reproduces the rest exactly.
  fs::remove(root / "sat_n5_000" / "ssr" / "depth_2.json");
  fs::remove(root / "sat_n5_000" / "ssr" / "depth_3.json");
  cfg.resume = true;
  run_experiment(cfg, log);
  EXPECT_EQ(slurp(root / "results.csv"), results);
}

TEST(Run, RecordRoundTripIsExact) {
  TempDir tmp;
  auto cfg = config_from(tiny_doc(), tmp.path());
  cfg.p_max = 2;
  std::ostringstream log;
  const auto records = run_experiment(cfg, log);
  const auto back = read_record(tmp.path() / "tiny" / "sat_n5_001" / "ssr" / "depth_2.json");
  const auto& orig = records.back();
  EXPECT_EQ(back.schedule, orig.schedule);
  EXPECT_EQ(back.choices, orig.choices);
  EXPECT_EQ(back.seed, orig.seed);
  EXPECT_EQ(back.n_fev, orig.n_fev);
}

TEST(Run, EveryProtocolProducesRecords) {
  TempDir tmp;
  for (auto p : {Protocol::vanilla, Protocol::sp, Protocol::ssr, Protocol::ssr_sp,
                 Protocol::hybrid_init, Protocol::hybrid_basin}) {
    auto cfg = config_from(tiny_doc(), tmp.path());
    cfg.protocol = p;
    cfg.p_max = 2;
    cfg.hybrid_repeats = 2;
    cfg.problem.generate->count = 1;
    std::ostringstream log;
    const auto r = run_experiment(cfg, log);
    ASSERT_EQ(r.size(), 2u) << to_string(p);
    for (const auto& rec : r) {
      EXPECT_EQ(rec.protocol, to_string(p));
      EXPECT_EQ(rec.schedule.depth(), rec.depth);
      EXPECT_TRUE(std::isnan(rec.ratio));
    }
    const bool hybrid = p == Protocol::hybrid_init || p == Protocol::hybrid_basin;
    EXPECT_EQ(r.back().minimizer_fev > 0, hybrid) << to_string(p);
  }
}

TEST(Run, MaxCutRecordsRatio) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["problem"] = {{"type", "maxcut"}, {"directory", QMCTS_DATA_DIR "/maxcut_n10_3regular"}};
  doc["p_max"] = 1;
  auto cfg = config_from(doc, tmp.path());
  std::ostringstream log;
  const auto r = run_experiment(cfg, log);
  ASSERT_EQ(r.size(), 19u);
  EXPECT_EQ(r.front().instance, "cubic10_00");
  for (const auto& rec : r) {
    EXPECT_GE(rec.ratio, 0.5);
    EXPECT_LE(rec.ratio, 1.0);
  }
}

TEST(NoiseStudy, StepsAndLevels) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["noise"] = {0.0, 1.0};
  doc["noise_steps"] = {1, 2};
  doc["repeats"] = 3;
  auto cfg = config_from(doc, tmp.path());
  std::ostringstream log;
  const auto r = run_noise_study(cfg, log);
  EXPECT_EQ(r.size(), 2u * 2 * 2 * 3);
  for (const auto& rec : r) EXPECT_TRUE(rec.depth == 2 || rec.depth == 3);
  EXPECT_TRUE(fs::exists(tmp.path() / "tiny" / "sat_n5_000" / "ssr" / "noise_1" / "repeat_2" / "depth_3.json"));
  cfg.protocol = Protocol::vanilla;
  EXPECT_THROW(run_noise_study(cfg, log), ConfigError);
}

TEST(Landscape, RowsForHalvedAndRestrictedSpaces) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["mcts"]["branching"] = 5;
  doc["landscape"] = {{"depth", 1}};
  auto cfg = config_from(doc, tmp.path());
  std::ostringstream log;
  auto s = run_landscape(cfg, log);
  EXPECT_EQ(s.front().leaves, 13u);
  EXPECT_EQ(count_lines(tmp.path() / "tiny" / "sat_n5_000" / "landscape_P1.csv"), 14u);

  // From a stored depth-1 optimum.
  auto run = config_from(tiny_doc(), tmp.path());
  run.p_max = 1;
  run_experiment(run, log);
  doc["landscape"] = {{"depth", 2},
                      {"restrict_from", (tmp.path() / "tiny" / "sat_n5_000" / "ssr" / "depth_1.json").string()}};
  s = run_landscape(config_from(doc, tmp.path()), log);
  EXPECT_EQ(s.front().leaves, 625u);
  doc["landscape"]["depth"] = 3;
  EXPECT_THROW(run_landscape(config_from(doc, tmp.path()), log), ConfigError);
}

TEST(Generate, FilesManifestAndDeterminism) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["problem"]["generate"] = {{"count", 15}, {"n", 7}, {"alpha", 3.0}, {"seed", 2}};
  std::ostringstream log;
  const auto files = run_generate(config_from(doc, tmp.path() / "x"), log);
  ASSERT_EQ(files.size(), 15u);
  for (const auto& f : files) {
    const auto inst = parse_dimacs(slurp(f));
    EXPECT_EQ(inst.clauses.size(), 21u);
    EXPECT_EQ(build_diagonal(inst).ground_states.size(), 1u);
  }
  const auto manifest = Json::parse(slurp(tmp.path() / "x" / "tiny" / "instances" / "manifest.json"));
  EXPECT_EQ(manifest["instances"].size(), 15u);
  EXPECT_EQ(manifest["seed"], 2);
  run_generate(config_from(doc, tmp.path() / "y"), log);
  for (const auto& f : files)
    EXPECT_EQ(slurp(f), slurp(tmp.path() / "y" / "tiny" / "instances" / f.filename()));
}

TEST(Aggregate, SummarizesExternalTraces) {
  TempDir tmp;
  std::ofstream(tmp.path() / "ext.csv") << "depth,energy,extra\n1,2.0,a\n1,1.0,b\n2,0.5,c\n";
  std::ostringstream out;
  aggregate_csv({tmp.path() / "ext.csv"}, out);
  EXPECT_EQ(out.str(),
            "protocol,noise,depth,count,mean,std,best,ratio_mean,ratio_std,ratio_best\n"
            "external,0,1,2,1.5,0.5,1,,,\n"
            "external,0,2,1,0.5,0,0.5,,,\n");
  std::ofstream(tmp.path() / "bad.csv") << "depth,energy\n1\n";
  EXPECT_THROW(aggregate_csv({tmp.path() / "bad.csv"}, out), ParseError);
  std::ofstream(tmp.path() / "nocol.csv") << "x,y\n1,2\n";
  EXPECT_THROW(aggregate_csv({tmp.path() / "nocol.csv"}, out), ParseError);
}

TEST(Tool, ExitCodes) {
  TempDir tmp;
  auto doc = tiny_doc();
  doc["p_max"] = 1;
  doc["outdir"] = (tmp.path() / "out").string();
  std::ofstream(tmp.path() / "ok.json") << doc.dump();
  EXPECT_EQ(run_tool("run -c " + (tmp.path() / "ok.json").string() + " --seed 9 --jobs 2"), 0);
  EXPECT_TRUE(fs::exists(tmp.path() / "out" / "tiny" / "results.csv"));
  doc["bogus"] = true;
  std::ofstream(tmp.path() / "bad.json") << doc.dump();
  EXPECT_EQ(run_tool("run -c " + (tmp.path() / "bad.json").string()), 2);
  EXPECT_NE(run_tool("run"), 0);
  EXPECT_NE(run_tool("frobnicate"), 0);
  EXPECT_EQ(run_tool("run -c " + (tmp.path() / "ok.json").string() + " --protocol nope"), 2);
}
