#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmcts/errors.hpp"
#include "qmcts/ssr.hpp"

using namespace qmcts;
using std::numbers::pi;

namespace {

Schedule depth2(double g1, double b1, double g2, double b2) { return Schedule({g1, b1, g2, b2}); }

}  // namespace

TEST(Softening, StandardScheduleIndexing) {
  const auto s = SofteningSchedule::standard();
  EXPECT_EQ(s.at(1), 0.0);
  EXPECT_EQ(s.at(2), 0.0);
  EXPECT_EQ(s.at(3), 0.1);
  EXPECT_EQ(s.at(4), 0.05);
  EXPECT_EQ(s.at(9), 0.01);
  EXPECT_EQ(s.at(10), 0.01);
  EXPECT_EQ(s.at(40), 0.01);
  EXPECT_THROW(s.at(0), ContractViolation);
  EXPECT_EQ(SofteningSchedule{}.at(5), 0.0);
}

TEST(Soften, OutwardMarginsAndZeroFloor) {
  auto iv = soften(0.5, 1.0, 0.1, 30);
  EXPECT_DOUBLE_EQ(iv.low, 0.45);
  EXPECT_DOUBLE_EQ(iv.high, 1.1);
  iv = soften(1.0, 0.5, 0.1, 30);  // ordered first
  EXPECT_DOUBLE_EQ(iv.low, 0.45);
  EXPECT_DOUBLE_EQ(iv.high, 1.1);
  iv = soften(0.0, 1.0, 0.1, 30);
  EXPECT_DOUBLE_EQ(iv.low, -0.1 * pi / 30);
  iv = soften(-1.0, -0.5, 0.2, 30);  // magnitudes, so still outward
  EXPECT_DOUBLE_EQ(iv.low, -1.2);
  EXPECT_DOUBLE_EQ(iv.high, -0.4);
  iv = soften(0.3, 0.7, 0.0, 30);
  EXPECT_EQ(iv.low, 0.3);
  EXPECT_EQ(iv.high, 0.7);
}

TEST(Restrict, HandInterval) {
  const auto iv = restriction_intervals(depth2(0.5, 2.0, 1.0, 2.5), 0.1, {}, 30);
  ASSERT_EQ(iv.size(), 6u);
  // Turn order gamma_1, beta_1, gamma_2, beta_2, gamma_3, beta_3.
  EXPECT_DOUBLE_EQ(iv[2].low, 0.45);
  EXPECT_DOUBLE_EQ(iv[2].high, 1.10);
  EXPECT_DOUBLE_EQ(iv[3].low, 1.8);
  EXPECT_DOUBLE_EQ(iv[3].high, 2.75);
  // Edges stay hard: first interval starts at the low edge, last ends at the high edge.
  EXPECT_EQ(iv[0].low, 0.0);
  EXPECT_DOUBLE_EQ(iv[0].high, 0.55);
  EXPECT_DOUBLE_EQ(iv[4].low, 0.9);
  EXPECT_EQ(iv[4].high, 2 * pi);
}

TEST(Restrict, ZeroSofteningSpansConsecutiveOptima) {
  // Depth 3 -> 4 with delta 0 and b = 21.
  const Schedule prev({0.2, 2.9, 0.5, 2.7, 0.9, 2.4});
  const auto space = restrict_space(prev, 0.0, {}, 21);
  ASSERT_EQ(space.turns(), 8);
  const std::vector<double> g{0.0, 0.2, 0.5, 0.9, 2 * pi};
  for (int i = 0; i < 4; ++i) {
    const auto& grid = space.grid(2 * i);
    ASSERT_EQ(grid.size(), 21u);
    EXPECT_DOUBLE_EQ(grid.front(), g[i]);
    EXPECT_DOUBLE_EQ(grid.back(), g[i + 1]);
  }
  // Betas decrease here; the interval still spans the pair.
  EXPECT_DOUBLE_EQ(space.grid(3).front(), 2.7);
  EXPECT_DOUBLE_EQ(space.grid(3).back(), 2.9);
  EXPECT_EQ(space.leaf_count(), static_cast<std::uint64_t>(std::pow(21.0, 8)));
}

TEST(Restrict, EndpointsReproduceWhenEdgesAreTheOptima) {
  const Schedule prev({0.3, 1.1, 0.8, 1.4});
  RestrictionEdges e;
  e.gamma_low = 0.3;
  e.gamma_high = 0.8;
  e.beta_low = 1.1;
  e.beta_high = 1.4;
  const auto space = restrict_space(prev, 0.0, e, 7);
  const std::vector<double> g{0.3, 0.3, 0.8, 0.8}, b{1.1, 1.1, 1.4, 1.4};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(space.grid(2 * i).front(), std::min(g[i], g[i + 1]), 1e-12);
    EXPECT_NEAR(space.grid(2 * i).back(), std::max(g[i], g[i + 1]), 1e-12);
    EXPECT_NEAR(space.grid(2 * i + 1).front(), std::min(b[i], b[i + 1]), 1e-12);
    EXPECT_NEAR(space.grid(2 * i + 1).back(), std::max(b[i], b[i + 1]), 1e-12);
  }
}

TEST(Restrict, DegenerateIntervalCollapses) {
  const auto space = restrict_space(depth2(0.7, 2.0, 0.7, 2.1), 0.0, {}, 5);
  for (double x : space.grid(2)) EXPECT_EQ(x, 0.7);
  EXPECT_EQ(space.leaf_count(), 15625u);
}

TEST(Restrict, DecreasingTrendSwapsEdges) {
  RestrictionEdges e;
  e.beta_trend = Trend::decreasing;
  const auto iv = restriction_intervals(depth2(0.5, 2.0, 1.0, 1.5), 0.0, e, 30);
  EXPECT_DOUBLE_EQ(iv[1].low, 2.0);
  EXPECT_DOUBLE_EQ(iv[1].high, 2 * pi);
  EXPECT_EQ(iv[5].low, 0.0);
  EXPECT_DOUBLE_EQ(iv[5].high, 1.5);
}

TEST(Restrict, PinchMovesEdgesTowardsOptima) {
  RestrictionEdges e;
  e.pinch = 0.5;
  const auto iv = restriction_intervals(depth2(1.0, 2.0, 2.0, 3.0), 0.0, e, 30);
  EXPECT_DOUBLE_EQ(iv[0].low, 0.5);
  EXPECT_DOUBLE_EQ(iv[4].high, 2.0 + 0.5 * (2 * pi - 2.0));
  e.pinch = 1.0;
  EXPECT_THROW(restriction_intervals(depth2(1, 2, 2, 3), 0.0, e, 30), ConfigError);
}

TEST(Restrict, GridsStayInsideSoftenedIntervals) {
  const Schedule prev({0.4, 2.6, 1.1, 2.9, 0.9, 3.1});
  for (double delta : {0.0, 0.01, 0.05, 0.1}) {
    const auto iv = restriction_intervals(prev, delta, {}, 30);
    const auto space = restrict_space(prev, delta, {}, 30);
    for (int t = 0; t < space.turns(); ++t)
      for (double x : space.grid(t)) {
        EXPECT_GE(x, iv[t].low - 1e-12);
        EXPECT_LE(x, iv[t].high + 1e-12);
      }
  }
}

TEST(Restrict, RestrictedLeafCount) {
  const auto space = restrict_space(Schedule({0.6, 2.7}), 0.0, {}, 30);
  EXPECT_EQ(space.leaf_count(), 810'000u);
  EXPECT_FALSE(space.mirror_halved());
}

TEST(Restrict, Errors) {
  EXPECT_THROW(restriction_intervals(Schedule{}, 0.0, {}, 30), ContractViolation);
  EXPECT_THROW(restriction_intervals(Schedule({NAN, 1.0}), 0.0, {}, 30), ContractViolation);
  EXPECT_THROW(restriction_intervals(Schedule({0.1, 1.0}), -0.1, {}, 30), ConfigError);
  RestrictionEdges bad;
  bad.gamma_low = 3.0;
  bad.gamma_high = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Iterative, DepthOneIsUnrestricted) {
  std::vector<SearchSpace> seen;
  GameRunner spy = [&](const SearchSpace& s, const MctsConfig& c) {
    seen.push_back(s);
    GameResult r;
    std::vector<int> choices(s.turns(), 0);
    r.choices = choices;
    r.schedule = s.schedule(choices);
    r.n_fev = c.budget.total(s.turns());
    r.seed = c.seed;
    return r;
  };
  IterativeOptions opt;
  opt.p_max = 1;
  const auto out = run_iterative(spy, opt);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_TRUE(seen[0].mirror_halved());
  EXPECT_EQ(seen[0].leaf_count(), 450u);
  EXPECT_EQ(out[0].depth, 1);
}

TEST(Iterative, BudgetsSeedsAndResume) {
  const auto cost = build_diagonal(generate_sat_unique(5, 3.0, 1));
  IterativeOptions opt;
  opt.p_max = 3;
  opt.base.branching = 8;
  opt.base.budget = {100, 40};
  opt.base.seed = 11;
  int calls = 0;
  opt.on_depth = [&](const GameResult&) { ++calls; };
  const auto full = run_iterative(cost, opt);
  ASSERT_EQ(full.size(), 3u);
  EXPECT_EQ(calls, 3);
  for (int p = 1; p <= 3; ++p) {
    EXPECT_EQ(full[p - 1].depth, p);
    EXPECT_EQ(full[p - 1].n_fev, 100 + 40 * (2 * p - 1));
    EXPECT_EQ(full[p - 1].seed, depth_seed(11, p));
  }
  calls = 0;
  opt.completed = {full[0]};
  const auto resumed = run_iterative(cost, opt);
  EXPECT_EQ(calls, 2);
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(resumed[p].schedule, full[p].schedule);
    EXPECT_EQ(resumed[p].energy, full[p].energy);
  }
  opt.p_max = 0;
  EXPECT_THROW(run_iterative(cost, opt), ConfigError);
}

TEST(Iterative, SinglePlayerStepsRarelyRise) {
  int steps = 0, rises = 0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto cost = build_diagonal(generate_sat_unique(7, 3.0, 500 + s));
    IterativeOptions opt;
    opt.p_max = 5;
    opt.base = MctsConfig::defaults(Variant::single_player);
    opt.base.seed = s;
    const auto r = run_iterative(cost, opt);
    for (std::size_t p = 1; p < r.size(); ++p) {
      ++steps;
      rises += r[p].energy > r[p - 1].energy;
    }
  }
  EXPECT_GE(10 * (steps - rises), 9 * steps) << rises << " of " << steps << " steps rose";
}
