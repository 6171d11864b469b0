#include "mpbandit/log_regret_player.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mpbandit/engine.h"

namespace mpbandit {
namespace {

EnvironmentConfig Instance(std::int64_t horizon, std::uint64_t seed) {
  EnvironmentConfig c;
  c.num_players = 2;
  c.arms = {{0.9}, {0.8}, {0.3}, {0.2}};
  c.horizon = horizon;
  c.master_seed = seed;
  return c;
}

PlayerFactory Factory(const EnvironmentConfig& c, double c_scale) {
  return [&c, c_scale](int) {
    return std::make_unique<LogRegretPlayer>(
        LogRegretParams{c.num_arms(), c.num_players, c.horizon, c_scale});
  };
}

TEST(LogRegretPlayerTest, ExplorationConstantFormula) {
  const LogRegretParams p{4, 2, 1000, 0.5};
  EXPECT_DOUBLE_EQ(LogRegretExplorationConstant(p),
                   0.5 * 128 * 4 * std::log(3.0 * 4 * 4 * 1e6));
}

TEST(LogRegretPlayerTest, RankArmsBreaksTiesByIndex) {
  EXPECT_EQ(LogRegretPlayer::RankArms({0.2, 0.5, 0.5, 0.1}),
            (std::vector<Arm>{2, 3, 1, 4}));
}

TEST(LogRegretPlayerTest, StoppingRuleThreshold) {
  // Separation 0.3 against 3 sqrt(g / tau) with g = 1.
  const std::vector<double> est = {0.8, 0.2, 0.5};
  EXPECT_FALSE(LogRegretPlayer::StoppingRuleHolds(est, 1, 1.0, 99));
  EXPECT_TRUE(LogRegretPlayer::StoppingRuleHolds(est, 1, 1.0, 100));
  EXPECT_FALSE(LogRegretPlayer::StoppingRuleHolds(est, 1, 1.0, 0));
  // Every arm is in the best set.
  EXPECT_TRUE(LogRegretPlayer::StoppingRuleHolds(est, 3, 1.0, 1));
}

TEST(LogRegretPlayerTest, EstimatesAreCollisionCorrected) {
  LogRegretPlayer p(LogRegretParams{3, 2, 100, 1.0});
  // No-collision probability 2/3.
  p.Observe({1, 1.0, std::nullopt});
  p.Observe({1, 0.0, std::nullopt});
  EXPECT_DOUBLE_EQ(p.Estimate(1), 0.5 / (2.0 / 3.0));
  EXPECT_DOUBLE_EQ(p.Estimate(2), 0.0);
  EXPECT_EQ(p.pulls(1), 2);
  EXPECT_EQ(p.explore_rounds(), 2);
}

TEST(LogRegretPlayerTest, WaitLastsTwentyFourTimesTau) {
  // Huge separation and a tiny constant force the rule at tau = 1.
  LogRegretPlayer p(LogRegretParams{2, 1, 100, 1e-9});
  p.Observe({1, 1.0, std::nullopt});
  ASSERT_EQ(p.stage(), LogRegretPlayer::Stage::kWait);
  EXPECT_EQ(p.wait_remaining(), 24);
  EXPECT_EQ(p.best_arms(), (std::vector<Arm>{1}));
  for (int i = 0; i < 24; ++i) p.Observe({2, 1.0, std::nullopt});
  EXPECT_EQ(p.stage(), LogRegretPlayer::Stage::kOccupy);
  RandomStream rng(0, 0);
  EXPECT_EQ(p.ChooseAction(rng), 1);
  p.Observe({1, 0.0, std::nullopt});
  EXPECT_EQ(p.stage(), LogRegretPlayer::Stage::kOccupy);
  p.Observe({1, 1.0, std::nullopt});
  EXPECT_EQ(p.stage(), LogRegretPlayer::Stage::kExploit);
  EXPECT_EQ(p.occupied_arm(), 1);
  EXPECT_EQ(p.Phase(), "exploit");
}

TEST(LogRegretPlayerTest, EstimatesAreNotUpdatedAfterExploration) {
  LogRegretPlayer p(LogRegretParams{2, 1, 100, 1e-9});
  p.Observe({1, 1.0, std::nullopt});
  const auto frozen = p.Estimates();
  p.Observe({2, 1.0, std::nullopt});
  EXPECT_EQ(p.Estimates(), frozen);
}

TEST(LogRegretPlayerTest, ScaledGameFixatesOnTheTopArms) {
  int fixed = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = Instance(200000, seed);
    const Environment env(c);
    GameOptions opts;
    opts.fidelity = TraceFidelity::kCheckpoints;
    const auto trace = RunGame(env, Factory(c, 0.01), opts);
    if (!trace.FixationRound()) continue;
    ++fixed;
    const std::set<Arm> held(trace.final_actions.begin(), trace.final_actions.end());
    EXPECT_EQ(held, (std::set<Arm>{1, 2}));
    for (const auto& phase : trace.final_phases) EXPECT_EQ(phase, "exploit");
  }
  EXPECT_GE(fixed, 4);
}

TEST(LogRegretPlayerTest, ManyPlayersStopImmediately) {
  LogRegretPlayer p(LogRegretParams{2, 2, 100, 1.0});
  p.Observe({1, 0.0, std::nullopt});
  EXPECT_NE(p.stage(), LogRegretPlayer::Stage::kExplore);
  EXPECT_EQ(p.best_arms().size(), 2u);
}

}  // namespace
}  // namespace mpbandit
