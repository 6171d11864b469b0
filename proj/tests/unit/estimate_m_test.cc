#include "mpbandit/estimate_m.h"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mpbandit/engine.h"
#include "mpbandit/errors.h"

namespace mpbandit {
namespace {

// Literal interval test over a generous range of m.
std::vector<int> BruteForceCandidates(double mu_hat, double sigma, double eps,
                                      int k) {
  std::vector<int> out;
  const double q = 1.0 - 1.0 / k;
  for (int m = 1; m <= 400; ++m) {
    const double a = (mu_hat - eps) * std::pow(q, m - 1);
    const double b = (mu_hat + eps) * std::pow(q, m - 1);
    if (std::max(a, sigma - eps) <= std::min(b, sigma + eps)) out.push_back(m);
  }
  return out;
}

TEST(EstimateMScheduleTest, MatchesTheFormulas) {
  const EstimateMParams p{3, 0.5, 0.1};
  const auto s = ComputeEstimateMSchedule(p);
  const double eps = 0.5 * (std::pow(2.0 / 3.0, -0.4) - 1.0) / 48.0;
  EXPECT_DOUBLE_EQ(s.epsilon, eps);
  EXPECT_EQ(s.sigma_rounds,
            static_cast<std::int64_t>(std::ceil(24.0 * std::log(9.0 / 0.9) / (eps * eps))));
  EXPECT_EQ(s.block_length,
            static_cast<std::int64_t>(std::ceil(std::log(60.0) / (eps * eps))));
  EXPECT_EQ(s.probe_iterations,
            static_cast<std::int64_t>(std::ceil(12.0 * std::log(18.0 / 0.05))));
  EXPECT_EQ(s.total_rounds, s.sigma_rounds + s.probe_iterations * s.block_length);
}

TEST(EstimateMScheduleTest, RejectsBadParameters) {
  EXPECT_THROW(ComputeEstimateMSchedule({1, 0.5, 0.1}), ContractViolation);
  EXPECT_THROW(ComputeEstimateMSchedule({3, 0.0, 0.1}), ContractViolation);
  EXPECT_THROW(ComputeEstimateMSchedule({3, 0.5, 1.0}), ContractViolation);
}

TEST(EstimateMScheduleTest, EpsilonIsBelowTheUniquenessThreshold) {
  for (int k = 2; k <= 64; ++k) {
    const double q = 1.0 - 1.0 / k;
    const double r = std::pow(q, -0.4);
    const double eps = ComputeEstimateMSchedule({k, 1.0, 0.1}).epsilon;
    for (int m = 2; m <= k; ++m) {
      EXPECT_LT(eps, 0.25 * std::pow(q, m - 1) * (r - 1.0) / (r + 1.0))
          << "K " << k << " m " << m;
    }
  }
}

TEST(RecoverPlayerCountTest, ScanAgreesWithBruteForce) {
  RandomStream rng(77, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformIndex(7));
    const double eps = 0.001 + 0.05 * rng.UniformDouble();
    const double mu_hat = eps + 0.01 + rng.UniformDouble();
    const double sigma = eps + 0.01 + mu_hat * rng.UniformDouble();
    const auto scan = ScanPlayerCount(mu_hat, sigma, eps, k);
    EXPECT_EQ(scan.candidates, BruteForceCandidates(mu_hat, sigma, eps, k))
        << mu_hat << " " << sigma << " " << eps << " " << k;
  }
}

TEST(RecoverPlayerCountTest, ExactEstimatesRecoverM) {
  for (int k = 2; k <= 8; ++k) {
    const double eps = ComputeEstimateMSchedule({k, 0.5, 0.1}).epsilon;
    for (int m = 1; m <= k; ++m) {
      const double sigma = 0.7 * std::pow(1.0 - 1.0 / k, m - 1);
      EXPECT_EQ(RecoverPlayerCount(0.7, sigma, eps, k), m);
    }
  }
}

TEST(RecoverPlayerCountTest, ErrorsCarryDiagnostics) {
  EXPECT_THROW(RecoverPlayerCount(0.5, 0.9, 0.01, 3), NoCandidateError);
  try {
    RecoverPlayerCount(0.5, 0.45, 0.2, 3);
    FAIL();
  } catch (const AmbiguityError& e) {
    EXPECT_GE(e.candidates().size(), 2u);
  }
  EXPECT_THROW(ScanPlayerCount(0.01, 0.5, 0.02, 3), ContractViolation);
}

TEST(EstimateMPlayerTest, RecoversMOnASmallInstance) {
  const EstimateMParams p{2, 1.0, 0.4};
  const auto schedule = ComputeEstimateMSchedule(p);
  EnvironmentConfig c;
  c.num_players = 2;
  c.arms = {{1.0}, {0.5}};
  c.horizon = schedule.total_rounds;
  c.master_seed = 12;
  const Environment env(c);
  std::vector<std::unique_ptr<Player>> players;
  for (int j = 0; j < 2; ++j) players.push_back(std::make_unique<EstimateMPlayer>(p));
  GameOptions opts;
  opts.fidelity = TraceFidelity::kCheckpoints;
  const auto trace = RunGame(env, players, opts);
  EXPECT_EQ(trace.rounds_played, schedule.total_rounds);
  for (const auto& player : players) {
    const auto& e = static_cast<const EstimateMPlayer&>(*player);
    EXPECT_TRUE(e.finished());
    EXPECT_EQ(e.stage(), EstimateMPlayer::Stage::kFinished);
    EXPECT_EQ(e.best_arm(), 1);
    // Uncorrected: sigma targets mu (1 - 1/K)^(m - 1).
    EXPECT_NEAR(e.sigma()[0], 0.5, 0.02);
    EXPECT_EQ(e.Result(), 2);
  }
}

TEST(EstimateMPlayerTest, ResultBeforeTheEndIsAContractViolation) {
  const EstimateMPlayer p({2, 1.0, 0.4});
  EXPECT_THROW(p.Result(), ContractViolation);
}

TEST(EstimateThenPlayerTest, HandsOverWithRecoveredM) {
  const EstimateMParams p{2, 1.0, 0.4};
  const auto total = ComputeEstimateMSchedule(p).total_rounds;
  EnvironmentConfig c;
  c.num_players = 1;
  c.arms = {{1.0}, {0.5}};
  c.horizon = total + 10;
  c.master_seed = 2;
  const Environment env(c);
  std::int64_t handed = -1;
  int handed_m = -1;
  auto factory = [&](int) {
    return std::make_unique<EstimateThenPlayer>(
        p, c.horizon, [&](int m, std::int64_t h) {
          handed = h;
          handed_m = m;
          return std::make_unique<FixedArmPlayer>(2);
        });
  };
  GameOptions opts;
  opts.fidelity = TraceFidelity::kCheckpoints;
  const auto trace = RunGame(env, factory, opts);
  EXPECT_EQ(handed, 10);
  EXPECT_EQ(handed_m, 1);
  EXPECT_EQ(trace.final_actions, (std::vector<Arm>{2}));
  EXPECT_EQ(trace.final_phases, (std::vector<std::string>{"fixed"}));
}

}  // namespace
}  // namespace mpbandit
