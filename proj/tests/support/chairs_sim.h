#ifndef MPBANDIT_TESTS_CHAIRS_SIM_H_
#define MPBANDIT_TESTS_CHAIRS_SIM_H_

#include <cstdint>
#include <vector>

#include "mpbandit/env.h"
#include "mpbandit/musical_chairs.h"

namespace mpbandit::testing {

// Runs `chairs` players of musical chairs (targets: every arm) next to
// `random_pullers` players who pull uniformly at random, on Bernoulli arms.
// Stops when every chairs player is terminal or after `cap` rounds. Returns
// the arm each chairs player occupies (kNoArm if none).
inline std::vector<Arm> PlayChairs(ChairsRule rule, const std::vector<double>& means,
                                   int chairs, int random_pullers,
                                   std::int64_t budget, std::uint64_t seed,
                                   std::int64_t cap = 1000000) {
  const int k = static_cast<int>(means.size());
  const int m = chairs + random_pullers;
  std::vector<Arm> all;
  for (int i = 1; i <= k; ++i) all.push_back(i);
  EnvironmentConfig config;
  config.num_players = m;
  for (double mu : means) config.arms.push_back({mu});
  config.master_seed = seed;
  config.feedback = rule == ChairsRule::kMc3 ? Feedback::kRewardAndCollision
                                             : Feedback::kRewardOnly;
  const Environment env(config);
  std::vector<MusicalChairs> players;
  for (int j = 0; j < chairs; ++j) {
    if (rule == ChairsRule::kMc1) {
      players.emplace_back(k, all);
    } else {
      players.emplace_back(rule, k, all, budget);
    }
  }
  std::vector<RandomStream> rngs;
  for (int j = 0; j < m; ++j) rngs.push_back(env.streams().Player(j));
  std::vector<Arm> actions(m);
  RoundOutcome out;
  for (std::int64_t t = 1; t <= cap; ++t) {
    bool active = false;
    for (int j = 0; j < chairs; ++j) {
      if (players[j].terminal()) {
        actions[j] = players[j].occupied_arm();
        // A budgeted player who failed keeps pulling at random.
        if (actions[j] == kNoArm) {
          actions[j] = static_cast<Arm>(rngs[j].UniformIndex(k)) + 1;
        }
      } else {
        actions[j] = players[j].ChooseAction(rngs[j]);
        active = true;
      }
    }
    if (!active) break;
    for (int j = chairs; j < m; ++j) {
      actions[j] = static_cast<Arm>(rngs[j].UniformIndex(k)) + 1;
    }
    env.Play(t, actions, {}, out);
    for (int j = 0; j < chairs; ++j) {
      if (players[j].terminal()) continue;
      std::optional<bool> c;
      if (rule == ChairsRule::kMc3) c = (*out.collision_observed)[j];
      players[j].Observe(actions[j], out.reward[j], c);
    }
  }
  std::vector<Arm> held;
  for (const auto& p : players) held.push_back(p.occupied_arm());
  return held;
}

}  // namespace mpbandit::testing

#endif  // MPBANDIT_TESTS_CHAIRS_SIM_H_
