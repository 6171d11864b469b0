#ifndef MPBANDIT_TESTS_REGRET_ORACLE_H_
#define MPBANDIT_TESTS_REGRET_ORACLE_H_

#include <algorithm>
#include <functional>
#include <vector>

#include "mpbandit/engine.h"

namespace mpbandit::testing {

// Literal regret: T times the oracle value minus the double sum over rounds
// and players of mu_{A_j(t)} (1 - C_{A_j(t)}(t)). Collisions are recounted
// from the actions rather than taken from the record.
inline std::vector<double> BruteForceRegret(const EnvironmentConfig& config,
                                            const std::vector<RoundRecord>& records,
                                            RegretMode mode) {
  const int k = config.num_arms();
  const int m = config.num_players;
  std::vector<double> mu(k);
  for (int i = 0; i < k; ++i) mu[i] = config.arms[i].mean;
  std::vector<double> sorted = mu;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  int seats = 0;
  switch (mode) {
    case RegretMode::kTopM:
      seats = m;
      break;
    case RegretMode::kTopKMinus1:
      seats = k - 1;
      break;
    case RegretMode::kTopKWithLeaving:
      seats = k;
      break;
  }
  double oracle = 0.0;
  for (int s = 0; s < seats; ++s) oracle += sorted[s];

  std::vector<double> cumulative;
  double regret = 0.0;
  for (const RoundRecord& rec : records) {
    double achieved = 0.0;
    for (int j = 0; j < m; ++j) {
      const Arm a = rec.actions[j];
      if (a == kNoArm) continue;
      int pullers = 0;
      for (int l = 0; l < m; ++l) pullers += rec.actions[l] == a;
      const double c = pullers > 1 ? 1.0 : 0.0;
      achieved += mu[a - 1] * (1.0 - c);
    }
    regret += oracle - achieved;
    cumulative.push_back(regret);
  }
  return cumulative;
}

}  // namespace mpbandit::testing

#endif  // MPBANDIT_TESTS_REGRET_ORACLE_H_
