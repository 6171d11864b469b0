#ifndef MPBANDIT_REGRET_H_
#define MPBANDIT_REGRET_H_

#include <span>
#include <string_view>
#include <vector>

#include "mpbandit/env.h"

namespace mpbandit {

// Which oracle assignment the regret is measured against.
enum class RegretMode {
  kTopM,            // the best m arms (requires m <= K)
  kTopKMinus1,      // m > K without leaving: the best K - 1 arms
  kTopKWithLeaving  // m > K with leaving: all K arms
};

std::string_view ToString(RegretMode mode);
RegretMode ParseRegretMode(std::string_view text);

// Per-round oracle value for `mode`. Throws InvalidModeError for kTopM when
// m > K.
double RegretBaseline(const EnvironmentConfig& config, RegretMode mode);

// Sum over players of mu_{A_j} (1 - C_{A_j}) using true means; dummy actions
// count 0. Summed in descending order so that the oracle assignment
// reproduces RegretBaseline bit-for-bit.
double AchievedValue(const EnvironmentConfig& config,
                     std::span<const Arm> actions,
                     const std::vector<bool>& collisions);

struct RegretLedger {
  RegretMode mode = RegretMode::kTopM;
  double baseline = 0.0;
  // cumulative[t - 1] is the regret accumulated over rounds 1..t.
  std::vector<double> cumulative;

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

// Running accumulator used by the engine.
class RegretAccumulator {
 public:
  RegretAccumulator(const EnvironmentConfig& config, RegretMode mode);

  // Adds round `t` and returns its incremental regret.
  double Add(std::int64_t t, std::span<const Arm> actions,
             const std::vector<bool>& collisions);

  double baseline() const { return baseline_; }
  double cumulative() const { return cumulative_; }
  // Last round with positive incremental regret; 0 if none so far.
  std::int64_t last_positive_round() const { return last_positive_; }

 private:
  const EnvironmentConfig* config_;
  double baseline_;
  std::vector<Arm> by_mean_;  // arms by descending mean
  std::vector<unsigned char> pulled_;
  double cumulative_ = 0.0;
  std::int64_t last_positive_ = 0;
};

}  // namespace mpbandit

#endif  // MPBANDIT_REGRET_H_
