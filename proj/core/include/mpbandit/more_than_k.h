#ifndef MPBANDIT_MORE_THAN_K_H_
#define MPBANDIT_MORE_THAN_K_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mpbandit/musical_chairs.h"
#include "mpbandit/player.h"

namespace mpbandit {

enum class CrowdMode {
  // No leaving: occupy the best K - 1 arms, everyone else shares the worst.
  kOriginal,
  // Players who fail to occupy an arm leave the game.
  kLeaving,
};

std::string_view ToString(CrowdMode mode);
CrowdMode ParseCrowdMode(std::string_view text);

struct CrowdParams {
  int num_arms = 2;
  int num_players = 3;
  std::int64_t horizon = 1;
  CrowdMode mode = CrowdMode::kOriginal;
  // The "sufficiently large constant" of both strategies.
  double constant = 128.0;
  // kLeaving without collision feedback: known lower bound on the means.
  double mu_lower = 0.0;
  // kLeaving: certify occupation by collision feedback (MC3) instead of
  // rewards (MC2).
  bool collision_feedback = false;
};

// g' = C K ln(K T) / p^2 with p = (1 - 1/K)^(m - 1).
double CrowdExplorationConstant(const CrowdParams& params);
// kOriginal: ceil(C K ln(K T) sqrt(tau / g') / p) for a stopping time tau.
std::int64_t CrowdOriginalBudget(const CrowdParams& params, std::int64_t tau);
// kLeaving: ceil(C ln(T K) K e^(2m/K) / mu) with MC2, or without the division
// by mu with MC3.
std::int64_t CrowdLeavingBudget(const CrowdParams& params);

// Strategies for more players than arms.
//   kOriginal: explore with corrected estimates until the (K-1)-th and K-th
//              sorted estimates are 3 sqrt(g'/tau) apart, wait 24 tau, run
//              MC2 on the best K - 1 arms, and fall back to the worst arm.
//   kLeaving:  run musical chairs on all arms from round one, leave on
//              failure.
class CrowdPlayer : public Player {
 public:
  enum class Stage { kExplore, kWait, kChairs, kExploit, kFallback, kLeft };

  explicit CrowdPlayer(const CrowdParams& params);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;
  bool HasLeft() const override { return stage_ == Stage::kLeft; }

  Stage stage() const { return stage_; }
  double exploration_constant() const { return g_; }
  std::int64_t explore_rounds() const { return tau_; }
  const std::vector<double>& estimates() const { return estimates_; }
  const std::vector<Arm>& targets() const { return targets_; }
  std::optional<std::int64_t> chairs_budget() const { return budget_; }
  Arm occupied_arm() const { return occupied_; }
  Arm fallback_arm() const { return fallback_; }

 private:
  void StartChairs();
  void EndChairs();

  CrowdParams params_;
  double p_;
  double g_;
  Stage stage_;
  std::vector<double> sums_;
  std::vector<std::int64_t> pulls_;
  std::vector<double> estimates_;
  std::int64_t tau_ = 0;
  std::int64_t wait_remaining_ = 0;
  std::vector<Arm> targets_;
  std::optional<std::int64_t> budget_;
  std::optional<MusicalChairs> chairs_;
  Arm occupied_ = kNoArm;
  Arm fallback_ = kNoArm;
};

}  // namespace mpbandit

#endif  // MPBANDIT_MORE_THAN_K_H_
