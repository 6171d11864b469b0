#ifndef MPBANDIT_LOG_REGRET_PLAYER_H_
#define MPBANDIT_LOG_REGRET_PLAYER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mpbandit/musical_chairs.h"
#include "mpbandit/player.h"

namespace mpbandit {

struct LogRegretParams {
  int num_arms = 2;
  int num_players = 2;
  std::int64_t horizon = 1;
  // Multiplies the exploration constant g. 1.0 reproduces the analysed
  // constants; smaller values make desk-scale horizons feasible.
  double c_scale = 1.0;
};

// g = c_scale * 128 K ln(3 K m^2 T^2).
double LogRegretExplorationConstant(const LogRegretParams& params);

// Four-phase player for the model without collision information:
//   explore  - uniform pulls; collision-corrected mean estimates; stops at the
//              first round tau where the m-th and (m+1)-th sorted estimates
//              differ by at least 3 sqrt(g / tau);
//   wait     - 24 tau further uniform pulls, estimates frozen, so players who
//              are still exploring keep seeing uniform collision rates;
//   occupy   - unbounded musical chairs on the m best estimated arms;
//   exploit  - pull the occupied arm until the end of the game.
// Phases are not synchronized across players.
class LogRegretPlayer : public Player {
 public:
  enum class Stage { kExplore, kWait, kOccupy, kExploit };

  explicit LogRegretPlayer(const LogRegretParams& params);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;

  Stage stage() const { return stage_; }
  double exploration_constant() const { return g_; }
  // Corrected estimate of arm i at index i - 1; 0 for unpulled arms.
  const std::vector<double>& Estimates() const { return estimates_; }
  double Estimate(Arm arm) const;
  std::int64_t pulls(Arm arm) const { return pulls_[arm - 1]; }
  // Number of exploration rounds completed so far (tau once exploration ends).
  std::int64_t explore_rounds() const { return tau_; }
  std::int64_t wait_remaining() const { return wait_remaining_; }
  const std::vector<Arm>& best_arms() const { return best_arms_; }
  Arm occupied_arm() const { return occupied_; }

  // Sorts arms by (estimate descending, arm ascending).
  static std::vector<Arm> RankArms(const std::vector<double>& estimates);
  // True when the stopping rule fires for the given corrected estimates after
  // `tau` exploration rounds.
  static bool StoppingRuleHolds(const std::vector<double>& estimates,
                                int num_players, double g, std::int64_t tau);

 private:
  void FinishExploration();

  LogRegretParams params_;
  double g_;
  double no_collision_;
  Stage stage_ = Stage::kExplore;
  std::vector<double> reward_sums_;
  std::vector<std::int64_t> pulls_;
  std::vector<double> estimates_;
  std::vector<double> scratch_;
  std::int64_t tau_ = 0;
  std::int64_t wait_remaining_ = 0;
  std::vector<Arm> best_arms_;
  std::optional<MusicalChairs> chairs_;
  Arm occupied_ = kNoArm;
};

}  // namespace mpbandit

#endif  // MPBANDIT_LOG_REGRET_PLAYER_H_
