#ifndef MPBANDIT_ANTICOORDINATION_H_
#define MPBANDIT_ANTICOORDINATION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mpbandit/musical_chairs.h"
#include "mpbandit/player.h"

namespace mpbandit {

struct AntiCoordinationParams {
  int num_arms = 2;
  int num_players = 2;
  double epsilon = 0.2;
  double delta = 0.1;
};

struct AntiCoordinationSchedule {
  std::int64_t explore_rounds;  // ceil(512 K ln(6 m K / delta) / eps^2)
  std::int64_t stage_budget;    // ceil(4 K ln(2 m K / delta) / eps)
  std::int64_t total_rounds;    // explore_rounds + K * stage_budget
};

AntiCoordinationSchedule ComputeAntiCoordinationSchedule(
    const AntiCoordinationParams& params);

// Player for anti-coordination games with player-specific means. Explores
// uniformly with collision-corrected estimates, then tries K singleton
// musical-chairs stages in order of decreasing estimate. The first occupied
// arm is final; if every stage fails the player settles on the dummy action.
class AntiCoordinationPlayer : public Player {
 public:
  enum class Stage { kExplore, kChairs, kSettled };

  explicit AntiCoordinationPlayer(const AntiCoordinationParams& params);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;

  const AntiCoordinationSchedule& schedule() const { return schedule_; }
  Stage stage() const { return stage_; }
  std::int64_t rounds_played() const { return rounds_; }
  const std::vector<double>& estimates() const { return estimates_; }
  const std::vector<Arm>& order() const { return order_; }
  // 1-based index of the active chairs stage; 0 outside kChairs.
  int current_stage() const { return stage_ == Stage::kChairs ? stage_index_ + 1 : 0; }
  // Chosen action so far: an arm once occupied, else kNoArm.
  Arm chosen() const { return chosen_; }

 private:
  void StartStage();

  AntiCoordinationParams params_;
  AntiCoordinationSchedule schedule_;
  double no_collision_;
  Stage stage_ = Stage::kExplore;
  std::int64_t rounds_ = 0;
  std::vector<double> sums_;
  std::vector<std::int64_t> pulls_;
  std::vector<double> estimates_;
  std::vector<Arm> order_;
  int stage_index_ = 0;
  std::optional<MusicalChairs> chairs_;
  std::int64_t stage_rounds_ = 0;
  Arm chosen_ = kNoArm;
};

}  // namespace mpbandit

#endif  // MPBANDIT_ANTICOORDINATION_H_
