#ifndef MPBANDIT_PLAYER_H_
#define MPBANDIT_PLAYER_H_

#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "mpbandit/env.h"
#include "mpbandit/random.h"

namespace mpbandit {

// What a player learns at the end of a round about her own pull.
struct Observation {
  Arm arm = kNoArm;
  double reward = 0.0;
  // Present only under Feedback::kRewardAndCollision.
  std::optional<bool> collision;
};

// A decentralized player. The engine calls ChooseAction once per round, then,
// after every player has acted, Observe with the outcome of that action.
// Players never see each other's state.
class Player {
 public:
  virtual ~Player() = default;

  // `rng` is this player's private decision stream.
  virtual Arm ChooseAction(RandomStream& rng) = 0;
  virtual void Observe(const Observation& observation) = 0;

  // Short tag naming the current phase. Must point to static storage.
  virtual std::string_view Phase() const = 0;
  // True once the player has permanently stopped pulling arms.
  virtual bool HasLeft() const { return false; }
};

// Builds the player with the given 0-based index.
using PlayerFactory = std::function<std::unique_ptr<Player>(int player)>;

// Pulls one fixed arm every round. Used for oracles and tests.
class FixedArmPlayer : public Player {
 public:
  explicit FixedArmPlayer(Arm arm) : arm_(arm) {}
  Arm ChooseAction(RandomStream&) override { return arm_; }
  void Observe(const Observation&) override {}
  std::string_view Phase() const override { return "fixed"; }

 private:
  Arm arm_;
};

// Pulls a uniformly random arm every round.
class UniformRandomPlayer : public Player {
 public:
  explicit UniformRandomPlayer(int num_arms) : num_arms_(num_arms) {}
  Arm ChooseAction(RandomStream& rng) override {
    return static_cast<Arm>(rng.UniformIndex(num_arms_)) + 1;
  }
  void Observe(const Observation&) override {}
  std::string_view Phase() const override { return "random"; }

 private:
  int num_arms_;
};

}  // namespace mpbandit

#endif  // MPBANDIT_PLAYER_H_
