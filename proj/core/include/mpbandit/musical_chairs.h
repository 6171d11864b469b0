#ifndef MPBANDIT_MUSICAL_CHAIRS_H_
#define MPBANDIT_MUSICAL_CHAIRS_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mpbandit/env.h"
#include "mpbandit/random.h"

namespace mpbandit {

// Variants of the musical-chairs occupation protocol.
//   kMc1: pull uniformly inside the target set until a positive reward; no
//         round budget.
//   kMc2: pull uniformly over all K arms for exactly `budget` rounds; occupy a
//         target arm on the first positive reward from it.
//   kMc3: as kMc2, but occupation is certified by the absence of a collision
//         (requires collision feedback).
// After occupying, kMc2/kMc3 keep pulling the occupied arm until the budget is
// spent.
enum class ChairsRule { kMc1, kMc2, kMc3 };

std::string_view ToString(ChairsRule rule);

class MusicalChairs {
 public:
  // Unbounded kMc1 state.
  MusicalChairs(int num_arms, std::vector<Arm> targets);
  // Budgeted kMc2 / kMc3 state.
  MusicalChairs(ChairsRule rule, int num_arms, std::vector<Arm> targets,
                std::int64_t budget);

  Arm ChooseAction(RandomStream& rng);
  // `collision` must be present exactly when the rule is kMc3.
  void Observe(Arm pulled, double reward, std::optional<bool> collision);

  ChairsRule rule() const { return rule_; }
  bool terminal() const;
  bool occupied() const { return occupied_ != kNoArm; }
  // The occupied arm, or kNoArm.
  Arm occupied_arm() const { return occupied_; }
  std::int64_t rounds_elapsed() const { return rounds_elapsed_; }
  // std::nullopt for kMc1.
  std::optional<std::int64_t> budget() const { return budget_; }
  const std::vector<Arm>& targets() const { return targets_; }
  bool IsTarget(Arm arm) const;

 private:
  ChairsRule rule_;
  int num_arms_;
  std::vector<Arm> targets_;
  std::vector<bool> is_target_;
  std::optional<std::int64_t> budget_;
  std::int64_t rounds_elapsed_ = 0;
  Arm occupied_ = kNoArm;
};

}  // namespace mpbandit

#endif  // MPBANDIT_MUSICAL_CHAIRS_H_
