#include "mpbandit/musical_chairs.h"

#include <algorithm>

#include "mpbandit/errors.h"

namespace mpbandit {

std::string_view ToString(ChairsRule rule) {
  switch (rule) {
    case ChairsRule::kMc1:
      return "mc1";
    case ChairsRule::kMc2:
      return "mc2";
    case ChairsRule::kMc3:
      return "mc3";
  }
  return "?";
}

MusicalChairs::MusicalChairs(int num_arms, std::vector<Arm> targets)
    : rule_(ChairsRule::kMc1),
      num_arms_(num_arms),
      targets_(std::move(targets)),
      is_target_(num_arms + 1, false) {
  std::sort(targets_.begin(), targets_.end());
  targets_.erase(std::unique(targets_.begin(), targets_.end()), targets_.end());
  for (Arm a : targets_) {
    if (a < 1 || a > num_arms_) {
      throw InvalidTargetError("target arm " + std::to_string(a) +
                               " outside [1, K]");
    }
    is_target_[a] = true;
  }
}

MusicalChairs::MusicalChairs(ChairsRule rule, int num_arms,
                             std::vector<Arm> targets, std::int64_t budget)
    : MusicalChairs(num_arms, std::move(targets)) {
  if (rule == ChairsRule::kMc1) {
    throw ContractViolation("the unbounded rule takes no round budget");
  }
  if (budget < 0) throw ContractViolation("negative musical-chairs budget");
  rule_ = rule;
  budget_ = budget;
}

bool MusicalChairs::IsTarget(Arm arm) const {
  return arm >= 1 && arm <= num_arms_ && is_target_[arm];
}

bool MusicalChairs::terminal() const {
  if (rule_ == ChairsRule::kMc1) return occupied_ != kNoArm;
  return rounds_elapsed_ >= *budget_;
}

Arm MusicalChairs::ChooseAction(RandomStream& rng) {
  if (terminal()) throw ContractViolation("musical chairs already finished");
  if (occupied_ != kNoArm) return occupied_;
  if (rule_ == ChairsRule::kMc1) {
    if (targets_.empty()) {
      throw InvalidTargetError("unbounded musical chairs needs a target arm");
    }
    return targets_[rng.UniformIndex(static_cast<std::int64_t>(targets_.size()))];
  }
  return static_cast<Arm>(rng.UniformIndex(num_arms_)) + 1;
}

void MusicalChairs::Observe(Arm pulled, double reward,
                            std::optional<bool> collision) {
  if (terminal()) {
    throw ContractViolation("observation after musical chairs finished");
  }
  if ((rule_ == ChairsRule::kMc3) != collision.has_value()) {
    throw ContractViolation(
        "collision flag must be supplied exactly for the collision-sensing rule");
  }
  ++rounds_elapsed_;
  if (occupied_ != kNoArm || !IsTarget(pulled)) return;
  const bool certified =
      rule_ == ChairsRule::kMc3 ? !*collision : reward > 0.0;
  if (certified) occupied_ = pulled;
}

}  // namespace mpbandit
