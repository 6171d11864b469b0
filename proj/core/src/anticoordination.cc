#include "mpbandit/anticoordination.h"

#include <algorithm>
#include <cmath>

#include "mpbandit/errors.h"
#include "mpbandit/log_regret_player.h"

namespace mpbandit {

AntiCoordinationSchedule ComputeAntiCoordinationSchedule(
    const AntiCoordinationParams& p) {
  if (p.num_arms < 1 || p.num_players < 1) {
    throw ContractViolation("anticoordination: need K >= 1 and m >= 1");
  }
  if (!(p.epsilon > 0.0) || !(p.delta > 0.0 && p.delta < 1.0)) {
    throw ContractViolation("anticoordination: need eps > 0 and delta in (0, 1)");
  }
  const double k = p.num_arms;
  const double m = p.num_players;
  AntiCoordinationSchedule s;
  s.explore_rounds = static_cast<std::int64_t>(
      std::ceil(512.0 * k * std::log(6.0 * m * k / p.delta) / (p.epsilon * p.epsilon)));
  s.stage_budget = static_cast<std::int64_t>(
      std::ceil(4.0 * k * std::log(2.0 * m * k / p.delta) / p.epsilon));
  s.total_rounds = s.explore_rounds + p.num_arms * s.stage_budget;
  return s;
}

AntiCoordinationPlayer::AntiCoordinationPlayer(const AntiCoordinationParams& params)
    : params_(params),
      schedule_(ComputeAntiCoordinationSchedule(params)),
      no_collision_(NoCollisionProbability(params.num_arms, params.num_players)),
      sums_(params.num_arms, 0.0),
      pulls_(params.num_arms, 0),
      estimates_(params.num_arms, 0.0) {
  if (schedule_.explore_rounds == 0) StartStage();
}

void AntiCoordinationPlayer::StartStage() {
  if (stage_ == Stage::kExplore) {
    for (int i = 0; i < params_.num_arms; ++i) {
      estimates_[i] = pulls_[i] > 0
                          ? sums_[i] / static_cast<double>(pulls_[i]) / no_collision_
                          : 0.0;
    }
    order_ = LogRegretPlayer::RankArms(estimates_);
    stage_ = Stage::kChairs;
    stage_index_ = 0;
  }
  stage_rounds_ = 0;
  if (chosen_ == kNoArm) {
    chairs_.emplace(ChairsRule::kMc2, params_.num_arms,
                    std::vector<Arm>{order_[stage_index_]}, schedule_.stage_budget);
  } else {
    chairs_.reset();
  }
}

Arm AntiCoordinationPlayer::ChooseAction(RandomStream& rng) {
  switch (stage_) {
    case Stage::kExplore:
      return static_cast<Arm>(rng.UniformIndex(params_.num_arms)) + 1;
    case Stage::kChairs:
      return chairs_ ? chairs_->ChooseAction(rng) : chosen_;
    case Stage::kSettled:
      return chosen_;
  }
  return kNoArm;
}

void AntiCoordinationPlayer::Observe(const Observation& obs) {
  ++rounds_;
  switch (stage_) {
    case Stage::kExplore:
      sums_[obs.arm - 1] += obs.reward;
      ++pulls_[obs.arm - 1];
      if (rounds_ == schedule_.explore_rounds) StartStage();
      break;
    case Stage::kChairs:
      if (chairs_) {
        chairs_->Observe(obs.arm, obs.reward, std::nullopt);
        if (chairs_->occupied()) chosen_ = chairs_->occupied_arm();
      }
      if (++stage_rounds_ == schedule_.stage_budget) {
        if (++stage_index_ == params_.num_arms) {
          stage_ = Stage::kSettled;
          chairs_.reset();
        } else {
          StartStage();
        }
      }
      break;
    case Stage::kSettled:
      break;
  }
}

std::string_view AntiCoordinationPlayer::Phase() const {
  switch (stage_) {
    case Stage::kExplore:
      return "explore";
    case Stage::kChairs:
      return chosen_ == kNoArm ? "chairs" : "holding";
    case Stage::kSettled:
      return chosen_ == kNoArm ? "dummy" : "settled";
  }
  return "?";
}

}  // namespace mpbandit
