#include "mpbandit/more_than_k.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpbandit/errors.h"
#include "mpbandit/log_regret_player.h"

namespace mpbandit {

std::string_view ToString(CrowdMode mode) {
  return mode == CrowdMode::kOriginal ? "original" : "leaving";
}

CrowdMode ParseCrowdMode(std::string_view text) {
  if (text == "original") return CrowdMode::kOriginal;
  if (text == "leaving") return CrowdMode::kLeaving;
  throw InvalidModeError("unknown more-than-K mode '" + std::string(text) + "'");
}

double CrowdExplorationConstant(const CrowdParams& p) {
  const double k = p.num_arms;
  const double q = NoCollisionProbability(p.num_arms, p.num_players);
  return p.constant * k * std::log(k * static_cast<double>(p.horizon)) / (q * q);
}

std::int64_t CrowdOriginalBudget(const CrowdParams& p, std::int64_t tau) {
  const double k = p.num_arms;
  const double q = NoCollisionProbability(p.num_arms, p.num_players);
  const double g = CrowdExplorationConstant(p);
  const double v = p.constant * k * std::log(k * static_cast<double>(p.horizon)) *
                   std::sqrt(static_cast<double>(tau) / g) / q;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

std::int64_t CrowdLeavingBudget(const CrowdParams& p) {
  const double k = p.num_arms;
  const double m = p.num_players;
  double v = p.constant * std::log(static_cast<double>(p.horizon) * k) * k *
             std::exp(2.0 * m / k);
  if (!p.collision_feedback) {
    if (!(p.mu_lower > 0.0)) {
      throw ContractViolation("leaving mode without collision feedback needs mu_lower > 0");
    }
    v /= p.mu_lower;
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

CrowdPlayer::CrowdPlayer(const CrowdParams& params)
    : params_(params),
      p_(NoCollisionProbability(params.num_arms, params.num_players)),
      g_(CrowdExplorationConstant(params)),
      stage_(params.mode == CrowdMode::kOriginal ? Stage::kExplore : Stage::kChairs),
      sums_(params.num_arms, 0.0),
      pulls_(params.num_arms, 0),
      estimates_(params.num_arms, 0.0) {
  if (params.num_arms < 2) throw ContractViolation("more-than-K: need K >= 2");
  if (params_.mode == CrowdMode::kLeaving) {
    targets_.resize(params.num_arms);
    std::iota(targets_.begin(), targets_.end(), 1);
    StartChairs();
  }
}

void CrowdPlayer::StartChairs() {
  if (params_.mode == CrowdMode::kOriginal) {
    budget_ = CrowdOriginalBudget(params_, tau_);
    chairs_.emplace(ChairsRule::kMc2, params_.num_arms, targets_, *budget_);
  } else {
    budget_ = CrowdLeavingBudget(params_);
    chairs_.emplace(params_.collision_feedback ? ChairsRule::kMc3 : ChairsRule::kMc2,
                    params_.num_arms, targets_, *budget_);
  }
  stage_ = Stage::kChairs;
}

void CrowdPlayer::EndChairs() {
  occupied_ = chairs_->occupied_arm();
  chairs_.reset();
  if (occupied_ != kNoArm) {
    stage_ = Stage::kExploit;
  } else if (params_.mode == CrowdMode::kLeaving) {
    stage_ = Stage::kLeft;
  } else {
    stage_ = Stage::kFallback;
  }
}

Arm CrowdPlayer::ChooseAction(RandomStream& rng) {
  switch (stage_) {
    case Stage::kExplore:
    case Stage::kWait:
      return static_cast<Arm>(rng.UniformIndex(params_.num_arms)) + 1;
    case Stage::kChairs:
      return chairs_->ChooseAction(rng);
    case Stage::kExploit:
      return occupied_;
    case Stage::kFallback:
      return fallback_;
    case Stage::kLeft:
      return kNoArm;
  }
  return kNoArm;
}

void CrowdPlayer::Observe(const Observation& obs) {
  switch (stage_) {
    case Stage::kExplore: {
      const int i = obs.arm - 1;
      sums_[i] += obs.reward;
      ++pulls_[i];
      estimates_[i] = sums_[i] / static_cast<double>(pulls_[i]) / p_;
      ++tau_;
      // Separate the best K - 1 arms from the worst one.
      if (LogRegretPlayer::StoppingRuleHolds(estimates_, params_.num_arms - 1, g_,
                                             tau_)) {
        const auto ranked = LogRegretPlayer::RankArms(estimates_);
        targets_.assign(ranked.begin(), ranked.end() - 1);
        fallback_ = ranked.back();
        wait_remaining_ = 24 * tau_;
        stage_ = Stage::kWait;
      }
      break;
    }
    case Stage::kWait:
      if (--wait_remaining_ == 0) StartChairs();
      break;
    case Stage::kChairs:
      chairs_->Observe(obs.arm, obs.reward,
                       chairs_->rule() == ChairsRule::kMc3 ? obs.collision
                                                           : std::nullopt);
      if (chairs_->terminal()) EndChairs();
      break;
    case Stage::kExploit:
    case Stage::kFallback:
    case Stage::kLeft:
      break;
  }
}

std::string_view CrowdPlayer::Phase() const {
  switch (stage_) {
    case Stage::kExplore:
      return "explore";
    case Stage::kWait:
      return "wait";
    case Stage::kChairs:
      return "occupy";
    case Stage::kExploit:
      return "exploit";
    case Stage::kFallback:
      return "fallback";
    case Stage::kLeft:
      return "left";
  }
  return "?";
}

}  // namespace mpbandit
