#include "mpbandit/log_regret_player.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mpbandit {

double LogRegretExplorationConstant(const LogRegretParams& p) {
  const double k = p.num_arms;
  const double m = p.num_players;
  const double t = static_cast<double>(p.horizon);
  return p.c_scale * 128.0 * k * std::log(3.0 * k * m * m * t * t);
}

LogRegretPlayer::LogRegretPlayer(const LogRegretParams& params)
    : params_(params),
      g_(LogRegretExplorationConstant(params)),
      no_collision_(NoCollisionProbability(params.num_arms, params.num_players)),
      reward_sums_(params.num_arms, 0.0),
      pulls_(params.num_arms, 0),
      estimates_(params.num_arms, 0.0) {}

double LogRegretPlayer::Estimate(Arm arm) const {
  const auto n = pulls_[arm - 1];
  if (n == 0) return 0.0;
  return reward_sums_[arm - 1] / static_cast<double>(n) / no_collision_;
}


std::vector<Arm> LogRegretPlayer::RankArms(const std::vector<double>& estimates) {
  std::vector<Arm> order(estimates.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](Arm a, Arm b) {
    return estimates[a - 1] > estimates[b - 1];
  });
  return order;
}

namespace {

bool StoppingRuleHoldsInPlace(std::vector<double>& sorted, int num_players,
                              double g, std::int64_t tau) {
  if (tau <= 0) return false;
  const int k = static_cast<int>(sorted.size());
  // With m >= K every arm belongs to the best-m set; there is nothing left to
  // separate and the missing (m+1)-th estimate is taken as -infinity.
  if (num_players >= k) return true;
  std::nth_element(sorted.begin(), sorted.begin() + num_players, sorted.end(),
                   std::greater<>());
  const double next = sorted[num_players];
  const double mth =
      *std::min_element(sorted.begin(), sorted.begin() + num_players);
  return mth - next >= 3.0 * std::sqrt(g / static_cast<double>(tau));
}

}  // namespace

bool LogRegretPlayer::StoppingRuleHolds(const std::vector<double>& estimates,
                                        int num_players, double g,
                                        std::int64_t tau) {
  std::vector<double> sorted = estimates;
  return StoppingRuleHoldsInPlace(sorted, num_players, g, tau);
}

Arm LogRegretPlayer::ChooseAction(RandomStream& rng) {
  switch (stage_) {
    case Stage::kExplore:
    case Stage::kWait:
      return static_cast<Arm>(rng.UniformIndex(params_.num_arms)) + 1;
    case Stage::kOccupy:
      return chairs_->ChooseAction(rng);
    case Stage::kExploit:
      return occupied_;
  }
  return kNoArm;
}

void LogRegretPlayer::FinishExploration() {
  const auto ranked = RankArms(estimates_);
  const int m = std::min(params_.num_players, params_.num_arms);
  best_arms_.assign(ranked.begin(), ranked.begin() + m);
  wait_remaining_ = 24 * tau_;
  stage_ = wait_remaining_ > 0 ? Stage::kWait : Stage::kOccupy;
  if (stage_ == Stage::kOccupy) chairs_.emplace(params_.num_arms, best_arms_);
}

void LogRegretPlayer::Observe(const Observation& obs) {
  switch (stage_) {
    case Stage::kExplore: {
      reward_sums_[obs.arm - 1] += obs.reward;
      ++pulls_[obs.arm - 1];
      estimates_[obs.arm - 1] = Estimate(obs.arm);
      ++tau_;
      scratch_ = estimates_;
      if (StoppingRuleHoldsInPlace(scratch_, params_.num_players, g_, tau_)) {
        FinishExploration();
      }
      break;
    }
    case Stage::kWait:
      if (--wait_remaining_ == 0) {
        stage_ = Stage::kOccupy;
        chairs_.emplace(params_.num_arms, best_arms_);
      }
      break;
    case Stage::kOccupy:
      chairs_->Observe(obs.arm, obs.reward, std::nullopt);
      if (chairs_->occupied()) {
        occupied_ = chairs_->occupied_arm();
        stage_ = Stage::kExploit;
      }
      break;
    case Stage::kExploit:
      break;
  }
}

std::string_view LogRegretPlayer::Phase() const {
  switch (stage_) {
    case Stage::kExplore:
      return "explore";
    case Stage::kWait:
      return "wait";
    case Stage::kOccupy:
      return "occupy";
    case Stage::kExploit:
      return "exploit";
  }
  return "?";
}

}  // namespace mpbandit
