#include "mpbandit/regret.h"

#include <algorithm>
#include <functional>
#include <string>

#include "mpbandit/errors.h"

namespace mpbandit {

std::string_view ToString(RegretMode mode) {
  switch (mode) {
    case RegretMode::kTopM:
      return "top_m";
    case RegretMode::kTopKMinus1:
      return "top_k_minus_1";
    case RegretMode::kTopKWithLeaving:
      return "top_k_with_leaving";
  }
  return "?";
}

RegretMode ParseRegretMode(std::string_view text) {
  if (text == "top_m") return RegretMode::kTopM;
  if (text == "top_k_minus_1") return RegretMode::kTopKMinus1;
  if (text == "top_k_with_leaving") return RegretMode::kTopKWithLeaving;
  throw InvalidModeError("unknown regret mode '" + std::string(text) + "'");
}

double RegretBaseline(const EnvironmentConfig& config, RegretMode mode) {
  const auto sorted = config.SortedMeans();
  const int k = config.num_arms();
  const int m = config.num_players;
  int take = 0;
  switch (mode) {
    case RegretMode::kTopM:
      if (m > k) {
        throw InvalidModeError("top_m regret needs m <= K (m=" + std::to_string(m) +
                               ", K=" + std::to_string(k) + ")");
      }
      take = m;
      break;
    case RegretMode::kTopKMinus1:
      take = k - 1;
      break;
    case RegretMode::kTopKWithLeaving:
      take = k;
      break;
  }
  double sum = 0.0;
  for (int i = 0; i < take; ++i) sum += sorted[i];
  return sum;
}

double AchievedValue(const EnvironmentConfig& config, std::span<const Arm> actions,
                     const std::vector<bool>& collisions) {
  // At most K terms are nonzero (one per uncollided arm).
  thread_local std::vector<double> terms;
  terms.clear();
  for (const Arm a : actions) {
    if (a == kNoArm || collisions[a - 1]) continue;
    terms.push_back(config.arms[a - 1].mean);
  }
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double sum = 0.0;
  for (const double v : terms) sum += v;
  return sum;
}

RegretAccumulator::RegretAccumulator(const EnvironmentConfig& config, RegretMode mode)
    : config_(&config),
      baseline_(RegretBaseline(config, mode)),
      pulled_(config.num_arms(), 0) {
  for (Arm i = 1; i <= config.num_arms(); ++i) by_mean_.push_back(i);
  std::stable_sort(by_mean_.begin(), by_mean_.end(), [&](Arm a, Arm b) {
    return config.arms[a - 1].mean > config.arms[b - 1].mean;
  });
}

double RegretAccumulator::Add(std::int64_t t, std::span<const Arm> actions,
                              const std::vector<bool>& collisions) {
  // Same descending-order summation as AchievedValue, without the sort.
  std::fill(pulled_.begin(), pulled_.end(), 0);
  for (const Arm a : actions) {
    if (a != kNoArm) pulled_[a - 1] = 1;
  }
  double achieved = 0.0;
  for (const Arm a : by_mean_) {
    if (pulled_[a - 1] && !collisions[a - 1]) achieved += config_->arms[a - 1].mean;
  }
  const double inc = baseline_ - achieved;
  if (inc > 0.0) last_positive_ = t;
  cumulative_ += inc;
  return inc;
}

}  // namespace mpbandit
