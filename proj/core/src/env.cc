#include "mpbandit/env.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mpbandit/errors.h"

namespace mpbandit {
namespace {

// phi(a) / (1 - Phi(a)), the inverse Mills ratio of the standard normal.
double InverseMillsRatio(double a) {
  if (a < 5.0) {
    const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    const double upper_tail = 0.5 * std::erfc(a / std::numbers::sqrt2);
    return pdf / upper_tail;
  }
  // Laplace continued fraction for (1 - Phi(a)) / phi(a), evaluated bottom-up.
  double f = a;
  for (int k = 120; k >= 1; --k) f = a + k / f;
  return f;
}

// Standard normal conditioned on z >= a.
double SampleTruncatedStandardNormal(double a, RandomStream& rng) {
  if (a <= 0.4) {
    for (;;) {
      const double z = rng.StandardNormal();
      if (z >= a) return z;
    }
  }
  // Robert (1995): translated-exponential proposal with optimal rate.
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(1.0 - rng.UniformDouble()) / rate;
    const double accept = std::exp(-0.5 * (z - rate) * (z - rate));
    if (rng.UniformDouble() <= accept) return z;
  }
}

std::string DescribeArm(int arm) {
  std::ostringstream os;
  os << "arm " << arm;
  return os.str();
}

template <typename RewardFn>
void Resolve(const EnvironmentConfig& config, std::span<const Arm> actions,
             const std::vector<bool>& has_left, std::int64_t round,
             RewardFn reward_of, RoundOutcome& outcome) {
  const int num_arms = config.num_arms();
  const int num_players = static_cast<int>(actions.size());
  if (num_players != config.num_players) {
    throw ContractViolation("expected " + std::to_string(config.num_players) +
                            " actions, got " + std::to_string(num_players));
  }
  outcome.collision.assign(num_arms, false);
  std::vector<bool>& crowded = outcome.collision;
  thread_local std::vector<unsigned char> seen;
  seen.assign(num_arms, 0);
  for (int j = 0; j < num_players; ++j) {
    const Arm a = actions[j];
    if (a < 0 || a > num_arms) throw InvalidActionError(j, round, a);
    if (a == kNoArm) {
      const bool left = !has_left.empty() && has_left[j];
      if (!config.dummy_action_enabled && !left) {
        throw InvalidActionError(j, round, a);
      }
      continue;
    }
    if (seen[a - 1]) crowded[a - 1] = true;
    seen[a - 1] = 1;
  }
  outcome.reward.assign(num_players, 0.0);
  const bool sense = config.feedback == Feedback::kRewardAndCollision;
  if (sense) {
    if (!outcome.collision_observed) outcome.collision_observed.emplace();
    outcome.collision_observed->assign(num_players, false);
  } else {
    outcome.collision_observed.reset();
  }
  for (int j = 0; j < num_players; ++j) {
    const Arm a = actions[j];
    if (a == kNoArm) continue;
    const bool collided = outcome.collision[a - 1];
    outcome.reward[j] = collided ? 0.0 : reward_of(j, a);
    if (sense) (*outcome.collision_observed)[j] = collided;
  }
}

}  // namespace

InvalidActionError::InvalidActionError(int player, std::int64_t round,
                                       int action)
    : Error("player " + std::to_string(player) + " played invalid action " +
            std::to_string(action) + " in round " + std::to_string(round)),
      player_(player),
      round_(round),
      action_(action) {}

namespace {
std::string JoinViolations(const std::vector<std::string>& violations) {
  std::string out = "invalid configuration:";
  for (const auto& v : violations) out += "\n  - " + v;
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(JoinViolations(violations)), violations_(std::move(violations)) {}

std::vector<std::string> EnvironmentConfig::Violations() const {
  std::vector<std::string> out;
  const int k = num_arms();
  if (k < 2) out.push_back("need at least 2 arms, got " + std::to_string(k));
  if (num_players < 1) {
    out.push_back("need at least 1 player, got " + std::to_string(num_players));
  }
  if (horizon < 1) out.push_back("horizon must be >= 1");
  for (int i = 1; i <= k; ++i) {
    const ArmSpec& arm = arms[i - 1];
    if (!std::isfinite(arm.mean)) {
      out.push_back(DescribeArm(i) + ": mean is not finite");
      continue;
    }
    switch (arm.distribution) {
      case RewardDistribution::kBernoulli:
      case RewardDistribution::kBeta:
        if (arm.mean < 0.0 || arm.mean > 1.0) {
          out.push_back(DescribeArm(i) + ": mean must lie in [0, 1]");
        }
        break;
      case RewardDistribution::kTruncatedGaussian:
        if (!(arm.mean > 0.0)) {
          out.push_back(DescribeArm(i) + ": truncated-Gaussian mean must be > 0");
        }
        if (!(arm.sigma > 0.0)) {
          out.push_back(DescribeArm(i) + ": sigma must be > 0");
        }
        break;
    }
  }
  if (per_player_means) {
    const auto& rows = *per_player_means;
    if (static_cast<int>(rows.size()) != num_players) {
      out.push_back("per_player_means needs one row per player");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (static_cast<int>(rows[j].size()) != k) {
        out.push_back("per_player_means row " + std::to_string(j) +
                      " needs one entry per arm");
      }
      for (double v : rows[j]) {
        if (!(v >= 0.0 && v <= 1.0)) {
          out.push_back("per_player_means row " + std::to_string(j) +
                        " has an entry outside [0, 1]");
          break;
        }
      }
    }
    for (int i = 1; i <= k; ++i) {
      if (arms[i - 1].distribution == RewardDistribution::kTruncatedGaussian) {
        out.push_back(DescribeArm(i) +
                      ": per-player means support bounded distributions only");
      }
    }
  }
  return out;
}

void EnvironmentConfig::Validate() const {
  auto violations = Violations();
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

std::vector<double> EnvironmentConfig::SortedMeans() const {
  std::vector<double> means;
  means.reserve(arms.size());
  for (const auto& a : arms) means.push_back(a.mean);
  std::sort(means.begin(), means.end(), std::greater<>());
  return means;
}

std::optional<double> EnvironmentConfig::Gap() const {
  if (num_players >= num_arms() || num_players < 1) return std::nullopt;
  const auto means = SortedMeans();
  return means[num_players - 1] - means[num_players];
}

std::optional<double> EnvironmentConfig::RelaxedGap() const {
  const auto gap = Gap();
  if (!gap) return std::nullopt;
  const auto means = SortedMeans();
  const double mu_m = means[num_players - 1];
  std::optional<double> nearest_below;
  for (double mu : means) {
    const double d = mu_m - mu;
    if (d > 0.0 && (!nearest_below || d < *nearest_below)) nearest_below = d;
  }
  if (!nearest_below) return gap;
  return std::max(*gap, *nearest_below);
}

double TruncatedGaussianMean(double location, double sigma) {
  return location + sigma * InverseMillsRatio(-location / sigma);
}

double TruncatedGaussianLocation(double mean, double sigma) {
  double hi = mean;  // the truncated mean at location == mean exceeds mean
  double step = sigma;
  double lo = mean - step;
  while (TruncatedGaussianMean(lo, sigma) >= mean) {
    step *= 2.0;
    lo = mean - step;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (TruncatedGaussianMean(mid, sigma) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double NoCollisionProbability(int num_arms, int num_players) {
  return std::pow(1.0 - 1.0 / num_arms, num_players - 1);
}

Environment::Environment(EnvironmentConfig config)
    : config_(std::move(config)),
      streams_(config_.master_seed, config_.num_arms(), config_.num_players) {
  config_.Validate();
  location_.assign(config_.num_arms(), 0.0);
  for (int i = 0; i < config_.num_arms(); ++i) {
    const ArmSpec& arm = config_.arms[i];
    if (arm.distribution == RewardDistribution::kTruncatedGaussian) {
      location_[i] = TruncatedGaussianLocation(arm.mean, arm.sigma);
    }
  }
}

double Environment::AchievedMean(int arm) const {
  const ArmSpec& spec = config_.arms[arm - 1];
  if (spec.distribution == RewardDistribution::kTruncatedGaussian) {
    return TruncatedGaussianMean(location_[arm - 1], spec.sigma);
  }
  return spec.mean;
}

double Environment::Sample(const ArmSpec& spec, double mean, double location,
                           RandomStream& rng) {
  switch (spec.distribution) {
    case RewardDistribution::kBernoulli:
      return rng.UniformDouble() < mean ? 1.0 : 0.0;
    case RewardDistribution::kBeta: {
      if (mean <= 0.0) return 0.0;
      if (mean >= 1.0) return 1.0;
      return std::pow(rng.UniformDouble(), (1.0 - mean) / mean);
    }
    case RewardDistribution::kTruncatedGaussian: {
      const double z =
          SampleTruncatedStandardNormal(-location / spec.sigma, rng);
      return std::max(0.0, location + spec.sigma * z);
    }
  }
  return 0.0;
}

double Environment::SampleArm(int arm, std::int64_t round) const {
  RandomStream rng = streams_.ArmRound(arm, round);
  const ArmSpec& spec = config_.arms[arm - 1];
  return Sample(spec, spec.mean, location_[arm - 1], rng);
}

double Environment::SamplePlayerArm(int player, int arm,
                                    std::int64_t round) const {
  RandomStream rng = streams_.ArmPlayerRound(arm, player, round);
  return Sample(config_.arms[arm - 1],
                (*config_.per_player_means)[player][arm - 1], 0.0, rng);
}

void Environment::SampleRoundRewards(std::int64_t round,
                                     std::span<double> out) const {
  for (int i = 1; i <= num_arms(); ++i) out[i - 1] = SampleArm(i, round);
}

std::vector<double> Environment::SampleRoundRewards(std::int64_t round) const {
  std::vector<double> out(num_arms());
  SampleRoundRewards(round, out);
  return out;
}

void Environment::SamplePerPlayerRewards(std::int64_t round,
                                         std::span<double> out) const {
  const int k = num_arms();
  for (int j = 0; j < num_players(); ++j) {
    for (int i = 1; i <= k; ++i) out[j * k + (i - 1)] = SamplePlayerArm(j, i, round);
  }
}

void Environment::Play(std::int64_t round, std::span<const Arm> actions,
                       const std::vector<bool>& has_left,
                       RoundOutcome& out) const {
  if (per_player()) {
    Resolve(config_, actions, has_left, round,
            [&](int j, Arm a) { return SamplePlayerArm(j, a, round); }, out);
  } else {
    Resolve(config_, actions, has_left, round,
            [&](int, Arm a) { return SampleArm(a, round); }, out);
  }
}

void ResolveRoundInto(const EnvironmentConfig& config,
                      std::span<const Arm> actions,
                      std::span<const double> rewards,
                      const std::vector<bool>& has_left, std::int64_t round,
                      RoundOutcome& out) {
  Resolve(config, actions, has_left, round,
          [&](int, Arm a) { return rewards[a - 1]; }, out);
}

void ResolveRoundPerPlayerInto(const EnvironmentConfig& config,
                               std::span<const Arm> actions,
                               std::span<const double> rewards,
                               const std::vector<bool>& has_left,
                               std::int64_t round, RoundOutcome& out) {
  const int k = config.num_arms();
  Resolve(config, actions, has_left, round,
          [&](int j, Arm a) { return rewards[j * k + (a - 1)]; }, out);
}

RoundOutcome ResolveRound(const EnvironmentConfig& config,
                          std::span<const Arm> actions,
                          std::span<const double> rewards,
                          const std::vector<bool>& has_left, std::int64_t round) {
  RoundOutcome out;
  ResolveRoundInto(config, actions, rewards, has_left, round, out);
  return out;
}

RoundOutcome ResolveRoundPerPlayer(const EnvironmentConfig& config,
                                   std::span<const Arm> actions,
                                   std::span<const double> rewards,
                                   const std::vector<bool>& has_left,
                                   std::int64_t round) {
  RoundOutcome out;
  ResolveRoundPerPlayerInto(config, actions, rewards, has_left, round, out);
  return out;
}

}  // namespace mpbandit
