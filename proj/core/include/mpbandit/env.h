#ifndef MPBANDIT_ENV_H_
#define MPBANDIT_ENV_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpbandit/random.h"

namespace mpbandit {

// Arms are numbered 1..K. Action 0 is the dummy action (also used by players
// who have left the game): it yields zero reward and never collides.
using Arm = int;
inline constexpr Arm kNoArm = 0;

enum class RewardDistribution {
  kBernoulli,
  // Beta(mu / (1 - mu), 1), sampled as U^((1 - mu) / mu). Continuous on
  // [0, 1] with mean exactly mu.
  kBeta,
  // Normal(location, sigma) conditioned on being nonnegative, with the
  // location shifted so that the truncated mean equals the configured mean.
  kTruncatedGaussian,
};

struct ArmSpec {
  double mean = 0.0;
  RewardDistribution distribution = RewardDistribution::kBernoulli;
  // Scale parameter of kTruncatedGaussian; ignored otherwise.
  double sigma = 1.0;
};

enum class Feedback { kRewardOnly, kRewardAndCollision };

struct EnvironmentConfig {
  int num_players = 2;
  std::vector<ArmSpec> arms;
  Feedback feedback = Feedback::kRewardOnly;
  std::int64_t horizon = 1;
  std::uint64_t master_seed = 0;
  // Anti-coordination games: per_player_means[j][i - 1] is the mean reward of
  // player j on arm i. Rows are players.
  std::optional<std::vector<std::vector<double>>> per_player_means;
  bool dummy_action_enabled = false;

  int num_arms() const { return static_cast<int>(arms.size()); }

  // Every violated invariant, in a stable order. Empty when valid.
  std::vector<std::string> Violations() const;
  // Throws ConfigError listing every violation.
  void Validate() const;

  // Arm means sorted in descending order.
  std::vector<double> SortedMeans() const;
  // mu_(m) - mu_(m+1); defined only when m < K.
  std::optional<double> Gap() const;
  // max{gap, min{mu_(m) - mu_i : mu_(m) - mu_i > 0}}. Falls back to the gap
  // when no arm lies strictly below mu_(m).
  std::optional<double> RelaxedGap() const;
};

struct RoundOutcome {
  std::vector<double> reward;            // r_j(t), one per player
  std::vector<bool> collision;           // C_i(t), one per arm (index i - 1)
  std::optional<std::vector<bool>> collision_observed;  // per player
};

// Precomputed per-arm sampler. Immutable after construction; sampling is a
// pure function of (master seed, arm, round).
class Environment {
 public:
  explicit Environment(EnvironmentConfig config);

  const EnvironmentConfig& config() const { return config_; }
  const StreamSet& streams() const { return streams_; }
  int num_arms() const { return config_.num_arms(); }
  int num_players() const { return config_.num_players; }
  bool per_player() const { return config_.per_player_means.has_value(); }

  // One independent sample per arm for `round`; out.size() == K.
  void SampleRoundRewards(std::int64_t round, std::span<double> out) const;
  std::vector<double> SampleRoundRewards(std::int64_t round) const;
  // The sample of `arm` at `round`; equal to the corresponding entry of
  // SampleRoundRewards, so callers may sample only the arms that were pulled.
  double SampleArm(int arm, std::int64_t round) const;
  // Per-player games: player j's sample of `arm` at `round`.
  double SamplePlayerArm(int player, int arm, std::int64_t round) const;
  // Per-player games: out[j * K + (i - 1)] is player j's sample of arm i.
  void SamplePerPlayerRewards(std::int64_t round, std::span<double> out) const;

  // Resolves round `round` for `actions`, sampling only the arms that are
  // pulled without collision. Equivalent to SampleRoundRewards (or
  // SamplePerPlayerRewards) followed by ResolveRoundInto.
  void Play(std::int64_t round, std::span<const Arm> actions,
            const std::vector<bool>& has_left, RoundOutcome& out) const;

  // Location of the underlying normal for a truncated-Gaussian arm.
  double truncation_location(int arm) const { return location_[arm - 1]; }
  // Mean actually achieved by the sampler for `arm` (differs from the
  // configured mean only by root-finding tolerance for truncated arms).
  double AchievedMean(int arm) const;

  // Draws one value from `spec` with the given mean using `rng`. Exposed for
  // analysis code that samples the same distributions outside a game.
  static double Sample(const ArmSpec& spec, double mean, double location,
                       RandomStream& rng);

 private:
  EnvironmentConfig config_;
  StreamSet streams_;
  std::vector<double> location_;
};

// Location of Normal(location, sigma) whose restriction to [0, inf) has mean
// `mean`. Requires mean > 0 and sigma > 0.
double TruncatedGaussianLocation(double mean, double sigma);
// Mean of Normal(location, sigma) restricted to [0, inf).
double TruncatedGaussianMean(double location, double sigma);

// (1 - 1/K)^(m - 1): probability that a uniformly random pull does not
// collide when the other m - 1 players also pull uniformly at random.
double NoCollisionProbability(int num_arms, int num_players);

// Resolves one round. `has_left` (optional) marks players that left the game;
// they, and any player when the dummy action is enabled, may play action 0.
// Throws InvalidActionError naming the first offending player.
RoundOutcome ResolveRound(const EnvironmentConfig& config,
                          std::span<const Arm> actions,
                          std::span<const double> rewards,
                          const std::vector<bool>& has_left = {},
                          std::int64_t round = 0);
// Per-player rewards laid out as in SamplePerPlayerRewards.
RoundOutcome ResolveRoundPerPlayer(const EnvironmentConfig& config,
                                   std::span<const Arm> actions,
                                   std::span<const double> rewards,
                                   const std::vector<bool>& has_left = {},
                                   std::int64_t round = 0);

// Allocation-reusing forms of the two functions above, for the round loop.
void ResolveRoundInto(const EnvironmentConfig& config,
                      std::span<const Arm> actions,
                      std::span<const double> rewards,
                      const std::vector<bool>& has_left, std::int64_t round,
                      RoundOutcome& out);
void ResolveRoundPerPlayerInto(const EnvironmentConfig& config,
                               std::span<const Arm> actions,
                               std::span<const double> rewards,
                               const std::vector<bool>& has_left,
                               std::int64_t round, RoundOutcome& out);

}  // namespace mpbandit

#endif  // MPBANDIT_ENV_H_
