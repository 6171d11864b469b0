#ifndef MPBANDIT_EXPERIMENT_H_
#define MPBANDIT_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpbandit/config.h"
#include "mpbandit/engine.h"
#include "mpbandit/env.h"
#include "mpbandit/epoch_player.h"
#include "mpbandit/more_than_k.h"
#include "mpbandit/musical_chairs.h"
#include "mpbandit/player.h"
#include "mpbandit/regret.h"

namespace mpbandit {

enum class AlgorithmKind {
  kLogRegret,         // "alg1"
  kEpoch,             // "alg2"
  kMusicalChairs,     // "musical_chairs"
  kAntiCoordination,  // "anticoord"
  kMoreThanK,         // "more_than_k"
  kEstimateM,         // "estimate_m"
  kUniformRandom,     // "random"
};

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kLogRegret;
  // Wrappers, outermost first, as in "doubling(estimate_m_then(alg1))".
  bool doubling = false;
  bool estimate_m_first = false;

  double c_scale = 1.0;
  EpochVariant variant = EpochVariant::kKnownLowerBound;
  std::optional<double> mu_lower;
  double delta = 0.1;
  double epsilon = 0.2;
  double constant = 128.0;
  CrowdMode mode = CrowdMode::kOriginal;
  ChairsRule rule = ChairsRule::kMc2;
  std::int64_t budget = 0;
  std::vector<Arm> targets;  // empty: every arm
};

// Round-trips with ParseAlgorithmName, e.g. "doubling(alg1)".
std::string AlgorithmName(const AlgorithmSpec& spec);
// Sets kind and wrappers from a name. Throws ConfigError.
void ParseAlgorithmName(const std::string& name, AlgorithmSpec& spec);

struct ExperimentSpec {
  EnvironmentConfig environment;
  AlgorithmSpec algorithm;
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t seed_increment = 1;
  std::optional<RegretMode> regret_mode;  // derived when unset
  std::vector<std::int64_t> checkpoints;  // empty: powers of two up to T
  TraceFidelity fidelity = TraceFidelity::kCheckpoints;
  std::string output_dir = "results";

  std::uint64_t SeedFor(int replication) const {
    return base_seed + static_cast<std::uint64_t>(replication) * seed_increment;
  }
  RegretMode EffectiveRegretMode() const;
  // Rounds per game: the configured horizon, except for the fixed-schedule
  // algorithms (estimate_m, anticoord) which run exactly their schedule.
  std::int64_t GameRounds() const;

  std::vector<std::string> Violations() const;
  void Validate() const;
};

// Reads [environment], [algorithm] and [experiment]. Collects every problem
// into one ConfigError.
ExperimentSpec ExperimentSpecFromConfig(const ConfigDocument& doc);
ExperimentSpec LoadExperimentSpec(const std::string& path);

// Builds the configured algorithm for one player. `audit` (optional) receives
// the epoch instrumentation of Algorithm 2 players.
// `feedback` selects collision-certified variants where the algorithm offers
// them (the leaving strategy for m > K).
std::unique_ptr<Player> MakePlayer(const AlgorithmSpec& spec, int num_arms,
                                   int num_players, std::int64_t horizon,
                                   Feedback feedback, int player_index,
                                   EpochAuditLog* audit = nullptr);
PlayerFactory MakePlayerFactory(const ExperimentSpec& spec,
                                EpochAuditLog* audit = nullptr);

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  std::optional<std::int64_t> fixation_round;
  bool success = false;
  std::vector<RegretCheckpoint> checkpoints;
  std::optional<int> recovered_players;  // estimate_m: player 0's output
  std::optional<double> nash_gain;       // anticoord: worst deviation gain
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

// Sample statistics; quantiles by linear interpolation.
Summary Summarize(std::vector<double> values);

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ReplicationResult> rows;  // ordered by replication
  Summary final_regret;
  double success_rate = 0.0;
  std::vector<RegretCheckpoint> mean_checkpoints;
};

// One game with the given seed. `trace_fidelity` overrides spec.fidelity.
struct ReplicationRun {
  GameTrace trace;
  ReplicationResult result;
};
ReplicationRun RunReplication(const ExperimentSpec& spec, int replication,
                              std::optional<TraceFidelity> trace_fidelity = {});

// Worker count from MPB_WORKERS, else the hardware concurrency.
int DefaultWorkerCount();

// Runs every replication on a pool of `workers` threads (0: default).
ExperimentResult RunExperiment(const ExperimentSpec& spec, int workers = 0);

// results.csv, regret_checkpoints.csv and summary.json under `dir`. Throws
// IoError naming the path on failure.
void WriteExperimentOutputs(const ExperimentResult& result, const std::string& dir);
std::string SummaryJson(const ExperimentResult& result);

}  // namespace mpbandit

#endif  // MPBANDIT_EXPERIMENT_H_
