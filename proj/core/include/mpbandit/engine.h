#ifndef MPBANDIT_ENGINE_H_
#define MPBANDIT_ENGINE_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpbandit/env.h"
#include "mpbandit/player.h"
#include "mpbandit/regret.h"

namespace mpbandit {

enum class TraceFidelity {
  kFull,        // every round recorded
  kCheckpoints  // cumulative regret at checkpoint rounds only
};

struct GameOptions {
  TraceFidelity fidelity = TraceFidelity::kFull;
  RegretMode regret_mode = RegretMode::kTopM;
  // Rounds at which cumulative regret is recorded. Values outside [1, T] are
  // ignored. Empty selects DefaultCheckpoints(T).
  std::vector<std::int64_t> checkpoints;
  // Rounds to play; 0 plays the configured horizon.
  std::int64_t rounds = 0;
};

// {2^10, 2^11, ...} up to T, followed by T itself.
std::vector<std::int64_t> DefaultCheckpoints(std::int64_t horizon);

struct RoundRecord {
  std::int64_t t = 0;
  std::vector<Arm> actions;
  std::vector<double> rewards;
  std::vector<bool> collisions;  // per arm
  std::vector<std::string> phases;

  bool operator==(const RoundRecord&) const = default;
};

struct RegretCheckpoint {
  std::int64_t t = 0;
  double cumulative_regret = 0.0;
};

struct GameTrace {
  EnvironmentConfig config;
  RegretMode regret_mode = RegretMode::kTopM;
  std::int64_t rounds_played = 0;
  std::vector<RoundRecord> records;  // kFull only
  std::vector<RegretCheckpoint> checkpoints;
  double final_regret = 0.0;
  // Every round after this one had zero incremental regret. 0 when regret was
  // zero throughout.
  std::int64_t last_regret_round = 0;
  std::vector<Arm> final_actions;
  std::vector<bool> final_has_left;
  std::vector<std::string> final_phases;

  std::uint64_t master_seed() const { return config.master_seed; }
  // last_regret_round, or nullopt when the final round still had regret.
  std::optional<std::int64_t> FixationRound() const;
};

// Plays the game in lockstep: collect all actions, sample rewards, resolve
// collisions, then dispatch each player's observation. Throws
// InvalidActionError (with player and round) on an illegal action.
GameTrace RunGame(const Environment& env,
                  std::vector<std::unique_ptr<Player>>& players,
                  const GameOptions& options = {});
GameTrace RunGame(const Environment& env, const PlayerFactory& factory,
                  const GameOptions& options = {});

// Regret recomputed from a full trace.
RegretLedger ComputeRegret(const GameTrace& trace, RegretMode mode);

// CSV with columns t,player,action,reward,collided,phase (one row per player
// per round). Rewards are written with round-trip precision.
void WriteTraceCsv(const GameTrace& trace, std::ostream& out);
// CSV with columns t,cumulative_regret.
void WriteCheckpointCsv(const GameTrace& trace, std::ostream& out);
// Parses WriteTraceCsv output. Throws IoError on malformed input.
std::vector<RoundRecord> ReadTraceCsv(std::istream& in, int num_arms);

struct TraceDiff {
  bool identical = true;
  std::optional<std::int64_t> first_divergent_round;
  std::string detail;
};
TraceDiff DiffTraces(const std::vector<RoundRecord>& expected,
                     const std::vector<RoundRecord>& actual);

}  // namespace mpbandit

#endif  // MPBANDIT_ENGINE_H_
