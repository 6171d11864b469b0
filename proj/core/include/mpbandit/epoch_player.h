#ifndef MPBANDIT_EPOCH_PLAYER_H_
#define MPBANDIT_EPOCH_PLAYER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mpbandit/musical_chairs.h"
#include "mpbandit/player.h"

namespace mpbandit {

enum class EpochVariant {
  kKnownLowerBound,   // (a) players know a lower bound on mu_(m)
  kCollisionSensing,  // (b) collision feedback; musical chairs certified by it
  kLeaving,           // (c) players may leave the game
};

struct EpochParams {
  int num_arms = 2;
  int num_players = 2;
  std::int64_t horizon = 1;
  EpochVariant variant = EpochVariant::kKnownLowerBound;
  // Known lower bound on mu_(m). Unused by kCollisionSensing.
  double mu_lower = 0.0;
  double c_scale = 1.0;
};

// g = c_scale * ln(4 m^3 T^2 K) / 2.
double EpochConfidenceConstant(const EpochParams& params);
// alpha = ceil(c_scale * 4 K ln(6 K m^2 T) / mu) for (a)/(c); the division by
// mu is dropped for (b). At least one round.
std::int64_t EpochChairsBudget(const EpochParams& params);
// Rounds in epoch `epoch`: alpha + (K + m - 1)(2 alpha + 2^epoch).
std::int64_t EpochLength(const EpochParams& params, int epoch);

enum class ArmClass : std::uint8_t { kSilver, kGolden, kBad };

// One player's view of the arms. Vectors are indexed by arm - 1.
struct ArmBook {
  explicit ArmBook(int num_arms);

  std::vector<ArmClass> cls;
  std::vector<double> estimate;
  // Half-width of the arm's confidence interval from its latest estimation
  // block; +infinity before the first one.
  std::vector<double> halfwidth;
  // Explored in the current epoch (the set E).
  std::vector<bool> explored;

  int num_arms() const { return static_cast<int>(cls.size()); }
  int Count(ArmClass c) const;
  std::vector<Arm> Members(ArmClass c) const;
  // Silver arms not yet explored this epoch (S \ E).
  std::vector<Arm> UnexploredSilver() const;
};

// End-of-epoch rule for S \ E: golden when estimate - halfwidth > threshold,
// bad otherwise. The threshold is mu_lower for (a)/(c) and 0 for (b).
void ClassifyUnexplored(ArmBook& book, double threshold);

// End-of-epoch interval rules, each evaluated against the G/B/S snapshot
// taken before any arm moves:
//   bad    if at least m - |G| silver arms have lower bound > this upper bound;
//   golden if (mu_lower given) estimate > mu_lower + 3h, and at least
//          K - m - |B| silver arms have upper bound < this lower bound.
// `halfwidth` is the common half-width h of the epoch.
void UpdateClassifications(ArmBook& book, int num_players, double halfwidth,
                           std::optional<double> mu_lower);

// Instrumentation for auditing classification soundness. Players append to it
// but never read it.
struct EpochAuditLog {
  enum class Step : std::uint8_t { kGolden, kExplore, kSecure };

  struct Snapshot {
    int player;
    int epoch;
    std::int64_t round;  // last round of the epoch
    std::vector<ArmClass> classes;
  };
  struct EstimateUpdate {
    int player;
    int epoch;
    Arm arm;
    double estimate;
    double halfwidth;
  };
  // One musical-chairs block (alpha rounds) of one player.
  struct Block {
    int player;
    int epoch;
    Step step;
    std::int64_t start_round;
    bool ran_chairs;
    std::vector<Arm> targets;
    Arm held;  // arm held at block end, or kNoArm
  };
  struct GoldenClaim {
    int player;
    int epoch;
    std::int64_t start_round;  // start of the golden block that won it
    Arm arm;
  };

  std::vector<Snapshot> snapshots;
  std::vector<EstimateUpdate> estimates;
  std::vector<Block> blocks;
  std::vector<GoldenClaim> golden_claims;
};

// Synchronized epoch-based player. Every epoch i runs, in lockstep across
// players:
//   1. musical chairs on the golden set for alpha rounds (pull it forever on
//      success);
//   2. K + m - 1 iterations of
//        alpha rounds: chairs on unexplored silver arms (or uniform pulls when
//                      all silver arms are explored),
//        alpha rounds: chairs on all silver arms unless already holding one,
//        2^i rounds:   estimate the held arm;
//   3. classification of the arms into golden / bad / silver.
class EpochPlayer : public Player {
 public:
  enum class Segment { kGolden, kExplore, kSecure, kEstimate };

  EpochPlayer(const EpochParams& params, int player_index = 0,
              EpochAuditLog* audit = nullptr);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;
  bool HasLeft() const override { return left_; }

  const EpochParams& params() const { return params_; }
  double confidence_constant() const { return g_; }
  std::int64_t chairs_budget() const { return alpha_; }
  int epoch() const { return epoch_; }
  int iteration() const { return iteration_; }
  Segment segment() const { return segment_; }
  std::int64_t segment_remaining() const { return remaining_; }
  const ArmBook& book() const { return book_; }
  Arm golden_arm() const { return golden_; }
  Arm held_arm() const { return held_; }
  ChairsRule chairs_rule() const { return rule_; }

 private:
  void BeginEpoch();
  void BeginExplore();
  void BeginSecure();
  void BeginEstimate();
  void EndEpoch();
  void Advance();
  void LogBlock(EpochAuditLog::Step step, bool ran_chairs,
                std::vector<Arm> targets);

  EpochParams params_;
  int player_index_;
  EpochAuditLog* audit_;
  double g_;
  std::int64_t alpha_;
  ChairsRule rule_;
  ArmBook book_;

  int epoch_ = 0;
  int iteration_ = 0;
  Segment segment_ = Segment::kGolden;
  std::int64_t remaining_ = 0;
  std::int64_t segment_start_ = 1;
  std::int64_t rounds_seen_ = 0;
  std::optional<MusicalChairs> chairs_;
  Arm held_ = kNoArm;
  double estimate_sum_ = 0.0;
  Arm golden_ = kNoArm;
  bool left_ = false;
};

}  // namespace mpbandit

#endif  // MPBANDIT_EPOCH_PLAYER_H_
