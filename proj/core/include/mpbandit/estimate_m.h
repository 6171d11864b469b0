#ifndef MPBANDIT_ESTIMATE_M_H_
#define MPBANDIT_ESTIMATE_M_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpbandit/player.h"

namespace mpbandit {

struct EstimateMParams {
  int num_arms = 2;
  // Known lower bound on the best arm's mean.
  double mu_lower = 0.5;
  double delta = 0.1;
};

// Fixed round schedule shared by all players.
struct EstimateMSchedule {
  double epsilon;                   // mu ((1 - 1/K)^(-2/5) - 1) / 48
  std::int64_t sigma_rounds;        // ceil(8 K ln(K^2 / (9 delta)) / eps^2)
  std::int64_t block_length;        // ceil(ln(6 / delta) / eps^2)
  std::int64_t probe_iterations;    // ceil(4 K ln(6K / (mu delta)))
  std::int64_t total_rounds;        // sigma_rounds + probes * block_length
};

EstimateMSchedule ComputeEstimateMSchedule(const EstimateMParams& params);

struct RecoveryScan {
  std::vector<int> candidates;  // every m whose interval meets the target
  int m_max = 0;                // last m scanned
};

// Scans m = 1..m_max, where m_max is the first m with
// (mu_hat + eps) q^(m-1) < sigma - eps and q = 1 - 1/K, and collects the m
// for which [(mu_hat - eps) q^(m-1), (mu_hat + eps) q^(m-1)] meets
// [sigma - eps, sigma + eps]. Requires mu_hat - eps > 0 and sigma - eps > 0.
RecoveryScan ScanPlayerCount(double mu_hat, double sigma, double epsilon,
                             int num_arms);
// The unique candidate. Throws NoCandidateError or AmbiguityError.
int RecoverPlayerCount(double mu_hat, double sigma, double epsilon,
                       int num_arms);

// Player that learns the number of players. Runs exactly total_rounds rounds:
//   sigma  - uniform pulls; uncorrected per-arm averages sigma_j;
//   probe  - per block, pick a uniform arm and pull it block_length times; a
//            block on arm l = argmax sigma with positive average yields m.
// After success the player keeps probing random blocks (without updating) so
// that block boundaries stay aligned for everyone else.
class EstimateMPlayer : public Player {
 public:
  enum class Stage { kSigma, kProbe, kDone, kFinished };

  explicit EstimateMPlayer(const EstimateMParams& params);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;

  const EstimateMSchedule& schedule() const { return schedule_; }
  Stage stage() const { return stage_; }
  // True once every scheduled round has been played.
  bool finished() const { return rounds_ >= schedule_.total_rounds; }
  std::int64_t rounds_played() const { return rounds_; }
  const std::vector<double>& sigma() const { return sigma_; }
  Arm best_arm() const { return best_; }
  std::optional<double> block_mean() const { return block_mean_; }
  // Recovered m, or nullopt while unknown.
  std::optional<int> recovered() const { return m_out_; }
  // Recovered m. Throws EstimationFailedError if the schedule ran out (or the
  // interval scan failed) without a recovery.
  int Result() const;

 private:
  void EndBlock();

  EstimateMParams params_;
  EstimateMSchedule schedule_;
  Stage stage_ = Stage::kSigma;
  std::int64_t rounds_ = 0;
  std::vector<double> sums_;
  std::vector<std::int64_t> pulls_;
  std::vector<double> sigma_;
  Arm best_ = kNoArm;
  Arm block_arm_ = kNoArm;
  std::int64_t block_pos_ = 0;
  std::int64_t probes_done_ = 0;
  double block_sum_ = 0.0;
  std::optional<double> block_mean_;
  std::optional<int> m_out_;
  std::optional<std::string> failure_;
};

// Builds the downstream player once m is known; `horizon` is what is left of
// the game after estimation.
using KnownMFactory =
    std::function<std::unique_ptr<Player>(int num_players, std::int64_t horizon)>;

// Estimation followed by a known-m algorithm. When estimation fails the
// downstream player is built with m = K.
class EstimateThenPlayer : public Player {
 public:
  EstimateThenPlayer(const EstimateMParams& params, std::int64_t horizon,
                     KnownMFactory then);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override;
  bool HasLeft() const override { return inner_ && inner_->HasLeft(); }

  const EstimateMPlayer& estimator() const { return estimator_; }
  // m handed to the downstream player, once built.
  std::optional<int> assumed_players() const { return assumed_; }
  const Player* inner() const { return inner_.get(); }

 private:
  EstimateMPlayer estimator_;
  std::int64_t horizon_;
  KnownMFactory then_;
  std::unique_ptr<Player> inner_;
  std::optional<int> assumed_;
};

}  // namespace mpbandit

#endif  // MPBANDIT_ESTIMATE_M_H_
