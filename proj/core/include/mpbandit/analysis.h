#ifndef MPBANDIT_ANALYSIS_H_
#define MPBANDIT_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mpbandit/engine.h"
#include "mpbandit/env.h"
#include "mpbandit/epoch_player.h"

namespace mpbandit {

// ---- Nash verification -----------------------------------------------------

struct NashDeviation {
  int player = 0;
  Arm alternative = kNoArm;
  double improvement = 0.0;
};

struct NashReport {
  std::vector<Arm> assignment;
  std::vector<double> payoffs;  // per player under the assignment
  double epsilon = 0.0;
  bool is_eps_nash = true;
  // Largest gain over all unilateral deviations (including to the dummy
  // action); nullopt only when no deviation exists.
  std::optional<NashDeviation> worst;
};

// Payoff of player j under `assignment` in the anti-coordination game: her own
// mean on an uncollided arm, 0 when collided or on the dummy action.
// means[j][i - 1] is player j's mean on arm i.
std::vector<double> AssignmentPayoffs(const std::vector<Arm>& assignment,
                                      const std::vector<std::vector<double>>& means);

// Checks every unilateral deviation. Moving onto an arm held by another player
// pays 0, as does the dummy action.
NashReport VerifyNash(const std::vector<Arm>& assignment,
                      const std::vector<std::vector<double>>& means,
                      double epsilon);

// ---- Interval-uniqueness lemma --------------------------------------------

struct Lemma4Grid {
  // Each interval's endpoint ratio ranges over p^(width * s), s in [0, 1].
  double width_exponent = 0.4;
  int ratio_steps = 5;     // values of s per interval
  int offset_steps = 5;    // positions of x in [a, b] and of y in [c, d]
  int min_shift = -2;      // range of the integer z with x p^z = y
  int max_shift = 2;
  std::vector<double> anchors = {0.3, 1.0, 2.5, 7.5};  // values of x
};

struct Lemma4Point {
  double a, b, c, d;
  int hits;
};

struct Lemma4Report {
  double p = 0.0;
  std::int64_t points = 0;
  std::int64_t unique = 0;
  std::int64_t none = 0;
  std::int64_t multiple = 0;
  std::vector<Lemma4Point> counterexamples;  // first few non-unique points
  bool passed() const { return points > 0 && unique == points; }
};

// Number of integers n with [a p^n, b p^n] meeting [c, d], for p > 1.
int CountScaledIntersections(double a, double b, double c, double d, double p);

Lemma4Report VerifyLemma4Grid(double p, const Lemma4Grid& grid = {});

// ---- Positive-probability lemma --------------------------------------------

// min{|mu / (sigma ln(sigma / mu))|, 1} / 99, with the first argument taken
// as +infinity when mu == sigma.
double Lemma5Bound(double mu, double sigma);

struct Lemma5Report {
  double mu = 0.0;
  double sigma = 0.0;
  std::int64_t samples = 0;
  double empirical = 0.0;  // fraction of samples > 0
  double slack = 0.0;      // 3 binomial standard errors at the bound
  double bound = 0.0;
  bool passed = false;
};

// Samples `spec` (its mean and sigma define the bound) and checks
// empirical + slack >= bound. Throws InsufficientDataError below 10^5
// samples.
Lemma5Report CheckLemma5Bound(const ArmSpec& spec, std::int64_t samples,
                              std::uint64_t seed);

// ---- Regret growth ---------------------------------------------------------

enum class GrowthClass { kLogarithmic, kSqrt, kLinear, kUnclassified };

std::string_view ToString(GrowthClass growth);

struct TrendReport {
  std::vector<RegretCheckpoint> checkpoints;
  std::vector<double> ratios;  // regret(t_{i+1}) / regret(t_i)
  GrowthClass growth = GrowthClass::kUnclassified;
  double tolerance = 0.15;
  int window = 3;
};

// Classifies by the last `window` ratios: all within tolerance of 1, sqrt(2)
// or 2. Intended for checkpoints spaced by factors of 2. Throws
// InsufficientDataError with fewer than 4 checkpoints.
TrendReport FitRegretTrend(const std::vector<RegretCheckpoint>& checkpoints,
                           double tolerance = 0.15, int window = 3);

// ---- Epoch classification audit -------------------------------------------

struct ClassificationFlag {
  int player;
  int epoch;
  Arm arm;
  ArmClass cls;
};

struct ConfidenceViolation {
  int player;
  int epoch;
  Arm arm;
  double estimate;
  double halfwidth;
};

struct ChairsFailure {
  int player;
  int epoch;
  EpochAuditLog::Step step;
  std::int64_t start_round;
};

struct AuditReport {
  std::vector<ClassificationFlag> flags;
  std::vector<ConfidenceViolation> confidence_violations;
  std::vector<ChairsFailure> chairs_failures;

  bool bad_event() const {
    return !confidence_violations.empty() || !chairs_failures.empty();
  }
};

// Flags every snapshot that puts an arm with mean > mu_(m+1) into B, or an arm
// with mean < mu_(m) into G. A bad event is an estimate outside its interval,
// or a chairs block that ended empty-handed while some target arm with mean
// >= chairs_threshold was held by nobody else.
AuditReport AuditClassification(const EpochAuditLog& log,
                                const EnvironmentConfig& config,
                                double chairs_threshold);

}  // namespace mpbandit

#endif  // MPBANDIT_ANALYSIS_H_
