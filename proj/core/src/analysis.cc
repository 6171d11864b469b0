#include "mpbandit/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "mpbandit/errors.h"
#include "mpbandit/random.h"

namespace mpbandit {

std::vector<double> AssignmentPayoffs(const std::vector<Arm>& assignment,
                                      const std::vector<std::vector<double>>& means) {
  const int m = static_cast<int>(assignment.size());
  std::vector<double> out(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const Arm a = assignment[j];
    if (a == kNoArm) continue;
    const bool shared =
        std::count(assignment.begin(), assignment.end(), a) > 1;
    if (!shared) out[j] = means[j][a - 1];
  }
  return out;
}

NashReport VerifyNash(const std::vector<Arm>& assignment,
                      const std::vector<std::vector<double>>& means,
                      double epsilon) {
  const int m = static_cast<int>(assignment.size());
  if (static_cast<int>(means.size()) != m) {
    throw ContractViolation("verify_nash: need one row of means per player");
  }
  const int k = m == 0 ? 0 : static_cast<int>(means.front().size());
  for (const Arm a : assignment) {
    if (a < 0 || a > k) throw ContractViolation("verify_nash: action out of range");
  }
  NashReport report;
  report.assignment = assignment;
  report.epsilon = epsilon;
  report.payoffs = AssignmentPayoffs(assignment, means);
  for (int j = 0; j < m; ++j) {
    for (Arm alt = 0; alt <= k; ++alt) {
      if (alt == assignment[j]) continue;
      double payoff = 0.0;
      if (alt != kNoArm) {
        bool taken = false;
        for (int l = 0; l < m; ++l) taken |= (l != j && assignment[l] == alt);
        if (!taken) payoff = means[j][alt - 1];
      }
      const double gain = payoff - report.payoffs[j];
      if (!report.worst || gain > report.worst->improvement) {
        report.worst = NashDeviation{j, alt, gain};
      }
    }
  }
  report.is_eps_nash = !report.worst || report.worst->improvement <= epsilon;
  return report;
}

int CountScaledIntersections(double a, double b, double c, double d, double p) {
  if (!(p > 1.0) || !(a > 0.0) || !(c > 0.0) || b < a || d < c) {
    throw ContractViolation("interval scan needs p > 1 and positive ordered intervals");
  }
  // Relative slack absorbs rounding in endpoints built from the same point.
  constexpr double kTol = 1e-12;
  const double lp = std::log(p);
  const int lo = static_cast<int>(std::floor(std::log(c / b) / lp)) - 2;
  const int hi = static_cast<int>(std::ceil(std::log(d / a) / lp)) + 2;
  int hits = 0;
  for (int n = lo; n <= hi; ++n) {
    const double s = std::pow(p, n);
    if (a * s <= d * (1.0 + kTol) && b * s >= c * (1.0 - kTol)) ++hits;
  }
  return hits;
}

Lemma4Report VerifyLemma4Grid(double p, const Lemma4Grid& grid) {
  if (!(p > 1.0)) throw ContractViolation("lemma 4 grid needs p > 1");
  auto frac = [](int i, int steps) {
    return steps <= 1 ? 1.0 : static_cast<double>(i) / (steps - 1);
  };
  Lemma4Report report;
  report.p = p;
  for (const double x : grid.anchors) {
    for (int z = grid.min_shift; z <= grid.max_shift; ++z) {
      const double y = x * std::pow(p, z);
      for (int s1 = 0; s1 < grid.ratio_steps; ++s1) {
        const double r1 = std::pow(p, grid.width_exponent * frac(s1, grid.ratio_steps));
        for (int s2 = 0; s2 < grid.ratio_steps; ++s2) {
          const double r2 =
              std::pow(p, grid.width_exponent * frac(s2, grid.ratio_steps));
          for (int f1 = 0; f1 < grid.offset_steps; ++f1) {
            const double a = x / std::pow(r1, frac(f1, grid.offset_steps));
            const double b = a * r1;
            for (int f2 = 0; f2 < grid.offset_steps; ++f2) {
              const double c = y / std::pow(r2, frac(f2, grid.offset_steps));
              const double d = c * r2;
              const int hits = CountScaledIntersections(a, b, c, d, p);
              ++report.points;
              if (hits == 1) {
                ++report.unique;
                continue;
              }
              ++(hits == 0 ? report.none : report.multiple);
              if (report.counterexamples.size() < 16) {
                report.counterexamples.push_back({a, b, c, d, hits});
              }
            }
          }
        }
      }
    }
  }
  return report;
}

double Lemma5Bound(double mu, double sigma) {
  if (!(mu > 0.0) || !(sigma > 0.0)) {
    throw ContractViolation("lemma 5 bound needs mu > 0 and sigma > 0");
  }
  const double log_ratio = std::log(sigma / mu);
  const double first = log_ratio == 0.0 ? std::numeric_limits<double>::infinity()
                                        : std::abs(mu / (sigma * log_ratio));
  return std::min(first, 1.0) / 99.0;
}

Lemma5Report CheckLemma5Bound(const ArmSpec& spec, std::int64_t samples,
                              std::uint64_t seed) {
  if (samples < 100000) {
    throw InsufficientDataError("lemma 5 check needs at least 1e5 samples");
  }
  Lemma5Report r;
  r.mu = spec.mean;
  r.sigma = spec.sigma;
  r.samples = samples;
  r.bound = Lemma5Bound(spec.mean, spec.sigma);
  const double location =
      spec.distribution == RewardDistribution::kTruncatedGaussian
          ? TruncatedGaussianLocation(spec.mean, spec.sigma)
          : 0.0;
  RandomStream rng(DeriveStreamKey(seed, StreamKind::kEngine, 5), 0);
  std::int64_t positive = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    if (Environment::Sample(spec, spec.mean, location, rng) > 0.0) ++positive;
  }
  r.empirical = static_cast<double>(positive) / static_cast<double>(samples);
  r.slack = 3.0 * std::sqrt(r.bound * (1.0 - r.bound) / static_cast<double>(samples));
  r.passed = r.empirical + r.slack >= r.bound;
  return r;
}

std::string_view ToString(GrowthClass growth) {
  switch (growth) {
    case GrowthClass::kLogarithmic:
      return "logarithmic";
    case GrowthClass::kSqrt:
      return "sqrt";
    case GrowthClass::kLinear:
      return "linear";
    case GrowthClass::kUnclassified:
      return "unclassified";
  }
  return "?";
}

TrendReport FitRegretTrend(const std::vector<RegretCheckpoint>& checkpoints,
                           double tolerance, int window) {
  if (checkpoints.size() < 4) {
    throw InsufficientDataError("trend fit needs at least 4 checkpoints, got " +
                                std::to_string(checkpoints.size()));
  }
  if (window < 1 || window > static_cast<int>(checkpoints.size()) - 1) {
    throw ContractViolation("trend window out of range");
  }
  TrendReport report;
  report.checkpoints = checkpoints;
  report.tolerance = tolerance;
  report.window = window;
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    const double prev = checkpoints[i - 1].cumulative_regret;
    const double cur = checkpoints[i].cumulative_regret;
    double ratio;
    if (prev > 0.0) {
      ratio = cur / prev;
    } else {
      ratio = cur > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    report.ratios.push_back(ratio);
  }
  const auto tail_within = [&](double target) {
    return std::all_of(report.ratios.end() - window, report.ratios.end(),
                       [&](double r) { return std::abs(r - target) <= tolerance; });
  };
  if (tail_within(1.0)) {
    report.growth = GrowthClass::kLogarithmic;
  } else if (tail_within(std::sqrt(2.0))) {
    report.growth = GrowthClass::kSqrt;
  } else if (tail_within(2.0)) {
    report.growth = GrowthClass::kLinear;
  }
  return report;
}

AuditReport AuditClassification(const EpochAuditLog& log,
                                const EnvironmentConfig& config,
                                double chairs_threshold) {
  AuditReport report;
  const auto sorted = config.SortedMeans();
  const int m = config.num_players;
  const int k = config.num_arms();
  const double mu_m = sorted[std::min(m, k) - 1];
  const double mu_next =
      m < k ? sorted[m] : -std::numeric_limits<double>::infinity();
  const auto mean = [&](Arm a) { return config.arms[a - 1].mean; };

  for (const auto& snap : log.snapshots) {
    for (int i = 0; i < static_cast<int>(snap.classes.size()); ++i) {
      const Arm a = i + 1;
      const ArmClass c = snap.classes[i];
      if ((c == ArmClass::kBad && mean(a) > mu_next) ||
          (c == ArmClass::kGolden && mean(a) < mu_m)) {
        report.flags.push_back({snap.player, snap.epoch, a, c});
      }
    }
  }

  for (const auto& e : log.estimates) {
    if (std::abs(e.estimate - mean(e.arm)) > e.halfwidth) {
      report.confidence_violations.push_back(
          {e.player, e.epoch, e.arm, e.estimate, e.halfwidth});
    }
  }

  // Arms held at the end of each block, by player.
  std::map<std::int64_t, std::vector<std::pair<int, Arm>>> held_at;
  for (const auto& b : log.blocks) {
    if (b.held != kNoArm) held_at[b.start_round].push_back({b.player, b.held});
  }
  for (const auto& b : log.blocks) {
    if (!b.ran_chairs || b.held != kNoArm) continue;
    std::set<Arm> taken;
    if (auto it = held_at.find(b.start_round); it != held_at.end()) {
      for (const auto& [player, arm] : it->second) {
        if (player != b.player) taken.insert(arm);
      }
    }
    for (const auto& g : log.golden_claims) {
      if (g.player != b.player && g.start_round <= b.start_round) taken.insert(g.arm);
    }
    const bool free_good_arm = std::any_of(
        b.targets.begin(), b.targets.end(),
        [&](Arm a) { return mean(a) >= chairs_threshold && !taken.count(a); });
    if (free_good_arm) {
      report.chairs_failures.push_back({b.player, b.epoch, b.step, b.start_round});
    }
  }
  return report;
}

}  // namespace mpbandit
