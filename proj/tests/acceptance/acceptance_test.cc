// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Set MPB_ACCEPTANCE_ONLY=3,7 to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "mpbandit/analysis.h"
#include "mpbandit/anticoordination.h"
#include "mpbandit/config.h"
#include "mpbandit/engine.h"
#include "mpbandit/estimate_m.h"
#include "mpbandit/experiment.h"
#include "mpbandit/log_regret_player.h"
#include "support/chairs_sim.h"
#include "support/regret_oracle.h"

namespace mpbandit {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

ExperimentSpec Spec(const std::string& toml) {
  return ExperimentSpecFromConfig(ConfigDocument::Parse(toml));
}

struct Game {
  GameTrace trace;
  std::vector<std::unique_ptr<Player>> players;  // final player states
};

Game PlayKeep(const ExperimentSpec& spec, int replication,
              const PlayerFactory& factory, GameOptions options = {}) {
  EnvironmentConfig config = spec.environment;
  config.master_seed = spec.SeedFor(replication);
  const Environment env(config);
  options.regret_mode = spec.EffectiveRegretMode();
  if (options.rounds == 0) options.rounds = spec.GameRounds();
  Game game;
  for (int j = 0; j < config.num_players; ++j) game.players.push_back(factory(j));
  game.trace = RunGame(env, game.players, options);
  return game;
}

GameTrace Play(const ExperimentSpec& spec, int replication,
               const PlayerFactory& factory, GameOptions options = {}) {
  return PlayKeep(spec, replication, factory, std::move(options)).trace;
}

GameOptions Light(std::vector<std::int64_t> checkpoints = {}) {
  GameOptions o;
  o.fidelity = TraceFidelity::kCheckpoints;
  o.checkpoints = std::move(checkpoints);
  return o;
}

// ---- 1 ----------------------------------------------------------------------

Outcome ChairsExclusivity() {
  const std::vector<double> means = {0.5, 0.9, 0.6, 0.75, 0.55};
  int shared = 0;
  int occupied = 0;
  for (ChairsRule rule : {ChairsRule::kMc1, ChairsRule::kMc2, ChairsRule::kMc3}) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto held = testing::PlayChairs(rule, means, 3, 0, 200, seed);
      std::set<Arm> distinct;
      for (Arm a : held) {
        if (a == kNoArm) continue;
        ++occupied;
        if (!distinct.insert(a).second) ++shared;
      }
    }
  }
  return {shared == 0,
          Format("3 x 1000 runs, %d occupations, %d shared arms", occupied, shared)};
}

// ---- 2 ----------------------------------------------------------------------

Outcome ChairsFailureBound() {
  const int k = 4, m = 3, reps = 10000;
  const double mu = 0.5;
  bool pass = true;
  std::string detail;
  for (std::int64_t alpha : {50, 100, 200}) {
    int failures = 0;
    for (int r = 0; r < reps; ++r) {
      const auto held = testing::PlayChairs(ChairsRule::kMc2, std::vector<double>(k, mu),
                                            1, m - 1, alpha, 7000000 + alpha * reps + r);
      failures += held[0] == kNoArm;
    }
    const double bound = std::exp(-alpha * mu / (4.0 * k));
    const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / reps);
    const double rate = static_cast<double>(failures) / reps;
    pass = pass && rate <= limit;
    detail += Format("alpha=%lld rate %.4f <= %.4f; ", static_cast<long long>(alpha),
                     rate, limit);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ---- 3 ----------------------------------------------------------------------

Outcome EstimatorUnbiased() {
  // With c_scale = 1 the stopping rule needs ~1e8 rounds, so the players
  // explore for the whole game.
  const auto spec = Spec(R"(
[environment]
num_players = 2
horizon = 100000
means = [0.9, 0.6, 0.3]
[algorithm]
name = "alg1"
c_scale = 1.0
[experiment]
base_seed = 3000
)");
  const int k = 3, m = 2;
  const double p = NoCollisionProbability(k, m);
  int good_seeds = 0;
  for (int r = 0; r < 100; ++r) {
    auto factory = [&](int) {
      return std::make_unique<LogRegretPlayer>(
          LogRegretParams{k, m, spec.environment.horizon, 1.0});
    };
    const Game game = PlayKeep(spec, r, factory, Light());
    bool ok = true;
    for (const auto& owned : game.players) {
      const auto* player = static_cast<const LogRegretPlayer*>(owned.get());
      ok = ok && player->stage() == LogRegretPlayer::Stage::kExplore;
      for (Arm i = 1; i <= k; ++i) {
        const double mu = spec.environment.arms[i - 1].mean;
        const double n = static_cast<double>(player->pulls(i));
        const double se = std::sqrt(mu * p * (1.0 - mu * p) / n) / p;
        ok = ok && std::abs(player->Estimate(i) - mu) <= 3.0 * se;
      }
    }
    good_seeds += ok;
  }
  return {good_seeds >= 95, Format("%d/100 seeds within 3 SE (need 95)", good_seeds)};
}

// ---- 4 / 5 ------------------------------------------------------------------

const char* kAlg1Instance = R"(
[environment]
num_players = 2
horizon = %lld
means = [0.9, 0.8, 0.3, 0.2]
[algorithm]
name = "alg1"
c_scale = 0.01
[experiment]
base_seed = %lld
)";

// Remembers the round in which the wrapped player entered "exploit".
class ExploitWatch : public Player {
 public:
  explicit ExploitWatch(std::unique_ptr<Player> inner) : inner_(std::move(inner)) {}
  Arm ChooseAction(RandomStream& rng) override { return inner_->ChooseAction(rng); }
  void Observe(const Observation& o) override {
    inner_->Observe(o);
    ++t_;
    if (entered_ == 0 && inner_->Phase() == "exploit") entered_ = t_;
  }
  std::string_view Phase() const override { return inner_->Phase(); }
  std::int64_t entered() const { return entered_; }

 private:
  std::unique_ptr<Player> inner_;
  std::int64_t t_ = 0;
  std::int64_t entered_ = 0;
};

Outcome Alg1EndToEnd() {
  const auto spec = Spec(Format(kAlg1Instance, 200000LL, 4000LL));
  const PlayerFactory inner = MakePlayerFactory(spec);
  int good = 0;
  std::int64_t latest = 0;
  for (int r = 0; r < 100; ++r) {
    auto factory = [&](int j) { return std::make_unique<ExploitWatch>(inner(j)); };
    const Game game = PlayKeep(spec, r, factory, Light());
    const GameTrace& trace = game.trace;
    std::int64_t all_in = 0;
    bool ok = true;
    for (const auto& p : game.players) {
      const auto* w = static_cast<const ExploitWatch*>(p.get());
      ok = ok && w->entered() > 0;
      all_in = std::max(all_in, w->entered());
    }
    const std::set<Arm> held(trace.final_actions.begin(), trace.final_actions.end());
    ok = ok && held == std::set<Arm>{1, 2} && trace.last_regret_round <= all_in;
    if (ok) latest = std::max(latest, all_in);
    good += ok;
  }
  return {good >= 95,
          Format("%d/100 runs fixated on {1,2} with zero regret afterwards (need 95); "
                 "latest fixation round %lld",
                 good, static_cast<long long>(latest))};
}

Outcome Alg1Trend() {
  const std::int64_t horizon = std::int64_t{1} << 19;
  const auto spec = Spec(Format(kAlg1Instance, static_cast<long long>(horizon), 5000LL));
  std::vector<std::int64_t> ts;
  for (int e = 14; e <= 19; ++e) ts.push_back(std::int64_t{1} << e);
  const PlayerFactory factory = MakePlayerFactory(spec);
  const int seeds = 50;
  std::vector<double> mean(ts.size(), 0.0);
  std::int64_t fixation = 0;
  int never = 0;
  for (int r = 0; r < seeds; ++r) {
    const auto trace = Play(spec, r, factory, Light(ts));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      mean[i] += trace.checkpoints[i].cumulative_regret / seeds;
    }
    if (const auto f = trace.FixationRound()) {
      fixation = std::max(fixation, *f);
    } else {
      ++never;
    }
  }
  std::vector<RegretCheckpoint> curve;
  for (std::size_t i = 0; i < ts.size(); ++i) curve.push_back({ts[i], mean[i]});
  // Ratios whose later checkpoint lies beyond every run's fixation round.
  int window = 0;
  for (std::size_t i = 1; i < ts.size(); ++i) window += ts[i] > fixation;
  std::string ratios;
  const TrendReport full = FitRegretTrend(curve);
  for (double x : full.ratios) ratios += Format("%.3f ", x);
  ratios.pop_back();
  if (never > 0 || window == 0) {
    return {false, Format("%d runs never fixated; ratios %s", never, ratios.c_str())};
  }
  const TrendReport post = FitRegretTrend(curve, 0.15, window);
  return {post.growth == GrowthClass::kLogarithmic,
          Format("ratios %s; last fixation round %lld, %d post-fixation ratio(s): %s",
                 ratios.c_str(), static_cast<long long>(fixation), window,
                 std::string(ToString(post.growth)).c_str())};
}

// ---- 6 ----------------------------------------------------------------------

Outcome Alg2Audit() {
  const auto spec = Spec(R"(
[environment]
num_players = 2
horizon = 1000000
means = [0.9, 0.7, 0.5, 0.45]
[algorithm]
name = "alg2"
variant = "a"
mu_lower = 0.4
c_scale = 0.05
[experiment]
base_seed = 6000
)");
  int flagged_clean = 0;
  int bad_runs = 0;
  int flagged = 0;
  for (int r = 0; r < 100; ++r) {
    EpochAuditLog log;
    Play(spec, r, MakePlayerFactory(spec, &log), Light());
    const AuditReport report = AuditClassification(log, spec.environment, 0.4);
    flagged += !report.flags.empty();
    bad_runs += report.bad_event();
    flagged_clean += !report.flags.empty() && !report.bad_event();
  }
  return {flagged_clean == 0 && bad_runs <= 5,
          Format("%d flagged runs without a bad event (need 0); %d runs with bad "
                 "events (need <= 5); %d flagged runs",
                 flagged_clean, bad_runs, flagged)};
}

// ---- 7 ----------------------------------------------------------------------

Outcome Alg2ZeroGap() {
  const std::int64_t t0 = std::int64_t{1} << 18;
  const char* text = R"(
[environment]
num_players = 2
horizon = %lld
means = [0.6, 0.6, 0.6]
feedback = "reward_and_collision"
[algorithm]
name = "alg2"
variant = "b"
c_scale = 0.05
[experiment]
base_seed = 7000
)";
  double regret[2] = {0.0, 0.0};
  for (int h = 0; h < 2; ++h) {
    const auto spec = Spec(Format(text, static_cast<long long>(t0 << h)));
    const PlayerFactory factory = MakePlayerFactory(spec);
    for (int r = 0; r < 50; ++r) regret[h] += Play(spec, r, factory, Light()).final_regret / 50;
  }
  const double ratio = regret[1] / regret[0];
  return {ratio < 1.9, Format("mean regret %.1f at T0, %.1f at 2 T0; ratio %.3f (need < 1.9)",
                              regret[0], regret[1], ratio)};
}

// ---- 8 ----------------------------------------------------------------------

Outcome Alg2Leaving() {
  const auto spec = Spec(R"(
[environment]
num_players = 3
horizon = 1000000
means = [0.9, 0.7, 0.1]
[algorithm]
name = "alg2"
variant = "c"
mu_lower = 0.5
c_scale = 0.05
[experiment]
base_seed = 8000
)");
  const PlayerFactory factory = MakePlayerFactory(spec);
  int good = 0;
  for (int r = 0; r < 100; ++r) {
    const auto trace = Play(spec, r, factory, Light());
    int left = 0;
    std::multiset<Arm> held;
    for (std::size_t j = 0; j < trace.final_actions.size(); ++j) {
      if (trace.final_has_left[j]) {
        ++left;
      } else {
        held.insert(trace.final_actions[j]);
      }
    }
    good += left == 1 && held == std::multiset<Arm>{1, 2};
  }
  return {good >= 90, Format("%d/100 runs with one leaver and arms {1,2} held (need 90)",
                             good)};
}

// ---- 9 ----------------------------------------------------------------------

Outcome EstimateMFullConstants() {
  const auto spec = Spec(R"(
[environment]
num_players = 2
horizon = 1
means = [0.9, 0.6, 0.3]
[algorithm]
name = "estimate_m"
mu_lower = 0.5
delta = 0.1
[experiment]
base_seed = 9000
)");
  const auto schedule = ComputeEstimateMSchedule({3, 0.5, 0.1});
  int correct = 0;
  bool counts = true;
  for (int r = 0; r < 10; ++r) {
    const Game game = PlayKeep(spec, r, MakePlayerFactory(spec), Light());
    counts = counts && game.trace.rounds_played == schedule.total_rounds;
    bool all = true;
    for (const auto& player : game.players) {
      const auto* p = dynamic_cast<const EstimateMPlayer*>(player.get());
      counts = counts && p != nullptr && p->rounds_played() == schedule.total_rounds;
      all = all && p != nullptr && p->recovered() == 2;
    }
    correct += all;
  }
  return {correct >= 9 && counts,
          Format("%d/10 runs recovered m = 2 (need 9); %s %lld rounds each "
                 "(%lld estimation + %lld x %lld probe)",
                 correct, counts ? "exactly" : "NOT exactly",
                 static_cast<long long>(schedule.total_rounds),
                 static_cast<long long>(schedule.sigma_rounds),
                 static_cast<long long>(schedule.probe_iterations),
                 static_cast<long long>(schedule.block_length))};
}

// ---- 10 ---------------------------------------------------------------------

Outcome Lemma4() {
  bool pass = true;
  std::int64_t points = 0;
  for (double p : {1.1, 1.25, 1.5, 2.0}) {
    const auto r = VerifyLemma4Grid(p);
    pass = pass && r.points >= 10000 && r.passed();
    points += r.points;
  }
  Lemma4Grid wide;
  wide.width_exponent = 0.7;
  std::int64_t doubles = 0;
  for (double p : {1.1, 1.25, 1.5, 2.0}) doubles += VerifyLemma4Grid(p, wide).multiple;
  return {pass && doubles >= 1,
          Format("%lld precondition points all unique: %s; %lld double intersections "
                 "on the wide grid",
                 static_cast<long long>(points), pass ? "yes" : "no",
                 static_cast<long long>(doubles))};
}

// ---- 11 ---------------------------------------------------------------------

Outcome NashConvergence() {
  // Player-specific means, fixed for the fixture.
  const auto spec = Spec(R"(
[environment]
num_players = 3
horizon = 1
dummy_action = true
per_player_means = [[0.82, 0.35, 0.61, 0.17],
                    [0.44, 0.91, 0.28, 0.66],
                    [0.73, 0.52, 0.87, 0.39]]
[algorithm]
name = "anticoord"
epsilon = 0.2
delta = 0.1
[experiment]
base_seed = 11000
)");
  const int k = 4, m = 3;
  const double eps = 0.2, delta = 0.1;
  const auto expected = static_cast<std::int64_t>(
                            std::ceil(512.0 * k * std::log(6.0 * m * k / delta) / (eps * eps))) +
                        k * static_cast<std::int64_t>(
                                std::ceil(4.0 * k * std::log(2.0 * m * k / delta) / eps));
  const PlayerFactory factory = MakePlayerFactory(spec);
  int nash = 0;
  bool counts = spec.GameRounds() == expected;
  for (int r = 0; r < 100; ++r) {
    const auto trace = Play(spec, r, factory, Light());
    counts = counts && trace.rounds_played == expected;
    nash += VerifyNash(trace.final_actions, *spec.environment.per_player_means, eps)
                .is_eps_nash;
  }
  return {counts && nash >= 90,
          Format("%s %lld rounds per run; %d/100 final assignments are 0.2-Nash (need 90)",
                 counts ? "exactly" : "NOT exactly", static_cast<long long>(expected),
                 nash)};
}

// ---- 12 ---------------------------------------------------------------------

// Pulls uniformly over the arms, and the dummy action when it is allowed.
class AnyActionPlayer : public Player {
 public:
  AnyActionPlayer(int k, bool dummy) : k_(k), dummy_(dummy) {}
  Arm ChooseAction(RandomStream& rng) override {
    return dummy_ ? static_cast<Arm>(rng.UniformIndex(k_ + 1))
                  : static_cast<Arm>(rng.UniformIndex(k_)) + 1;
  }
  void Observe(const Observation&) override {}
  std::string_view Phase() const override { return "any"; }

 private:
  int k_;
  bool dummy_;
};

Outcome RegretOracle() {
  RandomStream rng(12, 0);
  double worst = 0.0;
  int traces = 0;
  for (int trial = 0; trial < 500; ++trial) {
    EnvironmentConfig c;
    const int k = 2 + static_cast<int>(rng.UniformIndex(3));
    c.num_players = 1 + static_cast<int>(rng.UniformIndex(4));
    for (int i = 0; i < k; ++i) c.arms.push_back({rng.UniformDouble()});
    c.horizon = 1 + static_cast<std::int64_t>(rng.UniformIndex(20));
    c.dummy_action_enabled = rng.UniformIndex(2) == 1;
    c.master_seed = trial;
    std::vector<RegretMode> modes = {RegretMode::kTopKMinus1,
                                     RegretMode::kTopKWithLeaving};
    if (c.num_players <= k) modes.push_back(RegretMode::kTopM);
    const Environment env(c);
    GameOptions options;
    options.regret_mode = modes.front();
    const auto trace = RunGame(
        env, [&](int) { return std::make_unique<AnyActionPlayer>(k, c.dummy_action_enabled); },
        options);
    ++traces;
    for (RegretMode mode : modes) {
      const auto ledger = ComputeRegret(trace, mode);
      const auto oracle = testing::BruteForceRegret(c, trace.records, mode);
      if (ledger.cumulative.size() != oracle.size()) return {false, "length mismatch"};
      for (std::size_t t = 0; t < oracle.size(); ++t) {
        worst = std::max(worst, std::abs(ledger.cumulative[t] - oracle[t]));
      }
    }
  }
  return {worst <= 1e-12, Format("%d traces, max |difference| %.3g (need <= 1e-12)",
                                 traces, worst)};
}

// ---- 13 ---------------------------------------------------------------------

Outcome Lemma5() {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 13;
  for (auto [mu, sigma] : {std::pair{0.5, 1.0}, {0.1, 1.0}, {0.05, 1.0}, {1.0, 1.0}}) {
    const ArmSpec spec{mu, RewardDistribution::kTruncatedGaussian, sigma};
    const auto r = CheckLemma5Bound(spec, 1000000, seed++);
    pass = pass && r.passed;
    detail += Format("(%.2g,%.2g) P(X>0)=%.4f >= %.5f; ", mu, sigma, r.empirical, r.bound);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ---- 14 ---------------------------------------------------------------------

Outcome GoldenReplay() {
  namespace fs = std::filesystem;
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(MPBANDIT_GOLDEN_DIR)) {
    if (e.path().extension() == ".toml") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  int identical = 0;
  std::string failures;
  for (const auto& cfg : configs) {
    fs::path trace = cfg;
    trace.replace_extension(".csv");
    std::vector<std::string> args = {"mpbandit", "replay", "--config", cfg.string(),
                                     "--trace", trace.string()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code == cli::kExitOk) {
      ++identical;
    } else {
      failures += " " + cfg.stem().string();
    }
  }
  const int n = static_cast<int>(configs.size());
  return {n >= 20 && identical == n,
          Format("%d/%d golden traces replay identically (need 20)%s%s", identical, n,
                 failures.empty() ? "" : "; diverged:", failures.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

std::set<int> Selected() {
  std::set<int> out;
  if (const char* only = std::getenv("MPB_ACCEPTANCE_ONLY")) {
    std::stringstream ss(only);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.insert(std::stoi(tok));
  }
  return out;
}

}  // namespace
}  // namespace mpbandit

int main() {
  using namespace mpbandit;
  const std::vector<Criterion> criteria = {
      {1, "musical-chairs exclusivity", ChairsExclusivity},
      {2, "musical-chairs failure-rate bound", ChairsFailureBound},
      {3, "corrected estimator unbiasedness", EstimatorUnbiased},
      {4, "alg1 end-to-end fixation", Alg1EndToEnd},
      {5, "alg1 logarithmic regret trend", Alg1Trend},
      {6, "alg2 classification soundness", Alg2Audit},
      {7, "alg2 collision-sensing zero-gap sublinearity", Alg2ZeroGap},
      {8, "alg2 leaving variant", Alg2Leaving},
      {9, "player-count estimation, full constants", EstimateMFullConstants},
      {10, "interval-uniqueness grid", Lemma4},
      {11, "anti-coordination Nash convergence", NashConvergence},
      {12, "regret oracle equivalence", RegretOracle},
      {13, "positive-probability bound", Lemma5},
      {14, "golden trace replay", GoldenReplay},
  };
  const auto only = Selected();
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
