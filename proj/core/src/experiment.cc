#include "mpbandit/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "mpbandit/analysis.h"
#include "mpbandit/anticoordination.h"
#include "mpbandit/doubling.h"
#include "mpbandit/errors.h"
#include "mpbandit/estimate_m.h"
#include "mpbandit/log_regret_player.h"

namespace mpbandit {

namespace {

struct KindName {
  AlgorithmKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {AlgorithmKind::kLogRegret, "alg1"},
    {AlgorithmKind::kEpoch, "alg2"},
    {AlgorithmKind::kMusicalChairs, "musical_chairs"},
    {AlgorithmKind::kAntiCoordination, "anticoord"},
    {AlgorithmKind::kMoreThanK, "more_than_k"},
    {AlgorithmKind::kEstimateM, "estimate_m"},
    {AlgorithmKind::kUniformRandom, "random"},
};

// Runs one musical-chairs protocol, then keeps the occupied arm (or pulls
// uniformly when the budget ran out without one).
class ChairsPlayer : public Player {
 public:
  ChairsPlayer(ChairsRule rule, int num_arms, std::vector<Arm> targets,
               std::int64_t budget)
      : num_arms_(num_arms),
        chairs_(rule == ChairsRule::kMc1
                    ? MusicalChairs(num_arms, std::move(targets))
                    : MusicalChairs(rule, num_arms, std::move(targets), budget)) {}

  Arm ChooseAction(RandomStream& rng) override {
    if (!chairs_.terminal()) return chairs_.ChooseAction(rng);
    if (chairs_.occupied()) return chairs_.occupied_arm();
    return static_cast<Arm>(rng.UniformIndex(num_arms_)) + 1;
  }
  void Observe(const Observation& obs) override {
    if (chairs_.terminal()) return;
    chairs_.Observe(obs.arm, obs.reward,
                    chairs_.rule() == ChairsRule::kMc3 ? obs.collision : std::nullopt);
  }
  std::string_view Phase() const override {
    if (!chairs_.terminal()) return "chairs";
    return chairs_.occupied() ? "exploit" : "random";
  }

 private:
  int num_arms_;
  MusicalChairs chairs_;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string AlgorithmName(const AlgorithmSpec& spec) {
  std::string base = "?";
  for (const auto& kn : kKindNames) {
    if (kn.kind == spec.kind) base = kn.name;
  }
  if (spec.estimate_m_first) base = "estimate_m_then(" + base + ")";
  if (spec.doubling) base = "doubling(" + base + ")";
  return base;
}

void ParseAlgorithmName(const std::string& raw, AlgorithmSpec& spec) {
  std::string name = Trim(raw);
  spec.doubling = false;
  spec.estimate_m_first = false;
  auto unwrap = [&](const std::string& prefix) {
    if (name.rfind(prefix + "(", 0) == 0 && name.back() == ')') {
      name = Trim(name.substr(prefix.size() + 1, name.size() - prefix.size() - 2));
      return true;
    }
    return false;
  };
  while (true) {
    if (unwrap("doubling")) {
      if (spec.doubling) throw ConfigError({"algorithm: doubling applied twice"});
      spec.doubling = true;
    } else if (unwrap("estimate_m_then")) {
      if (spec.estimate_m_first) {
        throw ConfigError({"algorithm: estimate_m_then applied twice"});
      }
      spec.estimate_m_first = true;
    } else {
      break;
    }
  }
  for (const auto& kn : kKindNames) {
    if (name == kn.name) {
      spec.kind = kn.kind;
      return;
    }
  }
  throw ConfigError({"algorithm: unknown name '" + raw + "'"});
}

RegretMode ExperimentSpec::EffectiveRegretMode() const {
  if (regret_mode) return *regret_mode;
  if (environment.num_players <= environment.num_arms()) return RegretMode::kTopM;
  if (algorithm.kind == AlgorithmKind::kMoreThanK &&
      algorithm.mode == CrowdMode::kLeaving) {
    return RegretMode::kTopKWithLeaving;
  }
  return RegretMode::kTopKMinus1;
}

std::int64_t ExperimentSpec::GameRounds() const {
  if (algorithm.doubling || algorithm.estimate_m_first) return environment.horizon;
  if (algorithm.kind == AlgorithmKind::kEstimateM) {
    return ComputeEstimateMSchedule(
               {environment.num_arms(), algorithm.mu_lower.value_or(0.0),
                algorithm.delta})
        .total_rounds;
  }
  if (algorithm.kind == AlgorithmKind::kAntiCoordination) {
    return ComputeAntiCoordinationSchedule({environment.num_arms(),
                                            environment.num_players,
                                            algorithm.epsilon, algorithm.delta})
        .total_rounds;
  }
  return environment.horizon;
}

std::vector<std::string> ExperimentSpec::Violations() const {
  std::vector<std::string> out = environment.Violations();
  const int k = environment.num_arms();
  const int m = environment.num_players;
  const AlgorithmSpec& a = algorithm;
  const bool sensing = environment.feedback == Feedback::kRewardAndCollision;
  const std::string name = AlgorithmName(a);
  auto need_mu = [&] {
    if (!a.mu_lower) {
      out.push_back(name + ": needs mu_lower");
    } else if (!(*a.mu_lower > 0.0 && *a.mu_lower <= 1.0)) {
      out.push_back(name + ": mu_lower must lie in (0, 1]");
    }
  };
  auto need_delta = [&] {
    if (!(a.delta > 0.0 && a.delta < 1.0)) out.push_back(name + ": delta must lie in (0, 1)");
  };

  if (replications < 1) out.push_back("experiment: replications must be >= 1");
  if (replications > 1 && seed_increment == 0) {
    out.push_back("experiment: seed_increment must be nonzero for distinct seeds");
  }
  if (!(a.c_scale > 0.0)) out.push_back(name + ": c_scale must be positive");
  if (a.estimate_m_first) {
    need_mu();
    need_delta();
    if (a.kind != AlgorithmKind::kLogRegret && a.kind != AlgorithmKind::kEpoch) {
      out.push_back(name + ": estimate_m_then wraps alg1 or alg2 only");
    }
  }

  switch (a.kind) {
    case AlgorithmKind::kLogRegret:
      if (m > k) out.push_back(name + ": needs m <= K");
      break;
    case AlgorithmKind::kEpoch:
      if (m > k) out.push_back(name + ": needs m <= K");
      if (a.variant == EpochVariant::kCollisionSensing) {
        if (!sensing) out.push_back(name + ": variant b needs collision feedback");
      } else {
        need_mu();
      }
      break;
    case AlgorithmKind::kMusicalChairs:
      if (a.rule == ChairsRule::kMc3 && !sensing) {
        out.push_back(name + ": mc3 needs collision feedback");
      }
      if (a.rule != ChairsRule::kMc1 && a.budget < 1) {
        out.push_back(name + ": mc2/mc3 need budget >= 1");
      }
      for (const Arm t : a.targets) {
        if (t < 1 || t > k) out.push_back(name + ": target arm out of range");
      }
      break;
    case AlgorithmKind::kAntiCoordination:
      if (!environment.per_player_means) {
        out.push_back(name + ": needs per_player_means");
      }
      if (!environment.dummy_action_enabled) {
        out.push_back(name + ": needs dummy_action = true");
      }
      if (!(a.epsilon > 0.0)) out.push_back(name + ": epsilon must be positive");
      need_delta();
      break;
    case AlgorithmKind::kMoreThanK:
      if (m <= k) out.push_back(name + ": needs m > K");
      if (!(a.constant > 0.0)) out.push_back(name + ": C must be positive");
      if (a.mode == CrowdMode::kLeaving && !sensing) need_mu();
      break;
    case AlgorithmKind::kEstimateM:
      if (m > k) out.push_back(name + ": needs m <= K");
      need_mu();
      need_delta();
      break;
    case AlgorithmKind::kUniformRandom:
      break;
  }
  if (a.doubling && (a.kind == AlgorithmKind::kEstimateM ||
                     a.kind == AlgorithmKind::kAntiCoordination)) {
    out.push_back(name + ": fixed-schedule algorithms cannot be doubled");
  }
  const RegretMode mode = EffectiveRegretMode();
  if (mode == RegretMode::kTopM && m > k) {
    out.push_back("experiment: regret_mode top_m needs m <= K");
  }
  return out;
}

void ExperimentSpec::Validate() const {
  auto v = Violations();
  if (!v.empty()) throw ConfigError(std::move(v));
}

namespace {

// Typed access to a config document that records every problem instead of
// stopping at the first.
class SpecReader {
 public:
  SpecReader(const ConfigDocument& doc, std::vector<std::string>& errors)
      : doc_(doc), errors_(errors) {}

  const ConfigValue* Get(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    return doc_.Find(section, key);
  }

  std::optional<double> Number(const std::string& s, const std::string& k) {
    const ConfigValue* v = Get(s, k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      Error(s, k, *v, "expected a number");
      return std::nullopt;
    }
    return v->as_number();
  }

  std::optional<std::int64_t> Integer(const std::string& s, const std::string& k) {
    const auto d = Number(s, k);
    if (!d) return std::nullopt;
    if (std::floor(*d) != *d || std::abs(*d) > 9.007199254740992e15) {
      errors_.push_back(s + "." + k + ": expected an integer");
      return std::nullopt;
    }
    return static_cast<std::int64_t>(*d);
  }

  std::optional<std::string> String(const std::string& s, const std::string& k) {
    const ConfigValue* v = Get(s, k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      Error(s, k, *v, "expected a string");
      return std::nullopt;
    }
    return v->as_string();
  }

  std::optional<bool> Bool(const std::string& s, const std::string& k) {
    const ConfigValue* v = Get(s, k);
    if (v == nullptr) return std::nullopt;
    if (!v->is_bool()) {
      Error(s, k, *v, "expected true or false");
      return std::nullopt;
    }
    return v->as_bool();
  }

  std::optional<std::vector<double>> Numbers(const ConfigValue& v,
                                             const std::string& where) {
    if (!v.is_array()) {
      errors_.push_back(where + ": expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& item : v.as_array()) {
      if (!item.is_number()) {
        errors_.push_back(where + ": expected an array of numbers");
        return std::nullopt;
      }
      out.push_back(item.as_number());
    }
    return out;
  }

  std::optional<std::vector<double>> Numbers(const std::string& s, const std::string& k) {
    const ConfigValue* v = Get(s, k);
    if (v == nullptr) return std::nullopt;
    return Numbers(*v, s + "." + k);
  }

  void ReportUnknownKeys() {
    for (const auto& [section, keys] : doc_.sections()) {
      if (section != "environment" && section != "algorithm" && section != "experiment") {
        errors_.push_back("unknown section [" + section + "]");
        continue;
      }
      for (const auto& [key, value] : keys) {
        if (!used_.count(section + "." + key)) {
          errors_.push_back("line " + std::to_string(value.line) + ": unknown key " +
                            section + "." + key);
        }
      }
    }
  }

  void Fail(const std::string& what) { errors_.push_back(what); }

 private:
  void Error(const std::string& s, const std::string& k, const ConfigValue& v,
             const std::string& what) {
    errors_.push_back("line " + std::to_string(v.line) + ": " + s + "." + k + ": " + what);
  }

  const ConfigDocument& doc_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

std::optional<RewardDistribution> ParseDistribution(const std::string& s) {
  if (s == "bernoulli") return RewardDistribution::kBernoulli;
  if (s == "beta" || s == "uniform") return RewardDistribution::kBeta;
  if (s == "truncated_gaussian") return RewardDistribution::kTruncatedGaussian;
  return std::nullopt;
}

void ReadEnvironment(SpecReader& r, EnvironmentConfig& env) {
  const std::string s = "environment";
  if (auto m = r.Integer(s, "num_players")) env.num_players = static_cast<int>(*m);
  if (auto t = r.Integer(s, "horizon")) env.horizon = *t;
  if (auto d = r.Bool(s, "dummy_action")) env.dummy_action_enabled = *d;
  if (auto f = r.String(s, "feedback")) {
    if (*f == "reward_only") {
      env.feedback = Feedback::kRewardOnly;
    } else if (*f == "reward_and_collision") {
      env.feedback = Feedback::kRewardAndCollision;
    } else {
      r.Fail("environment.feedback: expected reward_only or reward_and_collision");
    }
  }

  std::vector<double> means;
  if (auto mv = r.Numbers(s, "means")) means = *mv;
  if (const ConfigValue* pp = r.Get(s, "per_player_means")) {
    std::vector<std::vector<double>> rows;
    if (!pp->is_array()) {
      r.Fail("environment.per_player_means: expected an array of rows");
    } else {
      for (const auto& row : pp->as_array()) {
        if (auto v = r.Numbers(row, "environment.per_player_means")) rows.push_back(*v);
      }
      if (means.empty() && !rows.empty()) {
        // Arm-level means only feed the regret ledger here.
        means.assign(rows.front().size(), 0.0);
        for (const auto& row : rows) {
          for (std::size_t i = 0; i < row.size() && i < means.size(); ++i) {
            means[i] += row[i] / static_cast<double>(rows.size());
          }
        }
      }
      env.per_player_means = std::move(rows);
    }
  }
  if (means.empty()) r.Fail("environment: needs means (or per_player_means)");
  env.arms.assign(means.size(), ArmSpec{});
  for (std::size_t i = 0; i < means.size(); ++i) env.arms[i].mean = means[i];

  if (const ConfigValue* d = r.Get(s, "distribution")) {
    std::vector<std::string> names;
    if (d->is_string()) {
      names.assign(means.size(), d->as_string());
    } else if (d->is_array()) {
      for (const auto& item : d->as_array()) {
        names.push_back(item.is_string() ? item.as_string() : "?");
      }
    }
    if (names.size() != means.size()) {
      r.Fail("environment.distribution: expected a name or one name per arm");
    } else {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (auto kind = ParseDistribution(names[i])) {
          env.arms[i].distribution = *kind;
        } else {
          r.Fail("environment.distribution: unknown '" + names[i] + "'");
        }
      }
    }
  }
  if (const ConfigValue* sg = r.Get(s, "sigma")) {
    if (sg->is_number()) {
      for (auto& a : env.arms) a.sigma = sg->as_number();
    } else if (auto v = r.Numbers(*sg, "environment.sigma"); v && v->size() == means.size()) {
      for (std::size_t i = 0; i < v->size(); ++i) env.arms[i].sigma = (*v)[i];
    } else {
      r.Fail("environment.sigma: expected a number or one per arm");
    }
  }
}

void ReadAlgorithm(SpecReader& r, AlgorithmSpec& a) {
  const std::string s = "algorithm";
  if (auto name = r.String(s, "name")) {
    try {
      ParseAlgorithmName(*name, a);
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) r.Fail(v);
    }
  } else {
    r.Fail("algorithm.name is required");
  }
  if (auto v = r.Number(s, "c_scale")) a.c_scale = *v;
  if (auto v = r.Number(s, "mu_lower")) a.mu_lower = *v;
  if (auto v = r.Number(s, "delta")) a.delta = *v;
  if (auto v = r.Number(s, "epsilon")) a.epsilon = *v;
  if (auto v = r.Number(s, "C")) a.constant = *v;
  if (auto v = r.Integer(s, "budget")) a.budget = *v;
  if (auto v = r.String(s, "variant")) {
    if (*v == "a") {
      a.variant = EpochVariant::kKnownLowerBound;
    } else if (*v == "b") {
      a.variant = EpochVariant::kCollisionSensing;
    } else if (*v == "c") {
      a.variant = EpochVariant::kLeaving;
    } else {
      r.Fail("algorithm.variant: expected a, b or c");
    }
  }
  if (auto v = r.String(s, "mode")) {
    try {
      a.mode = ParseCrowdMode(*v);
    } catch (const Error& e) {
      r.Fail(std::string("algorithm.mode: ") + e.what());
    }
  }
  if (auto v = r.String(s, "rule")) {
    if (*v == "mc1") {
      a.rule = ChairsRule::kMc1;
    } else if (*v == "mc2") {
      a.rule = ChairsRule::kMc2;
    } else if (*v == "mc3") {
      a.rule = ChairsRule::kMc3;
    } else {
      r.Fail("algorithm.rule: expected mc1, mc2 or mc3");
    }
  }
  if (auto v = r.Numbers(s, "targets")) {
    for (double t : *v) a.targets.push_back(static_cast<Arm>(t));
  }
}

void ReadExperiment(SpecReader& r, ExperimentSpec& spec) {
  const std::string s = "experiment";
  if (auto v = r.Integer(s, "replications")) spec.replications = static_cast<int>(*v);
  if (auto v = r.Integer(s, "base_seed")) spec.base_seed = static_cast<std::uint64_t>(*v);
  if (auto v = r.Integer(s, "seed_increment")) {
    spec.seed_increment = static_cast<std::uint64_t>(*v);
  }
  if (auto v = r.String(s, "regret_mode")) {
    try {
      spec.regret_mode = ParseRegretMode(*v);
    } catch (const Error& e) {
      r.Fail(std::string("experiment.regret_mode: ") + e.what());
    }
  }
  if (auto v = r.Numbers(s, "checkpoints")) {
    for (double t : *v) spec.checkpoints.push_back(static_cast<std::int64_t>(t));
  }
  if (auto v = r.String(s, "fidelity")) {
    if (*v == "full") {
      spec.fidelity = TraceFidelity::kFull;
    } else if (*v == "checkpoints") {
      spec.fidelity = TraceFidelity::kCheckpoints;
    } else {
      r.Fail("experiment.fidelity: expected full or checkpoints");
    }
  }
  if (auto v = r.String(s, "output_dir")) spec.output_dir = *v;
}

}  // namespace

ExperimentSpec ExperimentSpecFromConfig(const ConfigDocument& doc) {
  std::vector<std::string> errors;
  SpecReader reader(doc, errors);
  ExperimentSpec spec;
  ReadEnvironment(reader, spec.environment);
  ReadAlgorithm(reader, spec.algorithm);
  ReadExperiment(reader, spec);
  reader.ReportUnknownKeys();
  if (errors.empty()) {
    errors = spec.Violations();
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::string& path) {
  return ExperimentSpecFromConfig(ConfigDocument::ParseFile(path));
}

std::unique_ptr<Player> MakePlayer(const AlgorithmSpec& spec, int num_arms,
                                   int num_players, std::int64_t horizon,
                                   Feedback feedback, int player_index,
                                   EpochAuditLog* audit) {
  if (spec.doubling) {
    AlgorithmSpec inner = spec;
    inner.doubling = false;
    return std::make_unique<DoublingPlayer>(
        [=](std::int64_t guess) {
          return MakePlayer(inner, num_arms, num_players, guess, feedback,
                            player_index, audit);
        });
  }
  if (spec.estimate_m_first) {
    AlgorithmSpec inner = spec;
    inner.estimate_m_first = false;
    EstimateMParams params{num_arms, spec.mu_lower.value_or(0.0), spec.delta};
    return std::make_unique<EstimateThenPlayer>(
        params, horizon,
        [=](int m, std::int64_t rest) {
          return MakePlayer(inner, num_arms, m, rest, feedback, player_index, audit);
        });
  }
  switch (spec.kind) {
    case AlgorithmKind::kLogRegret:
      return std::make_unique<LogRegretPlayer>(
          LogRegretParams{num_arms, num_players, horizon, spec.c_scale});
    case AlgorithmKind::kEpoch:
      return std::make_unique<EpochPlayer>(
          EpochParams{num_arms, num_players, horizon, spec.variant,
                      spec.mu_lower.value_or(0.0), spec.c_scale},
          player_index, audit);
    case AlgorithmKind::kMusicalChairs: {
      std::vector<Arm> targets = spec.targets;
      if (targets.empty()) {
        for (Arm i = 1; i <= num_arms; ++i) targets.push_back(i);
      }
      return std::make_unique<ChairsPlayer>(spec.rule, num_arms, std::move(targets),
                                            spec.budget);
    }
    case AlgorithmKind::kAntiCoordination:
      return std::make_unique<AntiCoordinationPlayer>(
          AntiCoordinationParams{num_arms, num_players, spec.epsilon, spec.delta});
    case AlgorithmKind::kMoreThanK: {
      CrowdParams p;
      p.num_arms = num_arms;
      p.num_players = num_players;
      p.horizon = horizon;
      p.mode = spec.mode;
      p.constant = spec.constant;
      p.mu_lower = spec.mu_lower.value_or(0.0);
      p.collision_feedback = feedback == Feedback::kRewardAndCollision;
      return std::make_unique<CrowdPlayer>(p);
    }
    case AlgorithmKind::kEstimateM:
      return std::make_unique<EstimateMPlayer>(
          EstimateMParams{num_arms, spec.mu_lower.value_or(0.0), spec.delta});
    case AlgorithmKind::kUniformRandom:
      return std::make_unique<UniformRandomPlayer>(num_arms);
  }
  throw ContractViolation("unknown algorithm kind");
}

PlayerFactory MakePlayerFactory(const ExperimentSpec& spec, EpochAuditLog* audit) {
  const AlgorithmSpec a = spec.algorithm;
  const int k = spec.environment.num_arms();
  const int m = spec.environment.num_players;
  const std::int64_t horizon = spec.GameRounds();
  const Feedback feedback = spec.environment.feedback;
  return [a, k, m, horizon, feedback, audit](int j) {
    return MakePlayer(a, k, m, horizon, feedback, j, audit);
  };
}

Summary Summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  auto q = [&](double p) {
    const double pos = p * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.q25 = q(0.25);
  s.median = q(0.5);
  s.q75 = q(0.75);
  s.max = values.back();
  return s;
}

ReplicationRun RunReplication(const ExperimentSpec& spec, int replication,
                              std::optional<TraceFidelity> trace_fidelity) {
  EnvironmentConfig config = spec.environment;
  config.master_seed = spec.SeedFor(replication);
  Environment env(config);
  const PlayerFactory factory = MakePlayerFactory(spec);
  std::vector<std::unique_ptr<Player>> players;
  for (int j = 0; j < config.num_players; ++j) players.push_back(factory(j));

  GameOptions options;
  options.fidelity = trace_fidelity.value_or(spec.fidelity);
  options.regret_mode = spec.EffectiveRegretMode();
  options.checkpoints = spec.checkpoints;
  options.rounds = spec.GameRounds();

  ReplicationRun run;
  run.trace = RunGame(env, players, options);
  ReplicationResult& r = run.result;
  r.replication = replication;
  r.seed = config.master_seed;
  r.final_regret = run.trace.final_regret;
  r.fixation_round = run.trace.FixationRound();
  r.checkpoints = run.trace.checkpoints;

  const AlgorithmSpec& a = spec.algorithm;
  if (a.kind == AlgorithmKind::kEstimateM && !a.estimate_m_first) {
    bool all = true;
    for (int j = 0; j < config.num_players; ++j) {
      const auto* p = dynamic_cast<const EstimateMPlayer*>(players[j].get());
      const auto got = p->recovered();
      if (j == 0) r.recovered_players = got;
      all = all && got && *got == config.num_players;
    }
    r.success = all;
  } else if (a.kind == AlgorithmKind::kAntiCoordination) {
    const NashReport nash =
        VerifyNash(run.trace.final_actions, *config.per_player_means, a.epsilon);
    r.nash_gain = nash.worst ? nash.worst->improvement : 0.0;
    r.success = nash.is_eps_nash;
  } else {
    r.success = r.fixation_round.has_value();
  }
  return run;
}

int DefaultWorkerCount() {
  if (const char* env = std::getenv("MPB_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult RunExperiment(const ExperimentSpec& spec, int workers) {
  spec.Validate();
  if (workers <= 0) workers = DefaultWorkerCount();
  workers = std::min(workers, spec.replications);

  ExperimentResult result;
  result.spec = spec;
  result.rows.resize(spec.replications);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= spec.replications) return;
      try {
        result.rows[r] = RunReplication(spec, r, TraceFidelity::kCheckpoints).result;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = spec.replications;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> regrets;
  int successes = 0;
  for (const auto& row : result.rows) {
    regrets.push_back(row.final_regret);
    successes += row.success ? 1 : 0;
  }
  result.final_regret = Summarize(regrets);
  result.success_rate = static_cast<double>(successes) / spec.replications;
  if (!result.rows.empty()) {
    result.mean_checkpoints = result.rows.front().checkpoints;
    for (auto& c : result.mean_checkpoints) c.cumulative_regret = 0.0;
    for (const auto& row : result.rows) {
      for (std::size_t i = 0; i < row.checkpoints.size(); ++i) {
        result.mean_checkpoints[i].cumulative_regret +=
            row.checkpoints[i].cumulative_regret / spec.replications;
      }
    }
  }
  return result;
}

namespace {

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json SummaryToJson(const Summary& s) {
  return {{"mean", s.mean},     {"stddev", s.stddev}, {"min", s.min},
          {"q25", s.q25},       {"median", s.median}, {"q75", s.q75},
          {"max", s.max}};
}

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string SummaryJson(const ExperimentResult& result) {
  const ExperimentSpec& spec = result.spec;
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["algorithm"] = AlgorithmName(spec.algorithm);
  j["num_arms"] = spec.environment.num_arms();
  j["num_players"] = spec.environment.num_players;
  j["horizon"] = spec.environment.horizon;
  j["rounds_per_game"] = spec.GameRounds();
  j["regret_mode"] = std::string(ToString(spec.EffectiveRegretMode()));
  j["replications"] = spec.replications;
  j["base_seed"] = spec.base_seed;
  j["seed_increment"] = spec.seed_increment;
  j["final_regret"] = SummaryToJson(result.final_regret);
  j["success_rate"] = result.success_rate;
  std::vector<double> fix;
  int never = 0;
  for (const auto& row : result.rows) {
    if (row.fixation_round) {
      fix.push_back(static_cast<double>(*row.fixation_round));
    } else {
      ++never;
    }
  }
  j["fixation_round"] = SummaryToJson(Summarize(fix));
  j["never_fixated"] = never;
  auto& curve = j["mean_checkpoints"] = nlohmann::ordered_json::array();
  for (const auto& c : result.mean_checkpoints) {
    curve.push_back({{"t", c.t}, {"cumulative_regret", c.cumulative_regret}});
  }
  return j.dump(2) + "\n";
}

void WriteExperimentOutputs(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path root(dir);

  std::string rows = "replication,seed,final_regret,fixation_round,success\n";
  std::string curves = "replication,t,cumulative_regret\n";
  for (const auto& r : result.rows) {
    rows += std::to_string(r.replication) + ',' + std::to_string(r.seed) + ',' +
            Fmt(r.final_regret) + ',' +
            (r.fixation_round ? std::to_string(*r.fixation_round) : "inf") + ',' +
            (r.success ? "1" : "0") + '\n';
    for (const auto& c : r.checkpoints) {
      curves += std::to_string(r.replication) + ',' + std::to_string(c.t) + ',' +
                Fmt(c.cumulative_regret) + '\n';
    }
  }
  WriteFile(root / "results.csv", rows);
  WriteFile(root / "regret_checkpoints.csv", curves);
  WriteFile(root / "summary.json", SummaryJson(result));
}

}  // namespace mpbandit
