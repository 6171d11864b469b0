#include "cli.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpbandit/analysis.h"
#include "mpbandit/config.h"
#include "mpbandit/engine.h"
#include "mpbandit/errors.h"
#include "mpbandit/estimate_m.h"
#include "mpbandit/experiment.h"
#include "mpbandit/random.h"

namespace mpbandit::cli {

namespace {

using nlohmann::ordered_json;

// Thrown for command-line mistakes that CLI11 cannot see.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpecOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
};

void AddSpecOptions(CLI::App* cmd, SpecOptions& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config, "Experiment file ([environment], "
                                                  "[algorithm], [experiment])");
  if (config_required) c->required();
  cmd->add_option("--set", o.sets, "Override a config key: section.key=value");
  cmd->add_option("--seed", o.seed, "Base seed (overrides experiment.base_seed)");
  cmd->add_option("--replications", o.replications, "Number of replications");
}

ConfigValue ParseOverride(const std::string& text) {
  try {
    return ConfigDocument::ParseValue(text);
  } catch (const ConfigError&) {
    ConfigValue v;
    v.data = text;
    return v;
  }
}

void ApplySet(ConfigDocument& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw UsageError("--set expects section.key=value, got '" + assignment + "'");
  }
  doc.Set(assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1),
          ParseOverride(assignment.substr(eq + 1)));
}

ConfigDocument LoadDocument(const SpecOptions& o) {
  ConfigDocument doc = ConfigDocument::ParseFile(o.config);
  for (const auto& s : o.sets) ApplySet(doc, s);
  return doc;
}

ExperimentSpec FinishSpec(ExperimentSpec spec, const SpecOptions& o) {
  if (o.seed) spec.base_seed = *o.seed;
  if (o.replications) spec.replications = *o.replications;
  spec.Validate();
  return spec;
}

void PrintSummary(const ExperimentResult& r, std::ostream& out) {
  out << AlgorithmName(r.spec.algorithm) << ": " << r.rows.size()
      << " replications, mean final regret " << r.final_regret.mean << " (sd "
      << r.final_regret.stddev << "), success rate " << r.success_rate << '\n';
}

// ---- run -------------------------------------------------------------------

struct RunOptions {
  SpecOptions spec;
  std::string out_dir;
  std::string trace_out;
  int workers = 0;
};

int DoRun(const RunOptions& o, std::ostream& out) {
  const ExperimentSpec spec = FinishSpec(ExperimentSpecFromConfig(LoadDocument(o.spec)), o.spec);
  const ExperimentResult result = RunExperiment(spec, o.workers);
  const std::string dir = o.out_dir.empty() ? spec.output_dir : o.out_dir;
  WriteExperimentOutputs(result, dir);
  if (!o.trace_out.empty()) {
    const ReplicationRun run = RunReplication(spec, 0, TraceFidelity::kFull);
    std::ofstream f(o.trace_out);
    if (!f) throw IoError("cannot write '" + o.trace_out + "'");
    WriteTraceCsv(run.trace, f);
  }
  PrintSummary(result, out);
  out << "wrote " << dir << "/results.csv, regret_checkpoints.csv, summary.json\n";
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOptions {
  SpecOptions spec;
  std::string param;
  std::string values;
  std::string out_dir;
  int workers = 0;
};

std::string ResolveParam(const std::string& p) {
  static const std::map<std::string, std::string> kAliases = {
      {"T", "environment.horizon"},       {"m", "environment.num_players"},
      {"c_scale", "algorithm.c_scale"},   {"mu_lower", "algorithm.mu_lower"},
      {"delta", "algorithm.delta"},       {"epsilon", "algorithm.epsilon"},
      {"C", "algorithm.C"},               {"R", "experiment.replications"},
  };
  if (auto it = kAliases.find(p); it != kAliases.end()) return it->second;
  if (p.find('.') == std::string::npos) {
    throw UsageError("--param must be an alias (T, m, c_scale, mu_lower, delta, "
                     "epsilon, C, R) or section.key");
  }
  return p;
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string CanonicalValue(const ConfigValue& v) {
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_number());
    return buf;
  }
  if (v.is_string()) return v.as_string();
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  return "array";
}

int DoSweep(const SweepOptions& o, std::ostream& out) {
  const std::string key = ResolveParam(o.param);
  std::vector<std::string> values;
  std::stringstream ss(o.values);
  for (std::string v; std::getline(ss, v, ',');) {
    if (!v.empty()) values.push_back(v);
  }
  if (values.empty()) throw UsageError("--values needs at least one value");

  const ConfigDocument base = LoadDocument(o.spec);
  std::vector<ExperimentSpec> specs;
  std::vector<std::string> canon;
  for (const auto& v : values) {
    ConfigDocument doc = base;
    ApplySet(doc, key + "=" + v);
    ExperimentSpec spec = FinishSpec(ExperimentSpecFromConfig(doc), o.spec);
    canon.push_back(CanonicalValue(ParseOverride(v)));
    // Each value gets its own stream of seeds, so the order of --values and
    // the presence of other values do not matter.
    spec.base_seed = SplitMix64(spec.base_seed ^ Fnv1a(key + "=" + canon.back()));
    specs.push_back(std::move(spec));
  }

  const std::string dir = o.out_dir.empty() ? specs.front().output_dir : o.out_dir;
  std::filesystem::create_directories(dir);
  std::ostringstream table;
  table << "param,value,base_seed,replications,mean_final_regret,"
           "stddev_final_regret,success_rate\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ExperimentResult r = RunExperiment(specs[i], o.workers);
    WriteExperimentOutputs(r, dir + "/" + o.param + "=" + canon[i]);
    char row[256];
    std::snprintf(row, sizeof row, "%s,%s,%llu,%d,%.17g,%.17g,%.17g\n", key.c_str(),
                  canon[i].c_str(), static_cast<unsigned long long>(specs[i].base_seed),
                  specs[i].replications, r.final_regret.mean, r.final_regret.stddev,
                  r.success_rate);
    table << row;
    out << o.param << '=' << canon[i] << ": ";
    PrintSummary(r, out);
  }
  std::ofstream f(dir + "/sweep.csv");
  if (!f) throw IoError("cannot write '" + dir + "/sweep.csv'");
  f << table.str();
  out << "wrote " << dir << "/sweep.csv\n";
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

std::vector<double> ParseList(const std::string& text, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string v; std::getline(ss, v, sep);) {
    if (v.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + v + "'");
    }
  }
  return out;
}

struct VerifyOptions {
  std::vector<double> ps = {1.1, 1.25, 1.5, 2.0};
  double width = 0.4;
  double mu = 0.5;
  double sigma = 1.0;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::string means;
  std::string assignment;
  double epsilon = 0.2;
  std::string checkpoints;
  SpecOptions spec;
};

int EmitJson(const ordered_json& j, bool passed, std::ostream& out) {
  out << j.dump(2) << '\n';
  return passed ? kExitOk : kExitRuntime;
}

int VerifyLemma4(const VerifyOptions& o, std::ostream& out) {
  ordered_json reports = ordered_json::array();
  bool all = true;
  for (double p : o.ps) {
    Lemma4Grid grid;
    grid.width_exponent = o.width;
    const Lemma4Report r = VerifyLemma4Grid(p, grid);
    ordered_json ce = ordered_json::array();
    for (const auto& c : r.counterexamples) {
      ce.push_back({{"a", c.a}, {"b", c.b}, {"c", c.c}, {"d", c.d}, {"hits", c.hits}});
    }
    reports.push_back({{"p", p},
                       {"width_exponent", o.width},
                       {"points", r.points},
                       {"unique", r.unique},
                       {"none", r.none},
                       {"multiple", r.multiple},
                       {"passed", r.passed()},
                       {"counterexamples", ce}});
    all = all && r.passed();
  }
  return EmitJson({{"check", "lemma4"}, {"passed", all}, {"reports", reports}}, all, out);
}

int VerifyLemma5(const VerifyOptions& o, std::ostream& out) {
  ArmSpec spec{o.mu, RewardDistribution::kTruncatedGaussian, o.sigma};
  const Lemma5Report r = CheckLemma5Bound(spec, o.samples, o.seed);
  return EmitJson({{"check", "lemma5"},
                   {"mu", r.mu},
                   {"sigma", r.sigma},
                   {"samples", r.samples},
                   {"empirical", r.empirical},
                   {"slack", r.slack},
                   {"bound", r.bound},
                   {"passed", r.passed}},
                  r.passed, out);
}

int VerifyNashCmd(const VerifyOptions& o, std::ostream& out) {
  if (o.means.empty() || o.assignment.empty()) {
    throw UsageError("verify nash needs --means and --assignment");
  }
  std::vector<std::vector<double>> means;
  std::stringstream rows(o.means);
  for (std::string row; std::getline(rows, row, ';');) means.push_back(ParseList(row));
  std::vector<Arm> assignment;
  for (double a : ParseList(o.assignment)) assignment.push_back(static_cast<Arm>(a));
  if (means.size() != assignment.size()) {
    throw UsageError("--means needs one row per entry of --assignment");
  }
  for (const auto& row : means) {
    if (row.size() != means.front().size()) throw UsageError("ragged --means rows");
  }
  const NashReport r = VerifyNash(assignment, means, o.epsilon);
  ordered_json j = {{"check", "nash"},
                    {"assignment", r.assignment},
                    {"payoffs", r.payoffs},
                    {"epsilon", r.epsilon},
                    {"is_eps_nash", r.is_eps_nash}};
  if (r.worst) {
    j["worst_deviation"] = {{"player", r.worst->player},
                            {"alternative", r.worst->alternative},
                            {"improvement", r.worst->improvement}};
  }
  return EmitJson(j, r.is_eps_nash, out);
}

std::vector<RegretCheckpoint> ReadCheckpoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::string header;
  std::getline(in, header);
  const bool with_replication = header == "replication,t,cumulative_regret";
  if (!with_replication && header != "t,cumulative_regret") {
    throw IoError(path + ": expected a checkpoint csv");
  }
  std::map<std::int64_t, std::pair<double, int>> acc;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    auto cells = ParseList(line);
    if (cells.size() != (with_replication ? 3u : 2u)) throw IoError(path + ": bad row");
    if (with_replication) cells.erase(cells.begin());
    auto& [sum, n] = acc[static_cast<std::int64_t>(cells[0])];
    sum += cells[1];
    ++n;
  }
  std::vector<RegretCheckpoint> out;
  for (const auto& [t, sn] : acc) out.push_back({t, sn.first / sn.second});
  return out;
}

int VerifyTrend(const VerifyOptions& o, std::ostream& out) {
  if (o.checkpoints.empty()) throw UsageError("verify trend needs --checkpoints");
  const TrendReport r = FitRegretTrend(ReadCheckpoints(o.checkpoints));
  ordered_json pts = ordered_json::array();
  for (const auto& c : r.checkpoints) {
    pts.push_back({{"t", c.t}, {"cumulative_regret", c.cumulative_regret}});
  }
  return EmitJson({{"check", "trend"},
                   {"growth", std::string(ToString(r.growth))},
                   {"ratios", r.ratios},
                   {"tolerance", r.tolerance},
                   {"checkpoints", pts}},
                  true, out);
}

int VerifyAudit(const VerifyOptions& o, std::ostream& out) {
  const ExperimentSpec spec =
      FinishSpec(ExperimentSpecFromConfig(LoadDocument(o.spec)), o.spec);
  if (spec.algorithm.kind != AlgorithmKind::kEpoch || spec.algorithm.doubling ||
      spec.algorithm.estimate_m_first) {
    throw UsageError("verify audit needs a plain alg2 experiment");
  }
  const double threshold = spec.algorithm.variant == EpochVariant::kCollisionSensing
                               ? 0.0
                               : spec.algorithm.mu_lower.value_or(0.0);
  ordered_json runs = ordered_json::array();
  int clean_flagged = 0;
  int bad_runs = 0;
  for (int r = 0; r < spec.replications; ++r) {
    EnvironmentConfig config = spec.environment;
    config.master_seed = spec.SeedFor(r);
    Environment env(config);
    EpochAuditLog log;
    GameOptions options;
    options.fidelity = TraceFidelity::kCheckpoints;
    options.regret_mode = spec.EffectiveRegretMode();
    options.rounds = spec.GameRounds();
    RunGame(env, MakePlayerFactory(spec, &log), options);
    const AuditReport a = AuditClassification(log, config, threshold);
    bad_runs += a.bad_event() ? 1 : 0;
    clean_flagged += (!a.bad_event() && !a.flags.empty()) ? 1 : 0;
    runs.push_back({{"replication", r},
                    {"seed", config.master_seed},
                    {"flags", a.flags.size()},
                    {"confidence_violations", a.confidence_violations.size()},
                    {"chairs_failures", a.chairs_failures.size()}});
  }
  const bool passed = clean_flagged == 0;
  return EmitJson({{"check", "audit"},
                   {"passed", passed},
                   {"runs_with_bad_events", bad_runs},
                   {"clean_runs_with_flags", clean_flagged},
                   {"runs", runs}},
                  passed, out);
}

// ---- estimate-m ------------------------------------------------------------

struct EstimateOptions {
  SpecOptions spec;
  std::string means;
  int players = 2;
  double mu = 0.5;
  double delta = 0.1;
  int workers = 0;
};

int DoEstimateM(const EstimateOptions& o, std::ostream& out) {
  ExperimentSpec spec;
  if (!o.spec.config.empty()) {
    ConfigDocument doc = LoadDocument(o.spec);
    ApplySet(doc, "algorithm.name=estimate_m");
    spec = FinishSpec(ExperimentSpecFromConfig(doc), o.spec);
  } else {
    if (o.means.empty()) throw UsageError("estimate-m needs --config or --means");
    for (double mu : ParseList(o.means)) spec.environment.arms.push_back({mu});
    spec.environment.num_players = o.players;
    spec.algorithm.kind = AlgorithmKind::kEstimateM;
    spec.algorithm.mu_lower = o.mu;
    spec.algorithm.delta = o.delta;
    spec.environment.horizon = 1;
    spec.environment.horizon = spec.GameRounds();
    spec = FinishSpec(spec, o.spec);
  }
  const EstimateMSchedule sched = ComputeEstimateMSchedule(
      {spec.environment.num_arms(), *spec.algorithm.mu_lower, spec.algorithm.delta});
  const ExperimentResult r = RunExperiment(spec, o.workers);
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"replication", row.replication},
                    {"seed", row.seed},
                    {"recovered", row.recovered_players ? ordered_json(*row.recovered_players)
                                                        : ordered_json(nullptr)},
                    {"all_players_correct", row.success}});
  }
  out << ordered_json{{"num_arms", spec.environment.num_arms()},
                      {"num_players", spec.environment.num_players},
                      {"epsilon", sched.epsilon},
                      {"sigma_rounds", sched.sigma_rounds},
                      {"block_length", sched.block_length},
                      {"probe_iterations", sched.probe_iterations},
                      {"total_rounds", sched.total_rounds},
                      {"success_rate", r.success_rate},
                      {"replications", rows}}
             .dump(2)
      << '\n';
  return kExitOk;
}

// ---- replay ----------------------------------------------------------------

struct ReplayOptions {
  SpecOptions spec;
  std::string trace;
  int replication = 0;
};

int DoReplay(const ReplayOptions& o, std::ostream& out) {
  const ExperimentSpec spec = FinishSpec(ExperimentSpecFromConfig(LoadDocument(o.spec)), o.spec);
  std::ifstream in(o.trace);
  if (!in) throw IoError("cannot read trace '" + o.trace + "'");
  const auto stored = ReadTraceCsv(in, spec.environment.num_arms());
  const ReplicationRun run = RunReplication(spec, o.replication, TraceFidelity::kFull);
  const TraceDiff diff = DiffTraces(stored, run.trace.records);
  if (diff.identical) {
    out << "identical: " << stored.size() << " rounds\n";
    return kExitOk;
  }
  out << "divergence at round " << *diff.first_divergent_round << ": " << diff.detail
      << '\n';
  return kExitRuntime;
}

}  // namespace

int Main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiplayer stochastic bandit simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  AddSpecOptions(run_cmd, run.spec);
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--trace-out", run.trace_out,
                      "Also write the full trace of replication 0 as CSV");
  run_cmd->add_option("--workers", run.workers, "Worker threads (default MPB_WORKERS)");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Vary one parameter over a list");
  AddSpecOptions(sweep_cmd, sweep.spec);
  sweep_cmd->add_option("--param", sweep.param, "Parameter alias or section.key")
      ->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required();
  sweep_cmd->add_option("--out", sweep.out_dir, "Output directory");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run an analysis oracle");
  verify_cmd->require_subcommand(1);
  auto* v_l4 = verify_cmd->add_subcommand("lemma4", "Interval-uniqueness grid scan");
  v_l4->add_option("--p", verify.ps, "Ratio bases (> 1)");
  v_l4->add_option("--width", verify.width, "Width exponent of the intervals");
  auto* v_l5 = verify_cmd->add_subcommand("lemma5", "Positive-probability bound");
  v_l5->add_option("--mu", verify.mu, "Mean");
  v_l5->add_option("--sigma", verify.sigma, "Scale");
  v_l5->add_option("--samples", verify.samples, "Sample count (>= 1e5)");
  v_l5->add_option("--seed", verify.seed, "Seed");
  auto* v_nash = verify_cmd->add_subcommand("nash", "Epsilon-Nash check");
  v_nash->add_option("--means", verify.means, "Per-player means, rows split by ';'")
      ->required();
  v_nash->add_option("--assignment", verify.assignment, "Actions, 0 = dummy")
      ->required();
  v_nash->add_option("--epsilon", verify.epsilon, "Tolerance");
  auto* v_trend = verify_cmd->add_subcommand("trend", "Classify regret growth");
  v_trend->add_option("--checkpoints", verify.checkpoints, "Checkpoint CSV")->required();
  auto* v_audit = verify_cmd->add_subcommand("audit", "Audit alg2 classifications");
  AddSpecOptions(v_audit, verify.spec);

  EstimateOptions est;
  auto* est_cmd = app.add_subcommand("estimate-m", "Estimate the number of players");
  AddSpecOptions(est_cmd, est.spec, false);
  est_cmd->add_option("--means", est.means, "Comma-separated Bernoulli means");
  est_cmd->add_option("--players", est.players, "True number of players");
  est_cmd->add_option("--mu", est.mu, "Lower bound on the best mean");
  est_cmd->add_option("--delta", est.delta, "Failure probability");
  est_cmd->add_option("--workers", est.workers, "Worker threads");

  ReplayOptions replay;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a game and diff its trace");
  AddSpecOptions(replay_cmd, replay.spec);
  replay_cmd->add_option("--trace", replay.trace, "Stored trace CSV")->required();
  replay_cmd->add_option("--replication", replay.replication, "Replication index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*run_cmd) return DoRun(run, out);
    if (*sweep_cmd) return DoSweep(sweep, out);
    if (*verify_cmd) {
      if (*v_l4) return VerifyLemma4(verify, out);
      if (*v_l5) return VerifyLemma5(verify, out);
      if (*v_nash) return VerifyNashCmd(verify, out);
      if (*v_trend) return VerifyTrend(verify, out);
      if (*v_audit) return VerifyAudit(verify, out);
    }
    if (*est_cmd) return DoEstimateM(est, out);
    if (*replay_cmd) return DoReplay(replay, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mpbandit::cli
