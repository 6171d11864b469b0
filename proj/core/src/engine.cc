#include "mpbandit/engine.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mpbandit/errors.h"

namespace mpbandit {

std::vector<std::int64_t> DefaultCheckpoints(std::int64_t horizon) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = 1024; t <= horizon; t *= 2) out.push_back(t);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

std::optional<std::int64_t> GameTrace::FixationRound() const {
  if (rounds_played > 0 && last_regret_round == rounds_played) return std::nullopt;
  return last_regret_round;
}

GameTrace RunGame(const Environment& env,
                  std::vector<std::unique_ptr<Player>>& players,
                  const GameOptions& options) {
  const EnvironmentConfig& config = env.config();
  const int m = config.num_players;
  if (static_cast<int>(players.size()) != m) {
    throw ContractViolation("run_game: got " + std::to_string(players.size()) +
                            " players for m=" + std::to_string(m));
  }
  const std::int64_t rounds = options.rounds > 0 ? options.rounds : config.horizon;
  std::vector<std::int64_t> checkpoints =
      options.checkpoints.empty() ? DefaultCheckpoints(rounds) : options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  std::erase_if(checkpoints, [&](std::int64_t t) { return t < 1 || t > rounds; });

  GameTrace trace;
  trace.config = config;
  trace.regret_mode = options.regret_mode;
  const bool full = options.fidelity == TraceFidelity::kFull;
  if (full) trace.records.reserve(static_cast<std::size_t>(rounds));

  RegretAccumulator regret(config, options.regret_mode);
  std::vector<RandomStream> rngs;
  rngs.reserve(m);
  for (int j = 0; j < m; ++j) rngs.push_back(env.streams().Player(j));

  const bool sense = config.feedback == Feedback::kRewardAndCollision;
  std::vector<Arm> actions(m, kNoArm);
  std::vector<bool> has_left(m, false);
  RoundOutcome outcome;
  auto next_checkpoint = checkpoints.begin();
  Observation obs;

  for (std::int64_t t = 1; t <= rounds; ++t) {
    for (int j = 0; j < m; ++j) {
      has_left[j] = players[j]->HasLeft();
      actions[j] = players[j]->ChooseAction(rngs[j]);
      if (has_left[j] && actions[j] != kNoArm) {
        throw InvalidActionError(j, t, actions[j]);
      }
    }
    env.Play(t, actions, has_left, outcome);
    regret.Add(t, actions, outcome.collision);
    if (full) {
      RoundRecord& rec = trace.records.emplace_back();
      rec.t = t;
      rec.actions = actions;
      rec.rewards = outcome.reward;
      rec.collisions = outcome.collision;
      rec.phases.reserve(m);
      for (int j = 0; j < m; ++j) rec.phases.emplace_back(players[j]->Phase());
    }
    for (int j = 0; j < m; ++j) {
      obs.arm = actions[j];
      obs.reward = outcome.reward[j];
      if (sense) {
        obs.collision = (*outcome.collision_observed)[j];
      } else {
        obs.collision.reset();
      }
      players[j]->Observe(obs);
    }
    while (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      trace.checkpoints.push_back({t, regret.cumulative()});
      ++next_checkpoint;
    }
  }

  trace.rounds_played = rounds;
  trace.final_regret = regret.cumulative();
  trace.last_regret_round = regret.last_positive_round();
  trace.final_actions = actions;
  for (int j = 0; j < m; ++j) {
    trace.final_has_left.push_back(players[j]->HasLeft());
    trace.final_phases.emplace_back(players[j]->Phase());
  }
  return trace;
}

GameTrace RunGame(const Environment& env, const PlayerFactory& factory,
                  const GameOptions& options) {
  std::vector<std::unique_ptr<Player>> players;
  for (int j = 0; j < env.num_players(); ++j) players.push_back(factory(j));
  return RunGame(env, players, options);
}

RegretLedger ComputeRegret(const GameTrace& trace, RegretMode mode) {
  RegretLedger ledger;
  ledger.mode = mode;
  RegretAccumulator acc(trace.config, mode);
  ledger.baseline = acc.baseline();
  ledger.cumulative.reserve(trace.records.size());
  for (const RoundRecord& rec : trace.records) {
    acc.Add(rec.t, rec.actions, rec.collisions);
    ledger.cumulative.push_back(acc.cumulative());
  }
  return ledger;
}

namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void WriteTraceCsv(const GameTrace& trace, std::ostream& out) {
  out << "t,player,action,reward,collided,phase\n";
  for (const RoundRecord& rec : trace.records) {
    for (std::size_t j = 0; j < rec.actions.size(); ++j) {
      const Arm a = rec.actions[j];
      const bool collided = a != kNoArm && rec.collisions[a - 1];
      out << rec.t << ',' << j << ',' << a << ',' << FormatDouble(rec.rewards[j])
          << ',' << (collided ? 1 : 0) << ',' << rec.phases[j] << '\n';
    }
  }
}

void WriteCheckpointCsv(const GameTrace& trace, std::ostream& out) {
  out << "t,cumulative_regret\n";
  for (const auto& c : trace.checkpoints) {
    out << c.t << ',' << FormatDouble(c.cumulative_regret) << '\n';
  }
}

namespace {

template <typename T>
T ParseNumber(std::string_view field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError("trace csv line " + std::to_string(line) + ": bad number '" +
                  std::string(field) + "'");
  }
  return value;
}

double ParseDouble(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw IoError("trace csv line " + std::to_string(line) + ": bad number '" +
                  field + "'");
  }
  return v;
}

}  // namespace

std::vector<RoundRecord> ReadTraceCsv(std::istream& in, int num_arms) {
  std::vector<RoundRecord> records;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IoError("trace csv: empty input");
  ++line_no;
  if (line != "t,player,action,reward,collided,phase") {
    throw IoError("trace csv: unexpected header '" + line + "'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 5 && !line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) {
      throw IoError("trace csv line " + std::to_string(line_no) +
                    ": expected 6 fields");
    }
    const auto t = ParseNumber<std::int64_t>(f[0], line_no);
    const auto player = ParseNumber<int>(f[1], line_no);
    const auto action = ParseNumber<int>(f[2], line_no);
    const double reward = ParseDouble(f[3], line_no);
    const auto collided = ParseNumber<int>(f[4], line_no);
    if (action < 0 || action > num_arms) {
      throw IoError("trace csv line " + std::to_string(line_no) +
                    ": action out of range");
    }
    if (records.empty() || records.back().t != t) {
      if (!records.empty() && t <= records.back().t) {
        throw IoError("trace csv line " + std::to_string(line_no) +
                      ": rounds out of order");
      }
      RoundRecord& rec = records.emplace_back();
      rec.t = t;
      rec.collisions.assign(num_arms, false);
    }
    RoundRecord& rec = records.back();
    if (player != static_cast<int>(rec.actions.size())) {
      throw IoError("trace csv line " + std::to_string(line_no) +
                    ": players out of order");
    }
    rec.actions.push_back(action);
    rec.rewards.push_back(reward);
    rec.phases.push_back(f[5]);
    if (action != kNoArm && collided) rec.collisions[action - 1] = true;
  }
  return records;
}

TraceDiff DiffTraces(const std::vector<RoundRecord>& expected,
                     const std::vector<RoundRecord>& actual) {
  TraceDiff diff;
  const std::size_t n = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    const RoundRecord& a = expected[i];
    const RoundRecord& b = actual[i];
    if (a == b) continue;
    diff.identical = false;
    diff.first_divergent_round = a.t;
    std::ostringstream os;
    os << "round " << a.t << ": ";
    if (a.t != b.t) {
      os << "round index " << a.t << " vs " << b.t;
    } else if (a.actions != b.actions) {
      os << "actions differ";
    } else if (a.rewards != b.rewards) {
      os << "rewards differ";
    } else if (a.collisions != b.collisions) {
      os << "collisions differ";
    } else {
      os << "phases differ";
    }
    diff.detail = os.str();
    return diff;
  }
  if (expected.size() != actual.size()) {
    diff.identical = false;
    diff.first_divergent_round =
        n < expected.size() ? expected[n].t : actual[n].t;
    diff.detail = "length " + std::to_string(expected.size()) + " vs " +
                  std::to_string(actual.size());
  }
  return diff;
}

}  // namespace mpbandit
