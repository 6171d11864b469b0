#include "mpbandit/epoch_player.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpbandit/errors.h"

namespace mpbandit {

double EpochConfidenceConstant(const EpochParams& p) {
  const double k = p.num_arms;
  const double m = p.num_players;
  const double t = static_cast<double>(p.horizon);
  return p.c_scale * std::log(4.0 * m * m * m * t * t * k) / 2.0;
}

std::int64_t EpochChairsBudget(const EpochParams& p) {
  const double k = p.num_arms;
  const double m = p.num_players;
  const double t = static_cast<double>(p.horizon);
  double alpha = p.c_scale * 4.0 * k * std::log(6.0 * k * m * m * t);
  if (p.variant != EpochVariant::kCollisionSensing) alpha /= p.mu_lower;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(alpha)));
}

std::int64_t EpochLength(const EpochParams& p, int epoch) {
  const std::int64_t alpha = EpochChairsBudget(p);
  const std::int64_t iterations = p.num_arms + p.num_players - 1;
  return alpha + iterations * (2 * alpha + (std::int64_t{1} << epoch));
}

ArmBook::ArmBook(int num_arms)
    : cls(num_arms, ArmClass::kSilver),
      estimate(num_arms, 0.0),
      halfwidth(num_arms, std::numeric_limits<double>::infinity()),
      explored(num_arms, false) {}

int ArmBook::Count(ArmClass c) const {
  return static_cast<int>(std::count(cls.begin(), cls.end(), c));
}

std::vector<Arm> ArmBook::Members(ArmClass c) const {
  std::vector<Arm> out;
  for (int i = 0; i < num_arms(); ++i) {
    if (cls[i] == c) out.push_back(i + 1);
  }
  return out;
}

std::vector<Arm> ArmBook::UnexploredSilver() const {
  std::vector<Arm> out;
  for (int i = 0; i < num_arms(); ++i) {
    if (cls[i] == ArmClass::kSilver && !explored[i]) out.push_back(i + 1);
  }
  return out;
}

void ClassifyUnexplored(ArmBook& book, double threshold) {
  for (int i = 0; i < book.num_arms(); ++i) {
    if (book.cls[i] != ArmClass::kSilver || book.explored[i]) continue;
    // An unexplored silver arm is either below the threshold or held as
    // golden by someone else.
    book.cls[i] = book.estimate[i] - book.halfwidth[i] > threshold
                      ? ArmClass::kGolden
                      : ArmClass::kBad;
  }
}

void UpdateClassifications(ArmBook& book, int num_players, double h,
                           std::optional<double> mu_lower) {
  const int k = book.num_arms();
  const std::vector<ArmClass> before = book.cls;
  const int golden = static_cast<int>(
      std::count(before.begin(), before.end(), ArmClass::kGolden));
  const int bad = static_cast<int>(
      std::count(before.begin(), before.end(), ArmClass::kBad));
  const int need_above = num_players - golden;
  const int need_below = k - num_players - bad;
  for (int j = 0; j < k; ++j) {
    if (before[j] != ArmClass::kSilver) continue;
    const double upper = book.estimate[j] + h;
    const double lower = book.estimate[j] - h;
    int above = 0;
    int below = 0;
    for (int l = 0; l < k; ++l) {
      if (before[l] != ArmClass::kSilver) continue;
      if (book.estimate[l] - h > upper) ++above;
      if (book.estimate[l] + h < lower) ++below;
    }
    if (above >= need_above) {
      book.cls[j] = ArmClass::kBad;
    } else if ((!mu_lower || book.estimate[j] > *mu_lower + 3.0 * h) &&
               below >= need_below) {
      book.cls[j] = ArmClass::kGolden;
    }
  }
}

EpochPlayer::EpochPlayer(const EpochParams& params, int player_index,
                         EpochAuditLog* audit)
    : params_(params),
      player_index_(player_index),
      audit_(audit),
      g_(EpochConfidenceConstant(params)),
      alpha_(EpochChairsBudget(params)),
      rule_(params.variant == EpochVariant::kCollisionSensing ? ChairsRule::kMc3
                                                              : ChairsRule::kMc2),
      book_(params.num_arms) {
  if (params.num_players > params.num_arms) {
    throw ContractViolation("epoch player requires m <= K");
  }
  if (params.variant != EpochVariant::kCollisionSensing &&
      !(params.mu_lower > 0.0)) {
    throw ContractViolation("epoch player needs a positive mu_lower");
  }
  BeginEpoch();
}

void EpochPlayer::LogBlock(EpochAuditLog::Step step, bool ran_chairs,
                           std::vector<Arm> targets) {
  if (audit_ == nullptr) return;
  audit_->blocks.push_back({player_index_, epoch_, step, segment_start_,
                            ran_chairs, std::move(targets), held_});
}

void EpochPlayer::BeginEpoch() {
  ++epoch_;
  iteration_ = 0;
  segment_ = Segment::kGolden;
  segment_start_ = rounds_seen_ + 1;
  remaining_ = alpha_;
  held_ = kNoArm;
  chairs_.emplace(rule_, params_.num_arms, book_.Members(ArmClass::kGolden),
                  alpha_);
}

void EpochPlayer::BeginExplore() {
  segment_ = Segment::kExplore;
  segment_start_ = rounds_seen_ + 1;
  remaining_ = alpha_;
  held_ = kNoArm;
  const auto unexplored = book_.UnexploredSilver();
  if (unexplored.empty()) {
    chairs_.reset();
  } else {
    chairs_.emplace(rule_, params_.num_arms, unexplored, alpha_);
  }
}

void EpochPlayer::BeginSecure() {
  segment_ = Segment::kSecure;
  segment_start_ = rounds_seen_ + 1;
  remaining_ = alpha_;
  if (held_ == kNoArm) {
    chairs_.emplace(rule_, params_.num_arms, book_.Members(ArmClass::kSilver),
                    alpha_);
  } else {
    chairs_.reset();
  }
}

void EpochPlayer::BeginEstimate() {
  segment_ = Segment::kEstimate;
  segment_start_ = rounds_seen_ + 1;
  remaining_ = std::int64_t{1} << epoch_;
  estimate_sum_ = 0.0;
  chairs_.reset();
}

void EpochPlayer::EndEpoch() {
  ClassifyUnexplored(book_, params_.variant == EpochVariant::kCollisionSensing
                                ? 0.0
                                : params_.mu_lower);
  const double h = std::sqrt(g_ / static_cast<double>(std::int64_t{1} << epoch_));
  std::optional<double> mu;
  if (params_.variant != EpochVariant::kCollisionSensing) mu = params_.mu_lower;
  UpdateClassifications(book_, params_.num_players, h, mu);
  if (audit_ != nullptr) {
    audit_->snapshots.push_back({player_index_, epoch_, rounds_seen_, book_.cls});
  }
  std::fill(book_.explored.begin(), book_.explored.end(), false);
  BeginEpoch();
}

void EpochPlayer::Advance() {
  switch (segment_) {
    case Segment::kGolden: {
      const Arm won = chairs_->occupied_arm();
      held_ = won;
      LogBlock(EpochAuditLog::Step::kGolden, true, chairs_->targets());
      if (won != kNoArm) {
        golden_ = won;
        if (audit_ != nullptr) {
          audit_->golden_claims.push_back(
              {player_index_, epoch_, segment_start_, won});
        }
        chairs_.reset();
        return;
      }
      std::fill(book_.explored.begin(), book_.explored.end(), false);
      iteration_ = 1;
      BeginExplore();
      return;
    }
    case Segment::kExplore: {
      const bool ran = chairs_.has_value();
      std::vector<Arm> targets;
      if (ran) {
        held_ = chairs_->occupied_arm();
        targets = chairs_->targets();
      }
      LogBlock(EpochAuditLog::Step::kExplore, ran, std::move(targets));
      BeginSecure();
      return;
    }
    case Segment::kSecure: {
      const bool ran = chairs_.has_value();
      std::vector<Arm> targets;
      if (ran) {
        held_ = chairs_->occupied_arm();
        targets = chairs_->targets();
      }
      LogBlock(EpochAuditLog::Step::kSecure, ran, std::move(targets));
      if (held_ == kNoArm && params_.variant == EpochVariant::kLeaving) {
        left_ = true;
        chairs_.reset();
        return;
      }
      BeginEstimate();
      return;
    }
    case Segment::kEstimate: {
      if (held_ != kNoArm) {
        const auto n = static_cast<double>(std::int64_t{1} << epoch_);
        const int idx = held_ - 1;
        book_.estimate[idx] = estimate_sum_ / n;
        book_.halfwidth[idx] = std::sqrt(g_ / n);
        book_.explored[idx] = true;
        if (audit_ != nullptr) {
          audit_->estimates.push_back({player_index_, epoch_, held_,
                                       book_.estimate[idx], book_.halfwidth[idx]});
        }
      }
      if (++iteration_ <= params_.num_arms + params_.num_players - 1) {
        BeginExplore();
      } else {
        EndEpoch();
      }
      return;
    }
  }
}

Arm EpochPlayer::ChooseAction(RandomStream& rng) {
  if (left_) return kNoArm;
  if (golden_ != kNoArm) return golden_;
  if (chairs_) return chairs_->ChooseAction(rng);
  if (held_ != kNoArm) return held_;
  return static_cast<Arm>(rng.UniformIndex(params_.num_arms)) + 1;
}

void EpochPlayer::Observe(const Observation& obs) {
  ++rounds_seen_;
  if (left_ || golden_ != kNoArm) return;
  if (chairs_) {
    std::optional<bool> flag;
    if (rule_ == ChairsRule::kMc3) {
      if (!obs.collision) {
        throw ContractViolation(
            "collision-sensing variant needs collision feedback");
      }
      flag = obs.collision;
    }
    chairs_->Observe(obs.arm, obs.reward, flag);
  }
  if (segment_ == Segment::kEstimate && held_ != kNoArm) {
    estimate_sum_ += obs.reward;
  }
  if (--remaining_ == 0) Advance();
}

std::string_view EpochPlayer::Phase() const {
  if (left_) return "left";
  if (golden_ != kNoArm) return "golden";
  switch (segment_) {
    case Segment::kGolden:
      return "golden-search";
    case Segment::kExplore:
      return "explore";
    case Segment::kSecure:
      return "secure";
    case Segment::kEstimate:
      return "estimate";
  }
  return "?";
}

}  // namespace mpbandit
