#include "mpbandit/estimate_m.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "mpbandit/errors.h"

namespace mpbandit {

namespace {

std::int64_t CeilRounds(double x) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x)));
}

}  // namespace

EstimateMSchedule ComputeEstimateMSchedule(const EstimateMParams& p) {
  if (p.num_arms < 2) throw ContractViolation("estimate-m: need K >= 2");
  if (!(p.mu_lower > 0.0 && p.mu_lower <= 1.0)) {
    throw ContractViolation("estimate-m: mu_lower must lie in (0, 1]");
  }
  if (!(p.delta > 0.0 && p.delta < 1.0)) {
    throw ContractViolation("estimate-m: delta must lie in (0, 1)");
  }
  const double k = p.num_arms;
  EstimateMSchedule s;
  s.epsilon = p.mu_lower * (std::pow(1.0 - 1.0 / k, -0.4) - 1.0) / 48.0;
  const double eps2 = s.epsilon * s.epsilon;
  s.sigma_rounds = CeilRounds(8.0 * k * std::log(k * k / (9.0 * p.delta)) / eps2);
  s.block_length = CeilRounds(std::log(6.0 / p.delta) / eps2);
  s.probe_iterations =
      CeilRounds(4.0 * k * std::log(6.0 * k / (p.mu_lower * p.delta)));
  s.total_rounds = s.sigma_rounds + s.probe_iterations * s.block_length;
  return s;
}

RecoveryScan ScanPlayerCount(double mu_hat, double sigma, double epsilon,
                             int num_arms) {
  if (num_arms < 2) throw ContractViolation("recover m: need K >= 2");
  if (!(mu_hat - epsilon > 0.0) || !(sigma - epsilon > 0.0)) {
    throw ContractViolation("recover m: need mu_hat - eps > 0 and sigma - eps > 0");
  }
  const double q = 1.0 - 1.0 / num_arms;
  const double lo = sigma - epsilon;
  const double hi = sigma + epsilon;
  RecoveryScan scan;
  double scale = 1.0;
  for (int m = 1;; ++m, scale *= q) {
    const double a = (mu_hat - epsilon) * scale;
    const double b = (mu_hat + epsilon) * scale;
    scan.m_max = m;
    if (b < lo) break;
    if (a <= hi) scan.candidates.push_back(m);
  }
  return scan;
}

int RecoverPlayerCount(double mu_hat, double sigma, double epsilon,
                       int num_arms) {
  RecoveryScan scan = ScanPlayerCount(mu_hat, sigma, epsilon, num_arms);
  if (scan.candidates.empty()) {
    std::ostringstream os;
    os << "recover m: no m in 1.." << scan.m_max << " matches mu_hat=" << mu_hat
       << " sigma=" << sigma << " eps=" << epsilon;
    throw NoCandidateError(os.str());
  }
  if (scan.candidates.size() > 1) {
    std::ostringstream os;
    os << "recover m: " << scan.candidates.size() << " candidates match";
    throw AmbiguityError(os.str(), std::move(scan.candidates));
  }
  return scan.candidates.front();
}

EstimateMPlayer::EstimateMPlayer(const EstimateMParams& params)
    : params_(params),
      schedule_(ComputeEstimateMSchedule(params)),
      sums_(params.num_arms, 0.0),
      pulls_(params.num_arms, 0),
      sigma_(params.num_arms, 0.0) {}

Arm EstimateMPlayer::ChooseAction(RandomStream& rng) {
  const auto k = params_.num_arms;
  switch (stage_) {
    case Stage::kSigma:
      return static_cast<Arm>(rng.UniformIndex(k)) + 1;
    case Stage::kProbe:
    case Stage::kDone:
      if (block_pos_ == 0) block_arm_ = static_cast<Arm>(rng.UniformIndex(k)) + 1;
      return block_arm_;
    case Stage::kFinished:
      return static_cast<Arm>(rng.UniformIndex(k)) + 1;
  }
  return kNoArm;
}

void EstimateMPlayer::EndBlock() {
  ++probes_done_;
  block_pos_ = 0;
  if (stage_ == Stage::kProbe && block_arm_ == best_ && block_sum_ > 0.0) {
    block_mean_ = block_sum_ / static_cast<double>(schedule_.block_length);
    try {
      m_out_ = RecoverPlayerCount(*block_mean_, sigma_[best_ - 1],
                                  schedule_.epsilon, params_.num_arms);
    } catch (const Error& e) {
      failure_ = e.what();
    }
    stage_ = Stage::kDone;
  }
  block_sum_ = 0.0;
}

void EstimateMPlayer::Observe(const Observation& obs) {
  ++rounds_;
  switch (stage_) {
    case Stage::kSigma:
      sums_[obs.arm - 1] += obs.reward;
      ++pulls_[obs.arm - 1];
      if (rounds_ == schedule_.sigma_rounds) {
        for (int i = 0; i < params_.num_arms; ++i) {
          sigma_[i] = pulls_[i] > 0 ? sums_[i] / static_cast<double>(pulls_[i]) : 0.0;
        }
        best_ = static_cast<Arm>(std::max_element(sigma_.begin(), sigma_.end()) -
                                 sigma_.begin()) + 1;
        stage_ = Stage::kProbe;
      }
      break;
    case Stage::kProbe:
    case Stage::kDone:
      block_sum_ += obs.reward;
      if (++block_pos_ == schedule_.block_length) EndBlock();
      break;
    case Stage::kFinished:
      break;
  }
  if (finished()) stage_ = Stage::kFinished;
}

int EstimateMPlayer::Result() const {
  if (m_out_) return *m_out_;
  if (failure_) throw EstimationFailedError("estimate-m: " + *failure_);
  if (!finished()) throw ContractViolation("estimate-m: schedule not complete");
  throw EstimationFailedError("estimate-m: all probe iterations failed");
}

std::string_view EstimateMPlayer::Phase() const {
  switch (stage_) {
    case Stage::kSigma:
      return "sigma";
    case Stage::kProbe:
      return "probe";
    case Stage::kDone:
      return "probe-done";
    case Stage::kFinished:
      return "estimated";
  }
  return "?";
}

EstimateThenPlayer::EstimateThenPlayer(const EstimateMParams& params,
                                       std::int64_t horizon, KnownMFactory then)
    : estimator_(params), horizon_(horizon), then_(std::move(then)) {
  if (!then_) throw ContractViolation("estimate-then: empty downstream factory");
}

Arm EstimateThenPlayer::ChooseAction(RandomStream& rng) {
  if (inner_) return inner_->ChooseAction(rng);
  return estimator_.ChooseAction(rng);
}

void EstimateThenPlayer::Observe(const Observation& obs) {
  if (inner_) {
    inner_->Observe(obs);
    return;
  }
  estimator_.Observe(obs);
  if (!estimator_.finished()) return;
  const std::int64_t left = horizon_ - estimator_.rounds_played();
  if (left <= 0) return;
  const auto m = estimator_.recovered();
  assumed_ = m ? *m : static_cast<int>(estimator_.sigma().size());
  inner_ = then_(*assumed_, left);
}

std::string_view EstimateThenPlayer::Phase() const {
  if (inner_) return inner_->Phase();
  return estimator_.Phase();
}

}  // namespace mpbandit
