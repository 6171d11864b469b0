#include "mpbandit/doubling.h"

#include <algorithm>
#include <utility>

#include "mpbandit/errors.h"

namespace mpbandit {

std::vector<DoublingSegment> DoublingSchedule(std::int64_t horizon) {
  std::vector<DoublingSegment> out;
  std::int64_t first = 1;
  for (std::int64_t guess = 1; first <= horizon; guess *= 2) {
    out.push_back({first, std::min(guess, horizon - first + 1), guess});
    first += guess;
  }
  return out;
}

DoublingPlayer::DoublingPlayer(HorizonPlayerFactory factory)
    : factory_(std::move(factory)) {
  if (!factory_) throw ContractViolation("doubling: empty inner factory");
  inner_ = factory_(guess_);
}

Arm DoublingPlayer::ChooseAction(RandomStream& rng) {
  return inner_->ChooseAction(rng);
}

void DoublingPlayer::Observe(const Observation& observation) {
  inner_->Observe(observation);
  if (++used_ == guess_) {
    guess_ *= 2;
    used_ = 0;
    ++restarts_;
    inner_ = factory_(guess_);
  }
}

}  // namespace mpbandit
