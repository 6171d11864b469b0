#ifndef MPBANDIT_DOUBLING_H_
#define MPBANDIT_DOUBLING_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "mpbandit/player.h"

namespace mpbandit {

// Builds a fresh known-horizon player for the given horizon guess.
using HorizonPlayerFactory =
    std::function<std::unique_ptr<Player>(std::int64_t horizon)>;

struct DoublingSegment {
  std::int64_t first_round;  // 1-based
  std::int64_t length;       // rounds actually played in this segment
  std::int64_t guess;        // horizon passed to the inner player
};

// Segments covering rounds 1..horizon: guesses 1, 2, 4, ..., the last one
// truncated at the horizon.
std::vector<DoublingSegment> DoublingSchedule(std::int64_t horizon);

// Unknown-horizon wrapper. Plays inner(1) for one round, inner(2) for two,
// inner(4) for four, ..., discarding all state at each boundary.
class DoublingPlayer : public Player {
 public:
  explicit DoublingPlayer(HorizonPlayerFactory factory);

  Arm ChooseAction(RandomStream& rng) override;
  void Observe(const Observation& observation) override;
  std::string_view Phase() const override { return inner_->Phase(); }
  bool HasLeft() const override { return inner_->HasLeft(); }

  std::int64_t guess() const { return guess_; }
  std::int64_t used() const { return used_; }
  int restarts() const { return restarts_; }
  const Player& inner() const { return *inner_; }

 private:
  HorizonPlayerFactory factory_;
  std::unique_ptr<Player> inner_;
  std::int64_t guess_ = 1;
  std::int64_t used_ = 0;
  int restarts_ = 0;
};

}  // namespace mpbandit

#endif  // MPBANDIT_DOUBLING_H_
