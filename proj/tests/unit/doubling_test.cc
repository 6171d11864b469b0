#include "mpbandit/doubling.h"

#include <gtest/gtest.h>

namespace mpbandit {
namespace {

// Counts observations and reports the horizon it was built for.
class ProbePlayer : public Player {
 public:
  explicit ProbePlayer(std::int64_t horizon) : horizon_(horizon) {}
  Arm ChooseAction(RandomStream&) override { return 1; }
  void Observe(const Observation&) override { ++seen_; }
  std::string_view Phase() const override { return "probe"; }
  bool HasLeft() const override { return seen_ >= horizon_ && horizon_ >= 8; }

  std::int64_t horizon_;
  std::int64_t seen_ = 0;
};

TEST(DoublingScheduleTest, TruncatesTheLastSegment) {
  const auto s = DoublingSchedule(5);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].first_round, 1);
  EXPECT_EQ(s[1].first_round, 2);
  EXPECT_EQ(s[2].first_round, 4);
  EXPECT_EQ(s[2].length, 2);
  EXPECT_EQ(s[2].guess, 4);
}

TEST(DoublingScheduleTest, SegmentsTileTheHorizon) {
  for (std::int64_t T : {1, 2, 3, 7, 8, 9, 1000, 65536}) {
    std::int64_t next = 1;
    std::int64_t guess = 1;
    for (const auto& seg : DoublingSchedule(T)) {
      EXPECT_EQ(seg.first_round, next);
      EXPECT_EQ(seg.guess, guess);
      EXPECT_LE(seg.length, seg.guess);
      EXPECT_GE(seg.length, 1);
      next += seg.length;
      guess *= 2;
    }
    EXPECT_EQ(next, T + 1);
  }
}

TEST(DoublingPlayerTest, RebuildsAtEachBoundaryWithDoubledGuess) {
  std::vector<std::int64_t> built;
  DoublingPlayer p([&](std::int64_t h) {
    built.push_back(h);
    return std::make_unique<ProbePlayer>(h);
  });
  RandomStream rng(0, 0);
  for (int t = 1; t <= 20; ++t) {
    p.ChooseAction(rng);
    p.Observe({1, 1.0, std::nullopt});
  }
  // Rounds 1 | 2-3 | 4-7 | 8-15 | 16-20.
  EXPECT_EQ(built, (std::vector<std::int64_t>{1, 2, 4, 8, 16}));
  EXPECT_EQ(p.restarts(), 4);
  EXPECT_EQ(p.guess(), 16);
  EXPECT_EQ(p.used(), 5);
  EXPECT_EQ(static_cast<const ProbePlayer&>(p.inner()).seen_, 5);
  EXPECT_EQ(p.Phase(), "probe");
}

TEST(DoublingPlayerTest, LeavingIsDelegated) {
  DoublingPlayer p([](std::int64_t h) { return std::make_unique<ProbePlayer>(h); });
  RandomStream rng(0, 0);
  for (int t = 1; t <= 14; ++t) {
    p.ChooseAction(rng);
    p.Observe({1, 1.0, std::nullopt});
  }
  EXPECT_FALSE(p.HasLeft());
  p.ChooseAction(rng);
  p.Observe({1, 1.0, std::nullopt});
  // The guess-8 segment has just closed, so a fresh inner player is active.
  EXPECT_EQ(p.guess(), 16);
  EXPECT_FALSE(p.HasLeft());
}

}  // namespace
}  // namespace mpbandit
