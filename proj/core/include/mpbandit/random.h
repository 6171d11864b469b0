#ifndef MPBANDIT_RANDOM_H_
#define MPBANDIT_RANDOM_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace mpbandit {

// Philox4x32-10 block function (Salmon et al.). Maps a 128-bit counter and a
// 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Counter-based random stream. The 128-bit Philox counter is split into a
// 64-bit substream selector and a 64-bit position, so any (key, substream)
// pair can be opened at random access without touching other substreams.
//
// Satisfies UniformRandomBitGenerator, but the library never routes it through
// <random> distributions: those are implementation-defined and would break
// bit-exact replay across standard libraries.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t key, std::uint64_t substream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 bits of precision.
  double UniformDouble();
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::int64_t UniformIndex(std::int64_t n);
  double StandardNormal();

  std::uint64_t key() const { return key_; }
  std::uint64_t substream() const { return substream_; }
  // Number of 64-bit words drawn so far.
  std::uint64_t position() const { return 2 * block_ - (have_spare_ ? 1 : 0); }

 private:
  std::uint64_t key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

std::uint64_t SplitMix64(std::uint64_t x);

enum class StreamKind : std::uint8_t {
  kArm = 1,
  kPlayer = 2,
  kEngine = 3,
  kArmPlayer = 4,
};

// Derives a stream key from the master seed. Keys for distinct
// (kind, index) pairs are independent for practical purposes.
std::uint64_t DeriveStreamKey(std::uint64_t master_seed, StreamKind kind,
                              std::uint64_t index);

// The K + m + 1 independent streams that drive one game: one per arm's
// rewards, one per player's private decisions, one for the engine.
class StreamSet {
 public:
  StreamSet(std::uint64_t master_seed, int num_arms, int num_players);

  // Reward stream of `arm` (1-based) positioned at `round`.
  RandomStream ArmRound(int arm, std::int64_t round) const;
  // Per-player reward stream of `arm` (used for per-player means).
  RandomStream ArmPlayerRound(int arm, int player, std::int64_t round) const;
  // Decision stream of `player` (0-based). Fresh from position zero.
  RandomStream Player(int player) const;
  RandomStream Engine() const;

  std::uint64_t master_seed() const { return master_seed_; }

 private:
  std::uint64_t master_seed_;
  int num_arms_;
  int num_players_;
  // Keys derived once; the reward streams are opened every round.
  std::vector<std::uint64_t> arm_keys_;         // by arm - 1
  std::vector<std::uint64_t> arm_player_keys_;  // by (arm - 1) * m + player
};

}  // namespace mpbandit

#endif  // MPBANDIT_RANDOM_H_
