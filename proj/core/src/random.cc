#include "mpbandit/random.h"

#include <cmath>
#include <numbers>

namespace mpbandit {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, ctr[0], hi0, lo0);
    MulHiLo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t substream)
    : key_(key), substream_(substream) {}

RandomStream::result_type RandomStream::operator()() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(substream_),
      static_cast<std::uint32_t>(substream_ >> 32)};
  const std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key_),
                                          static_cast<std::uint32_t>(key_ >> 32)};
  const auto out = Philox4x32(ctr, k);
  ++block_;
  spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  have_spare_ = true;
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double RandomStream::UniformDouble() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

__extension__ using Uint128 = unsigned __int128;

std::int64_t RandomStream::UniformIndex(std::int64_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  const auto range = static_cast<std::uint64_t>(n);
  Uint128 m = static_cast<Uint128>((*this)()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<Uint128>((*this)()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::int64_t>(m >> 64);
}

double RandomStream::StandardNormal() {
  // Box-Muller; u1 on (0, 1] keeps the log finite.
  const double u1 = 1.0 - UniformDouble();
  const double u2 = UniformDouble();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t DeriveStreamKey(std::uint64_t master_seed, StreamKind kind,
                              std::uint64_t index) {
  const std::uint64_t tag =
      (static_cast<std::uint64_t>(kind) << 56) ^ SplitMix64(index);
  return SplitMix64(SplitMix64(master_seed) ^ tag);
}

namespace {

std::uint64_t ArmPlayerIndex(int arm, int player) {
  return (static_cast<std::uint64_t>(arm) << 32) | static_cast<std::uint32_t>(player);
}

}  // namespace

StreamSet::StreamSet(std::uint64_t master_seed, int num_arms, int num_players)
    : master_seed_(master_seed), num_arms_(num_arms), num_players_(num_players) {
  for (int i = 1; i <= num_arms; ++i) {
    arm_keys_.push_back(DeriveStreamKey(master_seed, StreamKind::kArm,
                                        static_cast<std::uint64_t>(i)));
    for (int j = 0; j < num_players; ++j) {
      arm_player_keys_.push_back(
          DeriveStreamKey(master_seed, StreamKind::kArmPlayer, ArmPlayerIndex(i, j)));
    }
  }
}

RandomStream StreamSet::ArmRound(int arm, std::int64_t round) const {
  const std::uint64_t key =
      arm >= 1 && arm <= num_arms_
          ? arm_keys_[arm - 1]
          : DeriveStreamKey(master_seed_, StreamKind::kArm, static_cast<std::uint64_t>(arm));
  return RandomStream(key, static_cast<std::uint64_t>(round));
}

RandomStream StreamSet::ArmPlayerRound(int arm, int player,
                                       std::int64_t round) const {
  const std::uint64_t key =
      arm >= 1 && arm <= num_arms_ && player >= 0 && player < num_players_
          ? arm_player_keys_[static_cast<std::size_t>(arm - 1) * num_players_ + player]
          : DeriveStreamKey(master_seed_, StreamKind::kArmPlayer,
                            ArmPlayerIndex(arm, player));
  return RandomStream(key, static_cast<std::uint64_t>(round));
}

RandomStream StreamSet::Player(int player) const {
  return RandomStream(DeriveStreamKey(master_seed_, StreamKind::kPlayer,
                                      static_cast<std::uint64_t>(player)),
                      0);
}

RandomStream StreamSet::Engine() const {
  return RandomStream(DeriveStreamKey(master_seed_, StreamKind::kEngine, 0), 0);
}

}  // namespace mpbandit
