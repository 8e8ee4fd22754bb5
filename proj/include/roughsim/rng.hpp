#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace roughsim {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Named sub-streams of one seed.
enum class Stream : std::uint32_t { shocks = 0, hybrid_aux = 1, exact = 2 };

/// Random block addressed by (seed, stream, path, index); no state is shared
/// between paths, so results do not depend on the order of evaluation.
inline Philox4x32::Counter random_block(std::uint64_t seed, Stream stream, std::uint64_t path,
                                        std::uint64_t index) noexcept {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(stream) ^
                                       (static_cast<std::uint32_t>(index >> 32) << 8),
                                   static_cast<std::uint32_t>(path),
                                   static_cast<std::uint32_t>(path >> 32)};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  return Philox4x32::generate(ctr, key);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform53(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (std::uint64_t{hi >> 5} << 26) | (lo >> 6);
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Two independent standard normals from one block (Box-Muller).
inline std::array<double, 2> normal_pair(const Philox4x32::Counter& block) noexcept {
  const double u1 = 1.0 - uniform53(block[0], block[1]);  // (0, 1]
  const double u2 = uniform53(block[2], block[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

/// Two independent Rademacher signs from one block.
inline std::array<double, 2> rademacher_pair(const Philox4x32::Counter& block) noexcept {
  return {(block[0] & 1u) ? 1.0 : -1.0, (block[1] & 1u) ? 1.0 : -1.0};
}

}  // namespace roughsim
