#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace anng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A pure function of (counter, key): every coin and every per-trial seed in
/// the library is derived through it, so results never depend on call order
/// or on how work is split across threads.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

namespace detail {

constexpr std::uint32_t lo32(std::uint64_t v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t hi32(std::uint64_t v) noexcept { return static_cast<std::uint32_t>(v >> 32); }

constexpr Philox4x32::Key key_of(std::uint64_t seed) noexcept { return {lo32(seed), hi32(seed)}; }

constexpr Philox4x32::Counter counter_of(std::uint64_t a, std::uint64_t b) noexcept {
  return {lo32(a), hi32(a), lo32(b), hi32(b)};
}

// 53 high-quality bits -> [0, 1).
constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

// Derived seeds live in a different key space than the coins.
inline constexpr std::uint64_t kDeriveTweak = 0x243F6A8885A308D3ull;

}  // namespace detail

/// The coin c_{i,j} for the directed pair i -> j, as a uniform value in [0, 1).
/// An edge whose retention probability is `prob` survives iff coin < prob.
inline double coin_flip(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  if (i == j) throw std::invalid_argument("coin_flip: self pair (i == j) has no coin");
  const auto out = Philox4x32::apply(detail::counter_of(i, j), detail::key_of(seed));
  return detail::to_unit(out[0], out[1]);
}

/// Deterministic 64-bit seed for sub-stream (stream, index) of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  const auto out = Philox4x32::apply(detail::counter_of(stream, index),
                                     detail::key_of(seed ^ detail::kDeriveTweak));
  return (std::uint64_t{out[0]} << 32) | out[1];
}

/// Stream identifiers used with derive_seed.
namespace streams {
inline constexpr std::uint64_t kDataset = 1;
inline constexpr std::uint64_t kQuery = 2;
inline constexpr std::uint64_t kStart = 3;
inline constexpr std::uint64_t kGraph = 4;
inline constexpr std::uint64_t kGeometry = 5;
inline constexpr std::uint64_t kTrialDataset = 6;
inline constexpr std::uint64_t kChebyshev = 7;
}  // namespace streams

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng{derive_seed(seed, stream, index)};
}

}  // namespace anng
