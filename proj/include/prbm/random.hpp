#pragma once

// Counter-based random streams.
//
// Every draw is addressed by (key, stream id, draw index) and computed with
// Philox4x32-10, so a draw never depends on how many other streams were
// consumed before it. Streams form a tree: child(tag) derives a new stream
// address from the parent address and a tag, which lets callers key draws by
// e.g. (iteration, parameter index, sample index, trajectory).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace prbm {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{detail::kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{detail::kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return ctr;
}

/// One addressable random stream. Draw i of a stream is the Philox block at
/// counter (i, id) under the stream key; each uniform() or normal() call
/// consumes exactly one block.
class Stream {
 public:
  explicit Stream(std::uint64_t key, std::uint64_t id = 0) : key_(key), id_(id) {}

  /// Derived stream; independent of the parent's draw position.
  [[nodiscard]] Stream child(std::uint64_t tag) const {
    const std::uint64_t k = detail::splitmix64(key_ ^ detail::splitmix64(id_ + 0x632BE59BD9B4E019ull));
    return Stream(k, tag);
  }

  [[nodiscard]] Stream child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

  [[nodiscard]] Stream child(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return child(a).child(b).child(c);
  }

  /// Block at an explicit draw index; does not advance the stream.
  [[nodiscard]] PhiloxCounter block_at(std::uint64_t index) const {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                            static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    return philox4x32_10(ctr, key);
  }

  PhiloxCounter next_block() { return block_at(position_++); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return to_open_unit(next_block(), 0); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller on the two halves of one block.
  double normal() {
    const PhiloxCounter b = next_block();
    const double u1 = to_open_unit(b, 0);
    const double u2 = to_open_unit(b, 2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  [[nodiscard]] std::uint64_t position() const { return position_; }
  void seek(std::uint64_t index) { position_ = index; }

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t id() const { return id_; }

 private:
  static double to_open_unit(const PhiloxCounter& b, int offset) {
    const std::uint64_t bits = (std::uint64_t{b[offset]} << 32) | b[offset + 1];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t id_;
  std::uint64_t position_ = 0;
};

}  // namespace prbm
