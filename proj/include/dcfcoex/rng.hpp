#ifndef DCFCOEX_RNG_HPP_
#define DCFCOEX_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace dcfcoex {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// The key holds (seed low, seed high) and the upper counter words hold the
/// stream id, so every station of a run draws from its own stream.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr const char* kName = "philox4x32-10";

  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = encrypt(counter_, key_);
      if (++counter_[0] == 0) ++counter_[1];
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Unbiased integer in [0, bound] (Lemire's multiply-and-reject).
  std::uint32_t uniform_inclusive(std::uint32_t bound) {
    if (bound == max()) return (*this)();
    const std::uint64_t range = static_cast<std::uint64_t>(bound) + 1;
    std::uint64_t m = static_cast<std::uint64_t>((*this)()) * range;
    auto low = static_cast<std::uint32_t>(m);
    if (low < range) {
      const auto threshold = static_cast<std::uint32_t>((std::uint64_t{1} << 32) % range);
      while (low < threshold) {
        m = static_cast<std::uint64_t>((*this)()) * range;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  static Block encrypt(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int index_ = 4;
};

}  // namespace dcfcoex

#endif  // DCFCOEX_RNG_HPP_
