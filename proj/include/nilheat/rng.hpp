#ifndef NILHEAT_RNG_HPP
#define NILHEAT_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace nilheat {

// Philox4x32-10 counter-based generator. A block is a pure function of
// (key, counter), so any path/rollout can be given its own stream keyed by
// (seed, stream index) and the draws are identical no matter how work is
// scheduled across threads.
struct Philox4x32 {
  static constexpr uint32_t kM0 = 0xD2511F53u;
  static constexpr uint32_t kM1 = 0xCD9E8D57u;
  static constexpr uint32_t kW0 = 0x9E3779B9u;
  static constexpr uint32_t kW1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      uint64_t p0 = static_cast<uint64_t>(kM0) * ctr[0];
      uint64_t p1 = static_cast<uint64_t>(kM1) * ctr[2];
      uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Sequential view of one (seed, stream) Philox stream: uniforms on (0,1] and
// standard normals via Box-Muller (rejection-free, so the draw count per
// path is deterministic).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  // 53-bit uniform in (0, 1].
  double next_u01() {
    refill_if_needed();
    uint64_t x = (static_cast<uint64_t>(buf_[word_]) << 32) | buf_[word_ + 1];
    word_ += 2;
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_u01(); }

  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_u01();
    double u2 = next_u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  void refill_if_needed() {
    if (word_ <= 2) return;
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
        static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                   static_cast<uint32_t>(seed_ >> 32)};
    buf_ = Philox4x32::block(ctr, key);
    ++counter_;
    word_ = 0;
  }

  uint64_t seed_, stream_;
  uint64_t counter_ = 0;
  std::array<uint32_t, 4> buf_{};
  int word_ = 4;  // forces initial refill
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace nilheat

#endif
