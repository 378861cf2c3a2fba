#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qdc {

/// Philox 4x32-10 keyed counter block cipher (Salmon et al., SC 2011).
/// Exposed for known-answer tests; simulation code uses PulseRng below.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t prod_a = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t prod_b = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const std::uint32_t hi_a = static_cast<std::uint32_t>(prod_a >> 32);
    const std::uint32_t lo_a = static_cast<std::uint32_t>(prod_a);
    const std::uint32_t hi_b = static_cast<std::uint32_t>(prod_b >> 32);
    const std::uint32_t lo_b = static_cast<std::uint32_t>(prod_b);
    ctr = {hi_b ^ ctr[1] ^ key[0], lo_b, hi_a ^ ctr[3] ^ key[1], lo_a};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

/// Counter-based random stream dedicated to one pulse (or other work unit).
///
/// The stream is fully determined by (seed, stream id), so simulation
/// results do not depend on how pulses are sharded across workers. Draws
/// within a pulse consume successive counter blocks.
class PulseRng {
 public:
  PulseRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform double in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential deviate with the given mean (mean may be +infinity, in
  /// which case the result is +infinity).
  double exponential(double mean) { return -mean * std::log(uniform()); }

  /// Gaussian deviate, zero mean. Box-Muller; the second branch is cached.
  double normal(double sigma) {
    if (has_cached_) {
      has_cached_ = false;
      return sigma * cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * M_PI * uniform();
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return sigma * r * std::cos(theta);
  }

  /// Poisson deviate by Knuth's product method; means large enough to
  /// underflow exp(-mean) fall back to the Gaussian approximation.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 64.0) {
      const double g = mean + std::sqrt(mean) * normal(1.0);
      return g <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(g));
    }
    const double limit = std::exp(-mean);
    std::uint64_t n = 0;
    double product = uniform();
    while (product > limit) {
      ++n;
      product *= uniform();
    }
    return n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    buf_ = philox4x32_10({block_, stream_lo_, stream_hi_, 0u}, key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qdc
