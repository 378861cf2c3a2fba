#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "qdc/rng.hpp"

using namespace qdc;
using doctest::Approx;

TEST_CASE("philox 4x32-10 known-answer vectors") {
  // Vectors frozen from an independent reference implementation of the
  // published algorithm; the first three coincide with the Random123
  // distribution's test vectors.
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  CHECK(philox4x32_10(A4{1, 2, 3, 4}, A2{0xdeadbeefu, 0xcafef00du}) ==
        A4{0xb079ff41u, 0x85feb65du, 0x2faf7e4du, 0x64e3a518u});
}

TEST_CASE("pulse streams are deterministic and independent") {
  PulseRng a(42, 7);
  PulseRng b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  PulseRng c(42, 8);
  PulseRng d(43, 7);
  int equal_c = 0, equal_d = 0;
  PulseRng reference(42, 7);
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t r = reference.next_u32();
    if (c.next_u32() == r) ++equal_c;
    if (d.next_u32() == r) ++equal_d;
  }
  CHECK(equal_c < 4);
  CHECK(equal_d < 4);
}

TEST_CASE("uniform deviates live in (0, 1) with the right moments") {
  PulseRng rng(1, 0);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    sum += u;
    sum_sq += u * u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(var == Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("exponential, normal and Poisson deviates have the right moments") {
  PulseRng rng(3, 5);
  const int n = 400000;

  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(60.0);
  CHECK(std::abs(sum / n - 60.0) < 4.0 * 60.0 / std::sqrt(n));

  double nsum = 0.0, nsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(50.0);
    nsum += x;
    nsq += x * x;
  }
  CHECK(std::abs(nsum / n) < 4.0 * 50.0 / std::sqrt(n));
  CHECK(std::sqrt(nsq / n) == Approx(50.0).epsilon(0.01));

  double psum = 0.0;
  for (int i = 0; i < n; ++i) psum += static_cast<double>(rng.poisson(0.8));
  CHECK(std::abs(psum / n - 0.8) < 4.0 * std::sqrt(0.8 / n));
  CHECK(rng.poisson(0.0) == 0);
}
