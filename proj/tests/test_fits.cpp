#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdc/fits.hpp"
#include "qdc/rng.hpp"

using namespace qdc;
using doctest::Approx;

namespace {

/// Histogram of n samples t0 + Exp(tau) + N(0, sigma) on [-2000, 10000) ps.
CoincidenceHistogram sampled_decay(double tau, double sigma_irf, double t0, long n,
                                   std::uint64_t seed, double bin_width = 5.0) {
  CoincidenceHistogram h;
  h.bin_width_ps = bin_width;
  h.min_ps = -2000.0;
  h.max_ps = 10000.0;
  h.counts.assign(static_cast<std::size_t>((h.max_ps - h.min_ps) / bin_width), 0);
  PulseRng rng(seed, 0);
  for (long i = 0; i < n; ++i) {
    double t = t0 + rng.exponential(tau);
    if (sigma_irf > 0.0) t += rng.normal(sigma_irf);
    if (t < h.min_ps || t >= h.max_ps) continue;
    ++h.counts[static_cast<std::size_t>((t - h.min_ps) / bin_width)];
  }
  return h;
}

/// Noise-free histogram with bin counts equal to the expected values.
CoincidenceHistogram exact_decay(double tau, double sigma_irf, double t0, double amplitude,
                                 double bin_width = 5.0) {
  CoincidenceHistogram h;
  h.bin_width_ps = bin_width;
  h.min_ps = -2000.0;
  h.max_ps = 10000.0;
  const auto bins = static_cast<std::size_t>((h.max_ps - h.min_ps) / bin_width);
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i < bins; ++i) {
    const double t = h.bin_center(i);
    h.counts[i] = static_cast<std::uint64_t>(
        std::llround(amplitude * decay_response(t, tau, sigma_irf, t0) * bin_width));
  }
  return h;
}

}  // namespace

TEST_CASE("decay response is a unit-area density") {
  for (const auto& [tau, sigma] : {std::pair{60.0, 50.0}, {210.0, 50.0}, {60.0, 0.0}}) {
    double integral = 0.0;
    const double h = 0.25;
    for (double t = -4000.0; t < 30000.0; t += h)
      integral += decay_response(t + 0.5 * h, tau, sigma, 0.0) * h;
    CHECK(integral == Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("decay response limits") {
  // sigma -> 0 reduces to the bare exponential
  CHECK(decay_response(120.0, 60.0, 0.0, 0.0) == Approx(std::exp(-2.0) / 60.0).epsilon(1e-12));
  CHECK(decay_response(-1.0, 60.0, 0.0, 0.0) == 0.0);
  // the large-argument branch joins the direct evaluation smoothly
  const double tau = 60.0, sigma = 50.0;
  for (double dt = -500.0; dt <= -400.0; dt += 10.0) {
    const double z = (sigma / tau - dt / sigma) / std::sqrt(2.0);
    CHECK(z > 6.0);
    const double direct =
        0.5 / tau * std::exp(0.5 * (sigma / tau) * (sigma / tau) - dt / tau) * std::erfc(z);
    CHECK(decay_response(dt, tau, sigma, 0.0) == Approx(direct).epsilon(1e-5));
  }
}

TEST_CASE("lifetime fit recovers noiseless synthetic decays") {
  SUBCASE("pure exponential, no response function") {
    const LifetimeFit fit = fit_lifetime(exact_decay(60.0, 0.0, 500.0, 2e6), 0.0);
    CHECK(std::abs(fit.tau_ps.value - 60.0) < 0.5);
  }
  SUBCASE("convolved with a 50 ps response") {
    const LifetimeFit fit = fit_lifetime(exact_decay(60.0, 50.0, 500.0, 2e6), 50.0);
    CHECK(std::abs(fit.tau_ps.value - 60.0) < 0.5);
    CHECK(std::abs(fit.t0_ps - 500.0) < 2.0);
  }
}

TEST_CASE("lifetime fit generate-and-recover at counting statistics") {
  SUBCASE("cavity-like decay") {
    const LifetimeFit fit = fit_lifetime(sampled_decay(60.0, 50.0, 500.0, 1000000, 13), 50.0);
    CHECK(std::abs(fit.tau_ps.value - 60.0) / 60.0 < 0.02);
    CHECK(fit.tau_ps.sigma > 0.0);
    CHECK(fit.tau_ps.sigma < 1.0);
  }
  SUBCASE("bulk-like decay") {
    const LifetimeFit fit = fit_lifetime(sampled_decay(210.0, 50.0, 500.0, 1000000, 14), 50.0);
    CHECK(std::abs(fit.tau_ps.value - 210.0) / 210.0 < 0.02);
  }
  SUBCASE("with a flat background") {
    CoincidenceHistogram h = sampled_decay(210.0, 50.0, 500.0, 500000, 15);
    PulseRng rng(16, 0);
    for (auto& c : h.counts) c += rng.poisson(20.0);
    const LifetimeFit fit = fit_lifetime(h, 50.0);
    CHECK(std::abs(fit.tau_ps.value - 210.0) / 210.0 < 0.02);
    CHECK(fit.baseline == Approx(20.0).epsilon(0.1));
  }
}

TEST_CASE("lifetime fit rejects unusable histograms") {
  CoincidenceHistogram sparse;
  sparse.bin_width_ps = 5.0;
  sparse.min_ps = 0.0;
  sparse.max_ps = 500.0;
  sparse.counts.assign(100, 0);
  sparse.counts[10] = 50;
  sparse.counts[11] = 20;
  CHECK_THROWS_AS(fit_lifetime(sparse, 0.0), FitError);
}

TEST_CASE("fss fit") {
  auto scan = [](double s, double e0, double phase, double noise, std::uint64_t seed,
                 int points = 19) {
    std::vector<double> angles, energies;
    PulseRng rng(seed, 0);
    for (int i = 0; i < points; ++i) {
      const double theta = 180.0 * i / (points - 1);
      angles.push_back(theta);
      energies.push_back(e0 + 0.5 * s * std::sin(2.0 * theta * M_PI / 180.0 + phase) +
                         (noise > 0.0 ? rng.normal(noise) : 0.0));
    }
    return std::pair{angles, energies};
  };

  SUBCASE("constant series has zero splitting") {
    auto [angles, energies] = scan(0.0, 1200.0, 0.0, 0.0, 1);
    CHECK(fit_fss(angles, energies).fss_uev.value == Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("noise-free recovery is exact") {
    auto [angles, energies] = scan(4.8, 3900.0, 0.7, 0.0, 1);
    const FssFit fit = fit_fss(angles, energies);
    CHECK(fit.fss_uev.value == Approx(4.8).epsilon(1e-9));
    CHECK(fit.e0_uev == Approx(3900.0).epsilon(1e-9));
    CHECK(fit.phase_rad == Approx(0.7).epsilon(1e-6));
  }

  SUBCASE("generate-and-recover at paper-like noise") {
    for (const auto& [s, seed] : {std::pair{3.4, 21}, {4.8, 22}, {11.6, 23}}) {
      auto [angles, energies] = scan(s, 3900.0, 0.3, 0.1, static_cast<std::uint64_t>(seed));
      const FssFit fit = fit_fss(angles, energies);
      CHECK(std::abs(fit.fss_uev.value - s) < 0.2);
      CHECK(fit.fss_uev.sigma > 0.0);
      CHECK(fit.fss_uev.sigma < 0.2);
    }
  }

  SUBCASE("input validation") {
    auto [angles, energies] = scan(4.8, 0.0, 0.0, 0.0, 1);
    angles.resize(5);
    energies.resize(5);
    CHECK_THROWS_AS(fit_fss(angles, energies), ValidationError);

    std::vector<double> narrow{0, 10, 20, 30, 40, 50, 60, 70};
    std::vector<double> values(8, 1.0);
    CHECK_THROWS_AS(fit_fss(narrow, values), ValidationError);

    // 180-degree span but only two distinct sampling points: rank deficient
    std::vector<double> degenerate{0, 0, 0, 0, 180, 180, 180, 180};
    CHECK_THROWS_AS(fit_fss(degenerate, values), FitError);
  }
}
