#include <doctest.h>

#include <cmath>
#include <complex>

#include "qdc/physics.hpp"
#include "test_util.hpp"

using namespace qdc;
using doctest::Approx;

namespace {

/// Quadrature oracle: average of exp(i s tau / hbar) over tau ~ Exp(tau_x),
/// integrated with Simpson's rule on [0, 40 tau_x].
complexd coherence_by_quadrature(double s, double tau_x) {
  const int n = 40000;  // even
  const double upper = 40.0 * tau_x;
  const double h = upper / n;
  complexd sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double tau = i * h;
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * std::exp(-tau / tau_x) / tau_x *
           std::exp(complexd(0.0, s * tau / kHbarUevPs));
  }
  return sum * h / 3.0;
}

SourceParams device1() {
  SourceParams p;
  p.fss_uev = 4.8;
  p.tau_x_ps = 60.0;
  p.tau_xx_ps = 50.0;
  p.tau_ss_ps = 15000.0;
  return p;
}

}  // namespace

TEST_CASE("coherence_factor matches the exponential-average quadrature oracle") {
  for (const auto& [s, tau] : {std::pair{4.8, 60.0}, {10.0, 60.0}, {4.8, 210.0}, {1.0, 500.0}}) {
    const complexd oracle = coherence_by_quadrature(s, tau);
    const complexd value = coherence_factor(s, tau);
    CHECK(std::abs(value - oracle) < 1e-6);
  }
  // frozen oracle values at the device point, x = 0.43755
  const complexd c = coherence_factor(4.8, 60.0);
  CHECK(c.real() == Approx(0.8393140).epsilon(1e-5));
  CHECK(c.imag() == Approx(0.3672410).epsilon(1e-5));
}

TEST_CASE("coherence_factor limits and domain errors") {
  CHECK(coherence_factor(0.0, 60.0) == complexd(1.0, 0.0));
  CHECK(std::abs(coherence_factor(1e7, 60.0)) < 1e-3);  // fully dephased
  CHECK_THROWS_AS(coherence_factor(4.8, 0.0), ValidationError);
  CHECK_THROWS_AS(coherence_factor(4.8, -5.0), ValidationError);
  CHECK_THROWS_AS(coherence_factor(-1.0, 60.0), ValidationError);
}

TEST_CASE("scattering_survival values and Monte Carlo oracle") {
  CHECK(scattering_survival(60.0, HUGE_VAL) == 1.0);
  CHECK(scattering_survival(60.0, 15000.0) == Approx(0.99602).epsilon(1e-5));
  CHECK(scattering_survival(60.0, 1000.0) == Approx(0.94340).epsilon(1e-5));

  // competing-clock oracle: fraction of pairs whose flip clock outlives the decay
  PulseRng rng(2024, 0);
  const int n = 400000;
  int survived = 0;
  for (int i = 0; i < n; ++i)
    if (rng.exponential(15000.0) > rng.exponential(60.0)) ++survived;
  const double k = scattering_survival(60.0, 15000.0);
  const double se = std::sqrt(k * (1.0 - k) / n);
  CHECK(std::abs(static_cast<double>(survived) / n - k) < 3.0 * se);

  CHECK_THROWS_AS(scattering_survival(0.0, 100.0), ValidationError);
  CHECK_THROWS_AS(scattering_survival(60.0, 0.0), ValidationError);
}

TEST_CASE("model density matrix limits") {
  SUBCASE("zero splitting, no scattering: exact Bell state") {
    SourceParams p = device1();
    p.fss_uev = 0.0;
    p.tau_ss_ps = HUGE_VAL;
    const Eigen::Matrix4cd rho = model_density_matrix(p).rho;
    const PairKet bell = psi_plus();
    const Eigen::Matrix4cd expected = bell * bell.adjoint();
    CHECK((rho - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("vanishing survival: maximally mixed") {
    SourceParams p = device1();
    p.tau_ss_ps = 1e-9;
    const Eigen::Matrix4cd rho = model_density_matrix(p).rho;
    CHECK((rho - Eigen::Matrix4cd::Identity() * 0.25).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("model density matrix is a valid state for random parameters") {
  PulseRng rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    SourceParams p;
    p.fss_uev = rng.uniform() * 25.0;
    p.tau_x_ps = 20.0 + rng.uniform() * 300.0;
    p.tau_ss_ps = 100.0 + rng.uniform() * 40000.0;
    const TwoPhotonDensityMatrix rho = model_density_matrix(p);
    CHECK_NOTHROW(rho.validate());
  }
}

TEST_CASE("fidelity against the Bell state") {
  SUBCASE("pure Bell state and maximally mixed state") {
    TwoPhotonDensityMatrix bell;
    bell.rho = psi_plus() * psi_plus().adjoint();
    CHECK(fidelity_to_psi_plus(bell) == Approx(1.0).epsilon(1e-12));
    TwoPhotonDensityMatrix mixed;
    mixed.rho = Eigen::Matrix4cd::Identity() * 0.25;
    CHECK(fidelity_to_psi_plus(mixed) == Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("device point reproduces the predicted 0.917") {
    const TwoPhotonDensityMatrix rho = model_density_matrix(device1());
    const double f = fidelity_to_psi_plus(rho);
    CHECK(f == Approx(0.917).epsilon(1e-3));
    // independent route: explicit expectation value
    CHECK(f == Approx(std::real(psi_plus().dot(rho.rho * psi_plus()))).epsilon(1e-12));
  }
  SUBCASE("invariant-violating input is rejected") {
    TwoPhotonDensityMatrix bad;
    bad.rho = Eigen::Matrix4cd::Identity();  // trace 4
    CHECK_THROWS_AS(fidelity_to_psi_plus(bad), ValidationError);
    TwoPhotonDensityMatrix nonherm;
    nonherm.rho = Eigen::Matrix4cd::Identity() * 0.25;
    nonherm.rho(0, 3) = complexd(0.1, 0.05);
    CHECK_THROWS_AS(fidelity_to_psi_plus(nonherm), ValidationError);
  }
}

TEST_CASE("analyzer pairs are orthonormal and complete in every basis") {
  for (const Basis basis : {Basis::linear, Basis::diagonal, Basis::circular}) {
    const BasisVectors v = basis_vectors(basis);
    CHECK(std::abs(v.a.norm() - 1.0) < 1e-15);
    CHECK(std::abs(v.b.norm() - 1.0) < 1e-15);
    CHECK(std::abs(v.a.dot(v.b)) < 1e-15);
    const Eigen::Matrix2cd completeness =
        v.a * v.a.adjoint() + v.b * v.b.adjoint() - Eigen::Matrix2cd::Identity();
    CHECK(completeness.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(orthogonal(v.a).dot(v.b)) > 1.0 - 1e-12);  // b is a's complement up to phase
  }
}

TEST_CASE("predicted correlations of the Bell state and the model family") {
  TwoPhotonDensityMatrix bell;
  bell.rho = psi_plus() * psi_plus().adjoint();
  CHECK(predicted_correlation(bell, Basis::linear) == Approx(1.0).epsilon(1e-12));
  CHECK(predicted_correlation(bell, Basis::diagonal) == Approx(1.0).epsilon(1e-12));
  CHECK(predicted_correlation(bell, Basis::circular) == Approx(-1.0).epsilon(1e-12));

  const SourceParams p = device1();
  const TwoPhotonDensityMatrix rho = model_density_matrix(p);
  const double k = scattering_survival(p.tau_x_ps, p.tau_ss_ps);
  const double x = p.fss_uev * p.tau_x_ps / kHbarUevPs;
  CHECK(predicted_correlation(rho, Basis::linear) == Approx(k).epsilon(1e-12));
  CHECK(predicted_correlation(rho, Basis::diagonal) == Approx(k / (1.0 + x * x)).epsilon(1e-12));
  CHECK(predicted_correlation(rho, Basis::diagonal) == Approx(0.836).epsilon(1e-3));
  CHECK(predicted_correlation(rho, Basis::circular) ==
        Approx(-predicted_correlation(rho, Basis::diagonal)).epsilon(1e-12));
}

TEST_CASE("fidelity from correlations") {
  CHECK(fidelity_from_correlations(0.92, 0.81, -0.80) == Approx(0.8825).epsilon(1e-12));
  CHECK(fidelity_from_correlations(1.0, 1.0, -1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_from_correlations(0.0, 0.0, 0.0) == Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity_from_correlations(1.2, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(fidelity_from_correlations(0.0, -1.0001, 0.0), ValidationError);
}

TEST_CASE("identity chain: correlation-based fidelity equals the direct overlap") {
  PulseRng rng(11, 0);
  for (int trial = 0; trial < 25; ++trial) {
    SourceParams p;
    p.fss_uev = rng.uniform() * 20.0;
    p.tau_x_ps = 30.0 + rng.uniform() * 250.0;
    p.tau_ss_ps = 200.0 + rng.uniform() * 30000.0;
    const TwoPhotonDensityMatrix rho = model_density_matrix(p);
    const double via_correlations = fidelity_from_correlations(
        predicted_correlation(rho, Basis::linear), predicted_correlation(rho, Basis::diagonal),
        predicted_correlation(rho, Basis::circular));
    CHECK(via_correlations == Approx(fidelity_to_psi_plus(rho)).epsilon(1e-10));
  }
}

TEST_CASE("fidelity-vs-FSS curve anchors and shape") {
  SourceParams cavity = device1();
  const std::vector<double> grid{0.0, 4.8, 10.0};
  const auto curve = fidelity_vs_fss_curve(cavity, grid);
  CHECK(curve[1].second == Approx(0.917).epsilon(1e-3));
  CHECK(curve[2].second == Approx(0.771).epsilon(1e-3));
  CHECK(curve[2].second > 0.75);

  SourceParams bulk = cavity;
  bulk.tau_x_ps = 210.0;
  CHECK(fidelity_vs_fss_curve(bulk, grid)[1].second == Approx(0.644).epsilon(1e-3));

  SourceParams fast_scatter = cavity;
  fast_scatter.tau_ss_ps = 1000.0;
  CHECK(fidelity_vs_fss_curve(fast_scatter, grid)[1].second == Approx(0.882).epsilon(1e-3));

  SUBCASE("monotone non-increasing in fss and tau_x; f(0) = (1 + 3k)/4") {
    std::vector<double> dense;
    for (double s = 0.0; s <= 20.0; s += 0.25) dense.push_back(s);
    const auto fs = fidelity_vs_fss_curve(cavity, dense);
    for (std::size_t i = 1; i < fs.size(); ++i) CHECK(fs[i].second <= fs[i - 1].second + 1e-14);
    const double k = scattering_survival(cavity.tau_x_ps, cavity.tau_ss_ps);
    CHECK(fs[0].second == Approx((1.0 + 3.0 * k) / 4.0).epsilon(1e-12));

    double prev = 1.0;
    for (double tau_x : {40.0, 60.0, 120.0, 210.0, 400.0}) {
      SourceParams p = cavity;
      p.tau_x_ps = tau_x;
      const double f = fidelity_vs_fss_curve(p, std::vector<double>{4.8})[0].second;
      CHECK(f <= prev + 1e-14);
      prev = f;
    }
  }
  SUBCASE("empty grid is rejected") {
    CHECK_THROWS_AS(fidelity_vs_fss_curve(cavity, std::vector<double>{}), ValidationError);
  }
}

TEST_CASE("brightness arithmetic") {
  CHECK(pair_collection_probability(0.9, 0.85, 0.001, 0.007) == Approx(0.648).epsilon(1e-3));
  CHECK(pair_collection_probability(0.9, 0.85, 0.001, 0.007) ==
        Approx(0.6476460621).epsilon(1e-9));
  CHECK(pair_collection_probability(1.0, 1.0, 0.0, 0.0) == 1.0);
  CHECK(pair_collection_probability(0.9, 0.85, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(pair_collection_probability(1.1, 0.5, 0.0, 0.0), ValidationError);

  CHECK(collection_efficiency_from_rate(3.4, 79.0, 0.07, 1.25, 0.9) ==
        Approx(0.854).epsilon(6e-3));
  CHECK(collection_efficiency_from_rate(3.4, 79.0, 0.07, 1.25, 0.9) ==
        Approx(0.8539280691).epsilon(1e-9));
  const double saturating = 79.0 * 0.07 * 0.9;
  CHECK(collection_efficiency_from_rate(saturating, 79.0, 0.07, 1.0, 0.9) ==
        Approx(1.0).epsilon(1e-12));
  CHECK(collection_efficiency_from_rate(7.9, 79.0, 1.0, 1.0, 1.0) == Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(collection_efficiency_from_rate(10.0, 79.0, 0.07, 1.25, 0.9), ValidationError);
}

TEST_CASE("Purcell factor") {
  CHECK(purcell_factor(210.0, 60.0) == 3.5);
  CHECK(purcell_factor(210.0, 210.0) == 1.0);
  CHECK(purcell_factor(220.0, 50.0) == Approx(4.4).epsilon(1e-12));
  CHECK_THROWS_AS(purcell_factor(0.0, 60.0), ValidationError);
  CHECK_THROWS_AS(purcell_factor(210.0, -1.0), ValidationError);
}

TEST_CASE("preparation probability curve") {
  CHECK(rabi_preparation_probability(0.0, 36.0, 0.9) == 0.0);
  CHECK(rabi_preparation_probability(36.0, 36.0, 0.9) == Approx(0.9).epsilon(1e-12));
  CHECK(rabi_preparation_probability(4.0 * 36.0, 36.0, 0.9) < 1e-12);  // 2 pi pulse
  CHECK_THROWS_AS(rabi_preparation_probability(-1.0, 36.0, 0.9), ValidationError);
}

TEST_CASE("brute-force cascade averages agree with the model (small)") {
  PulseRng meta(2025, 0);
  for (int set = 0; set < 3; ++set) {
    SourceParams p;
    p.fss_uev = meta.uniform() * 20.0;
    p.tau_x_ps = 30.0 + meta.uniform() * 220.0;
    p.tau_ss_ps = 500.0 + meta.uniform() * 29500.0;
    const auto acc = qdc::testing::sample_rho(p, 300000, 77 + set);
    const double worst = qdc::testing::rho_agreement(
        acc.mean(), model_density_matrix(p).rho, acc.standard_error_re(),
        acc.standard_error_im());
    CHECK(worst <= 1.0);
  }
}
