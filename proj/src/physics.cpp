#include "qdc/physics.hpp"

#include <cmath>

namespace qdc {

complexd coherence_factor(double fss_uev, double tau_x_ps) {
  if (!(tau_x_ps > 0.0)) throw ValidationError("coherence_factor: tau_x must be > 0");
  if (!(fss_uev >= 0.0)) throw ValidationError("coherence_factor: fss must be >= 0");
  const double x = fss_uev * tau_x_ps / kHbarUevPs;
  return complexd(1.0, x) / (1.0 + x * x);
}

double scattering_survival(double tau_x_ps, double tau_ss_ps) {
  if (!(tau_x_ps > 0.0) || !(tau_ss_ps > 0.0))
    throw ValidationError("scattering_survival: lifetimes must be > 0");
  if (std::isinf(tau_ss_ps)) return 1.0;
  return tau_ss_ps / (tau_ss_ps + tau_x_ps);
}

TwoPhotonDensityMatrix model_density_matrix(const SourceParams& params) {
  params.validate();
  const double k = scattering_survival(params.tau_x_ps, params.tau_ss_ps);
  const complexd c = coherence_factor(params.fss_uev, params.tau_x_ps);

  TwoPhotonDensityMatrix out;
  out.rho.setZero();
  const double mixed = (1.0 - k) * 0.25;
  out.rho(0, 0) = 0.5 * k + mixed;
  out.rho(1, 1) = mixed;
  out.rho(2, 2) = mixed;
  out.rho(3, 3) = 0.5 * k + mixed;
  out.rho(0, 3) = 0.5 * k * c;
  out.rho(3, 0) = std::conj(out.rho(0, 3));
  return out;
}

double fidelity_to_psi_plus(const TwoPhotonDensityMatrix& rho) {
  rho.validate();
  return 0.5 * std::real(rho.rho(0, 0) + rho.rho(3, 3)) + std::real(rho.rho(0, 3));
}

double predicted_correlation(const TwoPhotonDensityMatrix& rho, Basis basis) {
  rho.validate();
  const BasisVectors vec = basis_vectors(basis);
  const PairKet aa = pair_product(vec.a, vec.a);
  const PairKet bb = pair_product(vec.b, vec.b);
  const PairKet ab = pair_product(vec.a, vec.b);
  const PairKet ba = pair_product(vec.b, vec.a);
  const double p_co = rho.expectation(aa) + rho.expectation(bb);
  const double p_cross = rho.expectation(ab) + rho.expectation(ba);
  return (p_co - p_cross) / (p_co + p_cross);
}

double fidelity_from_correlations(double c_lin, double c_diag, double c_circ) {
  for (double c : {c_lin, c_diag, c_circ})
    if (!(c >= -1.0 && c <= 1.0))
      throw ValidationError("fidelity_from_correlations: correlations must be in [-1, 1]");
  return (1.0 + c_lin + c_diag - c_circ) / 4.0;
}

std::vector<std::pair<double, double>> fidelity_vs_fss_curve(const SourceParams& params,
                                                             std::span<const double> fss_grid_uev) {
  params.validate();
  if (fss_grid_uev.empty()) throw ValidationError("fidelity_vs_fss_curve: empty grid");
  const double k = scattering_survival(params.tau_x_ps, params.tau_ss_ps);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(fss_grid_uev.size());
  for (double s : fss_grid_uev) {
    if (!(s >= 0.0)) throw ValidationError("fidelity_vs_fss_curve: fss must be >= 0");
    const double x = s * params.tau_x_ps / kHbarUevPs;
    curve.emplace_back(s, 0.25 + 0.25 * k + 0.5 * k / (1.0 + x * x));
  }
  return curve;
}

double pair_collection_probability(double eta_xx, double eta, double g2_x, double g2_xx) {
  for (double v : {eta_xx, eta, g2_x, g2_xx})
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("pair_collection_probability: inputs must be in [0, 1]");
  return eta_xx * eta * eta * std::sqrt(1.0 - g2_x) * std::sqrt(1.0 - g2_xx);
}

double collection_efficiency_from_rate(double detected_rate_mhz, double rep_rate_mhz, double xi,
                                       double apd_correction, double eta_xx) {
  if (!(detected_rate_mhz > 0.0) || !(rep_rate_mhz > 0.0))
    throw ValidationError("collection_efficiency_from_rate: rates must be > 0");
  if (!(xi > 0.0 && xi <= 1.0) || !(eta_xx > 0.0 && eta_xx <= 1.0))
    throw ValidationError("collection_efficiency_from_rate: xi and eta_xx must be in (0, 1]");
  if (!(apd_correction >= 1.0))
    throw ValidationError("collection_efficiency_from_rate: apd_correction must be >= 1");
  const double eta = detected_rate_mhz * apd_correction / (rep_rate_mhz * xi * eta_xx);
  if (eta > 1.0)
    throw ValidationError("collection_efficiency_from_rate: inputs imply efficiency > 1");
  return eta;
}

double purcell_factor(double tau_bulk_ps, double tau_cavity_ps) {
  if (!(tau_bulk_ps > 0.0) || !(tau_cavity_ps > 0.0))
    throw ValidationError("purcell_factor: lifetimes must be > 0");
  return tau_bulk_ps / tau_cavity_ps;
}

double rabi_preparation_probability(double power, double power_pi, double eta_max) {
  if (!(power >= 0.0) || !(power_pi > 0.0))
    throw ValidationError("rabi_preparation_probability: power must be >= 0, power_pi > 0");
  if (!(eta_max >= 0.0 && eta_max <= 1.0))
    throw ValidationError("rabi_preparation_probability: eta_max must be in [0, 1]");
  const double s = std::sin(0.5 * M_PI * std::sqrt(power / power_pi));
  return eta_max * s * s;
}

}  // namespace qdc
