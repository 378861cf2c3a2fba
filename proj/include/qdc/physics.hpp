#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qdc/density_matrix.hpp"
#include "qdc/polarization.hpp"
#include "qdc/source_params.hpp"

namespace qdc {

/// Ensemble average of exp(i s tau / hbar) over tau ~ Exponential(tau_x),
/// i.e. the residual (HH, VV) coherence left by the fine-structure phase:
/// 1 / (1 - i x) with x = s * tau_x / hbar.
complexd coherence_factor(double fss_uev, double tau_x_ps);

/// Probability that the exciton decays before its spin scatters,
/// tau_ss / (tau_ss + tau_x).
double scattering_survival(double tau_x_ps, double tau_ss_ps);

/// Two-photon polarization state of the cascade: with probability
/// k = scattering_survival the FSS-dephased pair, otherwise a fully mixed
/// contribution I/4.
TwoPhotonDensityMatrix model_density_matrix(const SourceParams& params);

/// Overlap <psi+|rho|psi+> = (rho_HHHH + rho_VVVV)/2 + Re rho_HHVV.
/// Validates rho first.
double fidelity_to_psi_plus(const TwoPhotonDensityMatrix& rho);

/// Degree of correlation C = (P_co - P_cross) / (P_co + P_cross) for the
/// co/cross polarized projector pairs of the given basis.
double predicted_correlation(const TwoPhotonDensityMatrix& rho, Basis basis);

/// f = (1 + C_lin + C_diag - C_circ) / 4. Inputs must lie in [-1, 1].
double fidelity_from_correlations(double c_lin, double c_diag, double c_circ);

/// Pointwise fidelity-vs-FSS curve f(s) for the model family,
/// f(s) = 1/4 + k/4 + (k/2) / (1 + (s tau_x / hbar)^2).
std::vector<std::pair<double, double>> fidelity_vs_fss_curve(const SourceParams& params,
                                                             std::span<const double> fss_grid_uev);

/// Collected photon pair probability per excitation pulse,
/// p = eta_xx * eta^2 * sqrt(1 - g2_x) * sqrt(1 - g2_xx).
double pair_collection_probability(double eta_xx, double eta, double g2_x, double g2_xx);

/// Collection efficiency inferred from a detected count rate:
/// eta = detected_rate * apd_correction / (rep_rate * xi * eta_xx).
/// Throws ValidationError if the inputs imply eta > 1.
double collection_efficiency_from_rate(double detected_rate_mhz, double rep_rate_mhz, double xi,
                                       double apd_correction, double eta_xx);

/// Lifetime-ratio Purcell factor tau_bulk / tau_cavity.
double purcell_factor(double tau_bulk_ps, double tau_cavity_ps);

/// Phenomenological two-photon preparation probability under a pulse of
/// average power p: eta_max * sin^2((pi/2) sqrt(p / p_pi)).
double rabi_preparation_probability(double power, double power_pi, double eta_max);

}  // namespace qdc
