#pragma once

#include <cmath>

#include "qdc/errors.hpp"

namespace qdc {

/// Reduced Planck constant in the unit system used throughout: energies in
/// micro-eV, times in picoseconds.
inline constexpr double kHbarUevPs = 658.2119569;

/// Physical parameters of one cascade photon-pair source.
///
/// Energies are in μeV, times in ps, rates in MHz. Defaults describe an
/// unremarkable Purcell-enhanced GaAs dot; bundled device configs override
/// them with measured values.
struct SourceParams {
  double fss_uev = 0.0;          ///< fine structure splitting s of the exciton doublet
  double tau_x_ps = 60.0;        ///< exciton radiative lifetime
  double tau_xx_ps = 50.0;       ///< biexciton radiative lifetime
  double tau_ss_ps = 15000.0;    ///< exciton spin-scattering time (may be infinite)
  double eta_xx = 0.9;           ///< biexciton preparation probability per pulse
  double eta = 0.85;             ///< collection efficiency into the first lens
  double xi = 0.07;              ///< downstream setup transmission
  double g2_x = 0.0;             ///< residual multi-photon level of the X line
  double g2_xx = 0.0;            ///< residual multi-photon level of the XX line
  double rep_rate_mhz = 79.0;    ///< excitation pulse repetition rate
  double overlap_m = 1.0;        ///< wavepacket overlap entering two-photon interference
  double apd_correction = 1.0;   ///< detector nonlinearity correction factor (>= 1)

  double rep_period_ps() const { return 1.0e6 / rep_rate_mhz; }

  /// Throws ValidationError if any field is outside its admissible range.
  void validate() const {
    auto probability = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(name) + " must be in [0, 1]");
    };
    auto positive_time = [](double v, const char* name) {
      if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be > 0");
    };
    if (!(fss_uev >= 0.0)) throw ValidationError("fss must be >= 0");
    positive_time(tau_x_ps, "tau_x");
    positive_time(tau_xx_ps, "tau_xx");
    positive_time(tau_ss_ps, "tau_ss");
    probability(eta_xx, "eta_xx");
    probability(eta, "eta");
    probability(xi, "xi");
    probability(overlap_m, "overlap_m");
    if (!(g2_x >= 0.0 && g2_x < 1.0)) throw ValidationError("g2_x must be in [0, 1)");
    if (!(g2_xx >= 0.0 && g2_xx < 1.0)) throw ValidationError("g2_xx must be in [0, 1)");
    if (!(rep_rate_mhz > 0.0) || std::isinf(rep_rate_mhz))
      throw ValidationError("rep_rate must be finite and > 0");
    if (!(apd_correction >= 1.0)) throw ValidationError("apd_correction must be >= 1");
  }

  bool operator==(const SourceParams&) const = default;
};

}  // namespace qdc
