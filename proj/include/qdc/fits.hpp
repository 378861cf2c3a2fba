#pragma once

#include <span>

#include "qdc/estimators.hpp"
#include "qdc/histogram.hpp"

namespace qdc {

/// Normalized decay response at time t: an exponential decay of lifetime tau
/// starting at t0, convolved with a Gaussian of width sigma_irf (closed-form
/// exponentially-modified-Gaussian expression; pure exponential when
/// sigma_irf == 0).
double decay_response(double t, double tau, double sigma_irf, double t0);

struct LifetimeFit {
  Estimate tau_ps;
  double amplitude = 0.0;  ///< total signal counts
  double t0_ps = 0.0;
  double baseline = 0.0;   ///< counts per bin
  double chi2 = 0.0;
  int iterations = 0;
};

/// Weighted least-squares fit of amplitude * decay_response(t; tau, sigma_irf,
/// t0) * bin_width + baseline to a decay histogram, with (amplitude, tau, t0,
/// baseline) free and Poisson weights. Needs at least 20 populated bins past
/// the peak; throws FitError with diagnostics when the fit cannot proceed or
/// does not converge.
LifetimeFit fit_lifetime(const CoincidenceHistogram& decay, double irf_sigma_ps);

struct FssFit {
  Estimate fss_uev;     ///< peak-to-peak swing of the fitted sinusoid
  double e0_uev = 0.0;  ///< mean energy offset
  double phase_rad = 0.0;
};

/// Least-squares fit of delta_e(theta) = E0 + (s/2) sin(2 theta + phi) to a
/// polarization scan; returns the FSS s as the peak-to-peak swing. Needs at
/// least 8 samples spanning at least 180 degrees.
FssFit fit_fss(std::span<const double> angles_deg, std::span<const double> delta_e_uev);

}  // namespace qdc
