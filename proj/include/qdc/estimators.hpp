#pragma once

#include "qdc/histogram.hpp"

namespace qdc {

/// A scalar figure of merit with its one-standard-deviation uncertainty.
struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// Zero-delay autocorrelation: central peak area divided by the mean of the
/// side peaks, with first-order Poisson error propagation. Needs the central
/// peak and at least two side peaks.
Estimate g2_zero(const PeakAreas& peaks);

/// Degree of polarization correlation from a co-polarized and a
/// cross-polarized measurement: C = (g_co - g_cross) / (g_co + g_cross),
/// where each g is that histogram's side-peak-normalized central area.
Estimate correlation_from_areas(const PeakAreas& co, const PeakAreas& cross);

/// Two-photon interference visibility V = 1 - A0_co / A0_cross with both
/// central areas normalized by the mean of the peaks at |delay| >= 2 periods
/// (the nearer side peaks carry interferometer structure).
Estimate hom_visibility(const PeakAreas& co, const PeakAreas& cross);

}  // namespace qdc
