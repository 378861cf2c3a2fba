#include "qdc/estimators.hpp"

#include <cmath>

namespace qdc {

namespace {

/// Central peak area divided by the mean side-peak area, where side peaks
/// closer than min_side_distance to zero delay are excluded.
Estimate normalized_central(const PeakAreas& peaks, double min_side_distance) {
  const int central = peaks.central_index();
  if (central < 0) throw AnalysisError("estimator: central peak not in range");

  double side_sum = 0.0;
  int side_count = 0;
  for (std::size_t i = 0; i < peaks.center_ps.size(); ++i) {
    const double c = peaks.center_ps[i];
    if (c == 0.0 || std::abs(c) < min_side_distance - 1e-9) continue;
    side_sum += peaks.area[i];
    ++side_count;
  }
  if (side_count < 2) throw AnalysisError("estimator: need at least 2 normalization side peaks");

  const double mean = side_sum / side_count;
  if (mean <= 0.0) throw AnalysisError("estimator: side-peak mean is zero, estimate undefined");
  const double sigma_mean = std::sqrt(side_sum) / side_count;

  const double a0 = peaks.area[static_cast<std::size_t>(central)];
  const double g = a0 / mean;
  const double sigma = std::sqrt(a0 + std::pow(a0 * sigma_mean / mean, 2)) / mean;
  return {g, sigma};
}

}  // namespace

Estimate g2_zero(const PeakAreas& peaks) { return normalized_central(peaks, 0.0); }

Estimate correlation_from_areas(const PeakAreas& co, const PeakAreas& cross) {
  const Estimate g_co = normalized_central(co, 0.0);
  const Estimate g_cross = normalized_central(cross, 0.0);
  const double sum = g_co.value + g_cross.value;
  if (sum <= 0.0)
    throw AnalysisError("correlation_from_areas: both normalized areas are zero, undefined");
  const double c = (g_co.value - g_cross.value) / sum;
  const double d_co = 2.0 * g_cross.value / (sum * sum);
  const double d_cross = 2.0 * g_co.value / (sum * sum);
  const double sigma = std::hypot(d_co * g_co.sigma, d_cross * g_cross.sigma);
  return {c, sigma};
}

Estimate hom_visibility(const PeakAreas& co, const PeakAreas& cross) {
  if (!(co.rep_period_ps > 0.0) || !(cross.rep_period_ps > 0.0))
    throw ValidationError("hom_visibility: peak areas carry no repetition period");
  const Estimate a_co = normalized_central(co, 2.0 * co.rep_period_ps);
  const Estimate a_cross = normalized_central(cross, 2.0 * cross.rep_period_ps);
  if (a_cross.value <= 0.0)
    throw AnalysisError("hom_visibility: zero cross-polarized central area, undefined");
  const double ratio = a_co.value / a_cross.value;
  const double sigma = std::hypot(a_co.sigma / a_cross.value,
                                  a_co.value * a_cross.sigma / (a_cross.value * a_cross.value));
  return {1.0 - ratio, sigma};
}

}  // namespace qdc
