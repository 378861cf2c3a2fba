#include "qdc/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace qdc {

namespace {

void require_sorted(std::span<const std::int64_t> stream, const char* name) {
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i] < stream[i - 1])
      throw ValidationError(std::string("build_histogram: ") + name + " stream is not sorted");
}

}  // namespace

CoincidenceHistogram build_histogram(std::span<const std::int64_t> stream_a,
                                     std::span<const std::int64_t> stream_b, double bin_width_ps,
                                     double min_ps, double max_ps) {
  if (!(bin_width_ps > 0.0)) throw ValidationError("build_histogram: bin_width must be > 0");
  if (!(min_ps < max_ps)) throw ValidationError("build_histogram: empty delay range");
  const double span = max_ps - min_ps;
  const double bins_exact = span / bin_width_ps;
  const auto n_bins = static_cast<std::size_t>(std::llround(bins_exact));
  if (n_bins == 0 || std::abs(bins_exact - static_cast<double>(n_bins)) > 1e-9)
    throw ValidationError("build_histogram: delay range is not a multiple of bin_width");
  require_sorted(stream_a, "A");
  require_sorted(stream_b, "B");

  CoincidenceHistogram hist;
  hist.bin_width_ps = bin_width_ps;
  hist.min_ps = min_ps;
  hist.max_ps = max_ps;
  hist.counts.assign(n_bins, 0);

  std::size_t lo = 0;
  for (const std::int64_t ta : stream_a) {
    while (lo < stream_b.size() && static_cast<double>(stream_b[lo] - ta) < min_ps) ++lo;
    for (std::size_t j = lo; j < stream_b.size(); ++j) {
      const double delay = static_cast<double>(stream_b[j] - ta);
      if (delay >= max_ps) break;
      const auto bin = static_cast<std::size_t>((delay - min_ps) / bin_width_ps);
      ++hist.counts[std::min(bin, n_bins - 1)];
    }
  }
  return hist;
}

PeakAreas integrate_peaks(const CoincidenceHistogram& hist, double rep_period_ps,
                          double window_ps) {
  if (!(rep_period_ps > 0.0)) throw ValidationError("integrate_peaks: rep_period must be > 0");
  if (!(window_ps > 0.0) || window_ps > rep_period_ps + 1e-9)
    throw ValidationError("integrate_peaks: window must be in (0, rep_period]");

  const double half = 0.5 * window_ps;
  const auto m_lo = static_cast<std::int64_t>(std::ceil((hist.min_ps + half) / rep_period_ps - 1e-12));
  const auto m_hi =
      static_cast<std::int64_t>(std::floor((hist.max_ps - half) / rep_period_ps + 1e-12));

  PeakAreas peaks;
  peaks.window_ps = window_ps;
  peaks.rep_period_ps = rep_period_ps;
  int side_peaks = 0;
  for (std::int64_t m = m_lo; m <= m_hi; ++m) {
    const double center = static_cast<double>(m) * rep_period_ps;
    const auto first =
        static_cast<std::int64_t>(std::floor((center - half - hist.min_ps) / hist.bin_width_ps));
    double area = 0.0;
    for (std::int64_t i = std::max<std::int64_t>(0, first);
         i < static_cast<std::int64_t>(hist.bins()); ++i) {
      const double c = hist.bin_center(static_cast<std::size_t>(i));
      if (c >= center + half) break;
      if (c >= center - half) area += static_cast<double>(hist.counts[static_cast<std::size_t>(i)]);
    }
    peaks.center_ps.push_back(center);
    peaks.area.push_back(area);
    peaks.sigma.push_back(std::sqrt(area));
    if (m != 0) ++side_peaks;
  }
  if (side_peaks < 3)
    throw AnalysisError("integrate_peaks: fewer than 3 side peaks in range (insufficient data)");
  return peaks;
}

}  // namespace qdc
