#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qdc/errors.hpp"

namespace qdc {

/// Binned delay histogram between two detection channels. Bin i covers
/// delays [min + i*bw, min + (i+1)*bw); a pair (tA, tB) enters at
/// delay tB - tA.
struct CoincidenceHistogram {
  double bin_width_ps = 0.0;
  double min_ps = 0.0;
  double max_ps = 0.0;
  std::uint16_t channel_a = 0;
  std::uint16_t channel_b = 1;
  double rep_period_ps = 0.0;  ///< 0 when not tied to a pulsed acquisition
  std::vector<std::uint64_t> counts;

  std::size_t bins() const { return counts.size(); }
  double bin_center(std::size_t i) const {
    return min_ps + (static_cast<double>(i) + 0.5) * bin_width_ps;
  }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// Counts all pairs (tA, tB) with tB - tA in [min, max) via a two-pointer
/// sweep; linear in the records plus the pairs in range. Streams must be
/// sorted ascending; (max - min) must be an integer multiple of bin_width.
CoincidenceHistogram build_histogram(std::span<const std::int64_t> stream_a,
                                     std::span<const std::int64_t> stream_b, double bin_width_ps,
                                     double min_ps, double max_ps);

/// Integrated areas of the peaks at integer multiples of the repetition
/// period, each summed over a centered window, with Poisson uncertainties.
struct PeakAreas {
  std::vector<double> center_ps;
  std::vector<double> area;
  std::vector<double> sigma;
  double window_ps = 0.0;
  double rep_period_ps = 0.0;

  /// Index of the zero-delay peak, or -1 if it is not in range.
  int central_index() const {
    for (std::size_t i = 0; i < center_ps.size(); ++i)
      if (center_ps[i] == 0.0) return static_cast<int>(i);
    return -1;
  }
};

/// Sums counts in +-window/2 around every multiple of rep_period fully
/// contained in the histogram range. Requires window <= rep_period and at
/// least 3 side peaks in range.
PeakAreas integrate_peaks(const CoincidenceHistogram& hist, double rep_period_ps,
                          double window_ps);

}  // namespace qdc
