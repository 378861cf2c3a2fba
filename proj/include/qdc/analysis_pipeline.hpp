#pragma once

#include <span>

#include "qdc/config.hpp"
#include "qdc/experiment.hpp"
#include "qdc/fits.hpp"
#include "qdc/report.hpp"

namespace qdc {

/// Coincidence histogram and peak areas of one two-channel stream, with
/// per-kind defaults for binning and peak windows.
PeakAreas stream_peak_areas(const TimeTagStream& stream, const AnalysisOptions& options);

/// Decay histogram (sync channel 0 against photon channel 1) of a lifetime
/// stream.
CoincidenceHistogram lifetime_histogram(const TimeTagStream& stream,
                                        const AnalysisOptions& options);

/// Runs every estimator the given streams support: autocorrelations and the
/// detected rate from HBT runs, polarization correlations from co/cross
/// pairs per basis, interference visibilities from co/cross HOM pairs,
/// lifetimes from decay runs. Streams that lack their co/cross partner are
/// skipped.
FomEstimates analyze_streams(std::span<const TimeTagStream> streams,
                             const AnalysisOptions& options);

}  // namespace qdc
