#include "qdc/analysis_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qdc/estimators.hpp"
#include "qdc/histogram.hpp"
#include "qdc/physics.hpp"

namespace qdc {

namespace {

double default_window(const TimeTagStream& stream) {
  const double period = stream.header.params.rep_period_ps();
  if (is_hom(stream.header.config.kind))
    return std::min(stream.header.config.double_pulse_sep_ps, 0.5 * period);
  return 0.5 * period;
}

Estimate detected_rate_mhz(const TimeTagStream& stream) {
  const auto count = static_cast<double>(stream.records.size());
  const double duration = stream.duration_ps();
  return {count / duration * 1e6, std::sqrt(count) / duration * 1e6};
}

}  // namespace

PeakAreas stream_peak_areas(const TimeTagStream& stream, const AnalysisOptions& options) {
  const double period = stream.header.params.rep_period_ps();
  const double bw = options.bin_width_ps;
  const double window = options.window_ps > 0.0 ? options.window_ps : default_window(stream);
  const double reach =
      bw * std::ceil((static_cast<double>(options.range_periods) + 0.5) * period / bw);

  CoincidenceHistogram hist = build_histogram(stream.channel_timestamps(0),
                                              stream.channel_timestamps(1), bw, -reach, reach);
  hist.rep_period_ps = period;
  return integrate_peaks(hist, period, window);
}

CoincidenceHistogram lifetime_histogram(const TimeTagStream& stream,
                                        const AnalysisOptions& options) {
  const double period = stream.header.params.rep_period_ps();
  const double bw = options.lifetime_bin_width_ps;
  const double lo = -bw * std::ceil(std::min(2000.0, 0.15 * period) / bw);
  const double hi = bw * std::ceil(std::min(10000.0, 0.8 * period) / bw);
  CoincidenceHistogram hist =
      build_histogram(stream.channel_timestamps(0), stream.channel_timestamps(1), bw, lo, hi);
  hist.rep_period_ps = period;
  return hist;
}

FomEstimates analyze_streams(std::span<const TimeTagStream> streams,
                             const AnalysisOptions& options) {
  options.validate();
  FomEstimates out;

  struct Pair {
    const TimeTagStream* co = nullptr;
    const TimeTagStream* cross = nullptr;
  };
  std::map<Basis, Pair> cross_runs;
  std::map<ExperimentKind, Pair> hom_runs;

  for (const TimeTagStream& stream : streams) {
    const ExperimentConfig& config = stream.header.config;
    switch (config.kind) {
      case ExperimentKind::hbt_x: {
        out.g2_x = g2_zero(stream_peak_areas(stream, options));
        const Estimate rate = detected_rate_mhz(stream);
        out.detected_rate_x_mhz = rate;
        const SourceParams& p = stream.header.params;
        try {
          const double eta = collection_efficiency_from_rate(
              rate.value, p.rep_rate_mhz, p.xi, p.apd_correction, p.eta_xx);
          out.eta = Estimate{eta, rate.value > 0.0 ? eta * rate.sigma / rate.value : 0.0};
        } catch (const ValidationError& e) {
          throw AnalysisError(std::string("collection efficiency: ") + e.what());
        }
        break;
      }
      case ExperimentKind::hbt_xx: {
        out.g2_xx = g2_zero(stream_peak_areas(stream, options));
        if (!out.eta) {  // XX rate carries the same efficiency chain as X
          const Estimate rate = detected_rate_mhz(stream);
          const SourceParams& p = stream.header.params;
          try {
            const double eta = collection_efficiency_from_rate(
                rate.value, p.rep_rate_mhz, p.xi, p.apd_correction, p.eta_xx);
            out.eta = Estimate{eta, rate.value > 0.0 ? eta * rate.sigma / rate.value : 0.0};
          } catch (const ValidationError& e) {
            throw AnalysisError(std::string("collection efficiency: ") + e.what());
          }
        }
        break;
      }
      case ExperimentKind::cross_correlation: {
        Pair& pair = cross_runs[config.basis];
        (config.relative_pol == RelativePol::co ? pair.co : pair.cross) = &stream;
        break;
      }
      case ExperimentKind::hom_x:
      case ExperimentKind::hom_xx: {
        Pair& pair = hom_runs[config.kind];
        (config.relative_pol == RelativePol::co ? pair.co : pair.cross) = &stream;
        break;
      }
      case ExperimentKind::lifetime_x:
      case ExperimentKind::lifetime_xx: {
        const LifetimeFit fit =
            fit_lifetime(lifetime_histogram(stream, options), config.irf_sigma_ps);
        (config.kind == ExperimentKind::lifetime_x ? out.tau_x_ps : out.tau_xx_ps) = fit.tau_ps;
        break;
      }
    }
  }

  for (const auto& [basis, pair] : cross_runs) {
    if (!pair.co || !pair.cross) continue;
    const Estimate c = correlation_from_areas(stream_peak_areas(*pair.co, options),
                                              stream_peak_areas(*pair.cross, options));
    switch (basis) {
      case Basis::linear: out.c_lin = c; break;
      case Basis::diagonal: out.c_diag = c; break;
      case Basis::circular: out.c_circ = c; break;
    }
  }
  for (const auto& [kind, pair] : hom_runs) {
    if (!pair.co || !pair.cross) continue;
    const Estimate v = hom_visibility(stream_peak_areas(*pair.co, options),
                                      stream_peak_areas(*pair.cross, options));
    (kind == ExperimentKind::hom_x ? out.v_hom_x : out.v_hom_xx) = v;
  }
  return out;
}

}  // namespace qdc
