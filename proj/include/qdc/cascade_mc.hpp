#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qdc/experiment.hpp"
#include "qdc/polarization.hpp"
#include "qdc/rng.hpp"
#include "qdc/source_params.hpp"

namespace qdc {

/// One sampled XX-X cascade. Emission times are relative to the excitation
/// pulse; the pair state is a unit vector in the (HH, HV, VH, VV) basis.
struct CascadeOutcome {
  double xx_emit_ps = 0.0;
  double x_emit_ps = 0.0;
  PairKet pair_state;
  bool spin_flipped = false;
};

/// Samples one cascade given that the biexciton was prepared (the caller
/// applies the eta_xx gate). The spin-flip outcome is drawn with the
/// competing-decay probability 1 - tau_ss/(tau_ss + tau_x), independently of
/// the emission delay, so ensembles of outcomes average exactly to
/// model_density_matrix. Unflipped pairs carry the fine-structure phase of
/// their exciton delay; flipped pairs are a uniformly random product state.
CascadeOutcome sample_pair_event(const SourceParams& params, PulseRng& rng);

/// Born-rule sampling of the joint polarizer outcome. Returns
/// (x_port, xx_port) where port 0 is the analyzer vector itself and port 1
/// its orthogonal complement. Analyzers must be unit vectors.
std::pair<int, int> project_polarization(const PairKet& state, const Jones& analyzer_x,
                                         const Jones& analyzer_xx, PulseRng& rng);

/// A photon leaving the source optics, before detection losses.
struct EmissionEvent {
  std::uint16_t channel = 0;
  double time_ps = 0.0;
};

/// Applies the detection model to the emissions of one pulse: each photon
/// survives with probability eta*xi, surviving timestamps get Gaussian
/// jitter of config.irf_sigma_ps, and dark counts are added per listed
/// channel as a Poisson process over [period_start, period_start + period).
void apply_detection_chain(std::span<const EmissionEvent> events, const SourceParams& params,
                           const ExperimentConfig& config, std::uint64_t pulse_index,
                           double period_start_ps, std::span<const std::uint16_t> dark_channels,
                           PulseRng& rng, std::vector<DetectionRecord>& out);

/// Per-pulse background photon rate that makes the side-peak-normalized
/// zero-delay autocorrelation estimator recover g2_target.
double hbt_background_rate(double eta_xx, double g2_target);

/// Runs one experiment and returns the finalized, time-sorted stream.
/// Deterministic in (params, config) including config.seed; results are
/// independent of the worker count (CSTG_THREADS).
TimeTagStream simulate(const SourceParams& params, const ExperimentConfig& config);

/// Worker count used by simulate: CSTG_THREADS if set, else the hardware
/// concurrency, at least 1.
unsigned simulation_worker_count();

}  // namespace qdc
