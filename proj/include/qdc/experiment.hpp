#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "qdc/errors.hpp"
#include "qdc/polarization.hpp"
#include "qdc/source_params.hpp"

namespace qdc {

enum class ExperimentKind {
  hbt_x,               ///< auto-correlation of the X line on a 50/50 splitter
  hbt_xx,              ///< auto-correlation of the XX line
  cross_correlation,   ///< polarization-projected XX-X cross-correlation
  hom_x,               ///< two-photon interference of consecutive X photons
  hom_xx,              ///< two-photon interference of consecutive XX photons
  lifetime_x,          ///< time-resolved decay of the X line against the sync
  lifetime_xx,         ///< time-resolved decay of the XX line
};

enum class RelativePol { co, cross };

constexpr std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::hbt_x: return "hbt_x";
    case ExperimentKind::hbt_xx: return "hbt_xx";
    case ExperimentKind::cross_correlation: return "cross_correlation";
    case ExperimentKind::hom_x: return "hom_x";
    case ExperimentKind::hom_xx: return "hom_xx";
    case ExperimentKind::lifetime_x: return "lifetime_x";
    case ExperimentKind::lifetime_xx: return "lifetime_xx";
  }
  return "?";
}

constexpr std::string_view to_string(RelativePol pol) {
  return pol == RelativePol::co ? "co" : "cross";
}

constexpr bool is_hbt(ExperimentKind k) {
  return k == ExperimentKind::hbt_x || k == ExperimentKind::hbt_xx;
}
constexpr bool is_hom(ExperimentKind k) {
  return k == ExperimentKind::hom_x || k == ExperimentKind::hom_xx;
}
constexpr bool is_lifetime(ExperimentKind k) {
  return k == ExperimentKind::lifetime_x || k == ExperimentKind::lifetime_xx;
}

/// One simulated acquisition run.
///
/// `basis` applies to cross_correlation only; `relative_pol` to
/// cross_correlation and HOM. For the HOM kinds every laser period carries
/// two excitation pulses separated by `double_pulse_sep_ps`, and `n_pulses`
/// counts excitation pulses (two per period); the interferometer delay must
/// equal the pulse separation.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::hbt_x;
  Basis basis = Basis::linear;
  RelativePol relative_pol = RelativePol::co;
  double mzi_delay_ps = 1900.0;
  double double_pulse_sep_ps = 1900.0;
  double irf_sigma_ps = 0.0;
  double dark_rate_hz = 0.0;
  std::uint64_t n_pulses = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_pulses < 1) throw ValidationError("n_pulses must be >= 1");
    if (!(irf_sigma_ps >= 0.0)) throw ValidationError("irf_sigma must be >= 0");
    if (!(dark_rate_hz >= 0.0)) throw ValidationError("dark_rate must be >= 0");
    if (is_hom(kind)) {
      if (!(mzi_delay_ps > 0.0) || !(double_pulse_sep_ps > 0.0))
        throw ValidationError("HOM delays must be > 0");
      if (mzi_delay_ps != double_pulse_sep_ps)
        throw ValidationError("mzi_delay must equal double_pulse_sep for the HOM geometry");
    }
  }

  bool operator==(const ExperimentConfig&) const = default;
};

/// One detection event. Channel meaning depends on the experiment kind:
/// hbt/hom use the two detector ports 0/1; cross_correlation uses
/// 0 = XX analyzer output, 1 = X analyzer output; lifetime uses
/// 0 = sync trigger, 1 = photon detector.
struct DetectionRecord {
  std::uint16_t channel = 0;
  std::uint64_t pulse_index = 0;
  std::int64_t timestamp_ps = 0;

  bool operator==(const DetectionRecord&) const = default;
};

struct StreamHeader {
  SourceParams params;
  ExperimentConfig config;
  std::uint64_t record_count = 0;
};

/// Finalized acquisition: records sorted by (timestamp, channel, pulse).
struct TimeTagStream {
  StreamHeader header;
  std::vector<DetectionRecord> records;

  /// Sorted timestamps of a single channel.
  std::vector<std::int64_t> channel_timestamps(std::uint16_t channel) const {
    std::vector<std::int64_t> out;
    for (const auto& r : records)
      if (r.channel == channel) out.push_back(r.timestamp_ps);
    return out;
  }

  /// Total acquisition time implied by the pulse count.
  double duration_ps() const {
    return static_cast<double>(header.config.n_pulses) * header.params.rep_period_ps() /
           (is_hom(header.config.kind) ? 2.0 : 1.0);
  }
};

}  // namespace qdc
