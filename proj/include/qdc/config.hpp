#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qdc/experiment.hpp"
#include "qdc/report.hpp"
#include "qdc/source_params.hpp"

namespace qdc {

/// Knobs of the time-tag analysis stage.
struct AnalysisOptions {
  double bin_width_ps = 50.0;           ///< coincidence histogram binning
  double lifetime_bin_width_ps = 5.0;   ///< decay histogram binning
  double window_ps = 0.0;               ///< peak integration window; 0 = per-kind default
  int range_periods = 5;                ///< side peaks on each side of zero delay
  Thresholds thresholds;

  void validate() const {
    if (!(bin_width_ps > 0.0)) throw ValidationError("bin_width must be > 0");
    if (!(lifetime_bin_width_ps > 0.0)) throw ValidationError("lifetime_bin_width must be > 0");
    if (!(window_ps >= 0.0)) throw ValidationError("window must be >= 0");
    if (range_periods < 3) throw ValidationError("range_periods must be >= 3");
  }

  bool operator==(const AnalysisOptions&) const = default;
};

struct OutputPaths {
  std::string tag_file;
  std::string report;
  std::string report_kv;

  bool operator==(const OutputPaths&) const = default;
};

/// Everything one run needs: source parameters, experiment geometry,
/// analysis options and output paths. Serialized as "key = value" text.
struct RunConfig {
  SourceParams source;
  ExperimentConfig experiment;
  AnalysisOptions analysis;
  OutputPaths output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses key = value configuration text. Every key is optional and
/// defaults apply (79 MHz repetition rate, 1.9 ns interferometer geometry).
/// Unknown keys, type mismatches, constraint violations and keys that do
/// not apply to the configured experiment kind raise ParseError with the
/// key and line.
RunConfig parse_config(std::string_view text);

RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical text form; parse(serialize(c)) == c. Keys that do not apply to
/// the experiment kind are omitted.
std::string serialize_config(const RunConfig& config);

/// The subset embedded in tag-file headers (source and experiment sections).
std::string serialize_stream_header(const SourceParams& params, const ExperimentConfig& config);

/// Text forms of the experiment enums; throw ValidationError on unknown
/// names.
ExperimentKind parse_experiment_kind(std::string_view name);
Basis parse_basis(std::string_view name);
RelativePol parse_relative_pol(std::string_view name);

}  // namespace qdc
