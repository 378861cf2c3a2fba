#pragma once

#include <optional>
#include <string>

#include "qdc/estimators.hpp"
#include "qdc/source_params.hpp"

namespace qdc {

/// Estimator outputs collected from one or more analyzed acquisitions.
struct FomEstimates {
  std::optional<Estimate> g2_x;
  std::optional<Estimate> g2_xx;
  std::optional<Estimate> c_lin;
  std::optional<Estimate> c_diag;
  std::optional<Estimate> c_circ;
  std::optional<Estimate> v_hom_x;
  std::optional<Estimate> v_hom_xx;
  std::optional<Estimate> tau_x_ps;
  std::optional<Estimate> tau_xx_ps;
  std::optional<Estimate> fss_uev;
  std::optional<Estimate> eta;
  std::optional<Estimate> detected_rate_x_mhz;

  bool empty() const {
    return !(g2_x || g2_xx || c_lin || c_diag || c_circ || v_hom_x || v_hom_xx || tau_x_ps ||
             tau_xx_ps || fss_uev || eta || detected_rate_x_mhz);
  }
};

/// Pass/fail thresholds applied when compiling a report.
struct Thresholds {
  double g2_max = 0.01;
  double fidelity_min = 0.5;  ///< boundary above which polarization entanglement exists
  double visibility_min = 0.5;

  bool operator==(const Thresholds&) const = default;
};

/// One report entry. `value` is clamped to the physical range of the
/// quantity; `raw` keeps the unclamped estimate.
struct FomField {
  bool present = false;
  double value = 0.0;
  double raw = 0.0;
  double sigma = 0.0;
  std::optional<bool> pass;
};

/// Extracted figures of merit with one-standard-deviation uncertainties.
struct FomReport {
  FomField g2_x, g2_xx;
  FomField c_lin, c_diag, c_circ;
  FomField fidelity;
  FomField v_hom_x, v_hom_xx;
  FomField tau_x_ps, tau_xx_ps;
  FomField fss_uev;
  FomField eta;
  FomField pair_probability;
  FomField detected_rate_x_mhz;
};

/// Aggregates estimates into a report: the entanglement fidelity is derived
/// from the three correlations, the pair probability from the measured
/// collection efficiency and residual autocorrelations together with the
/// configured preparation probability. Throws AnalysisError when no
/// estimate is present at all.
FomReport compile_report(const FomEstimates& estimates, const SourceParams& params,
                         const Thresholds& thresholds = {});

/// Human-readable report table.
std::string render_report_text(const FomReport& report);

/// Machine-readable key = value form.
std::string render_report_kv(const FomReport& report);

}  // namespace qdc
