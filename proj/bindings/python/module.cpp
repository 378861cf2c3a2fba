#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qdc/analysis_pipeline.hpp"
#include "qdc/cascade_mc.hpp"
#include "qdc/config.hpp"
#include "qdc/fits.hpp"
#include "qdc/physics.hpp"
#include "qdc/tagfile.hpp"

namespace py = pybind11;
using namespace qdc;

namespace {

py::array_t<std::int64_t> timestamps_array(const TimeTagStream& s) {
  py::array_t<std::int64_t> out(static_cast<py::ssize_t>(s.records.size()));
  auto view = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i)
    view(i) = s.records[static_cast<std::size_t>(i)].timestamp_ps;
  return out;
}

py::array_t<std::uint16_t> channels_array(const TimeTagStream& s) {
  py::array_t<std::uint16_t> out(static_cast<py::ssize_t>(s.records.size()));
  auto view = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i)
    view(i) = s.records[static_cast<std::size_t>(i)].channel;
  return out;
}

py::array_t<std::uint64_t> pulses_array(const TimeTagStream& s) {
  py::array_t<std::uint64_t> out(static_cast<py::ssize_t>(s.records.size()));
  auto view = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i)
    view(i) = s.records[static_cast<std::size_t>(i)].pulse_index;
  return out;
}

py::dict estimates_dict(const FomEstimates& est) {
  py::dict d;
  auto put = [&](const char* name, const std::optional<Estimate>& e) {
    if (e) d[name] = py::make_tuple(e->value, e->sigma);
  };
  put("g2_x", est.g2_x);
  put("g2_xx", est.g2_xx);
  put("c_lin", est.c_lin);
  put("c_diag", est.c_diag);
  put("c_circ", est.c_circ);
  put("v_hom_x", est.v_hom_x);
  put("v_hom_xx", est.v_hom_xx);
  put("tau_x_ps", est.tau_x_ps);
  put("tau_xx_ps", est.tau_xx_ps);
  put("fss_uev", est.fss_uev);
  put("eta", est.eta);
  put("detected_rate_x_mhz", est.detected_rate_x_mhz);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation and time-tag analysis of quantum-dot cascade photon-pair sources";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);

  py::enum_<Basis>(m, "Basis")
      .value("linear", Basis::linear)
      .value("diagonal", Basis::diagonal)
      .value("circular", Basis::circular);

  py::enum_<ExperimentKind>(m, "ExperimentKind")
      .value("hbt_x", ExperimentKind::hbt_x)
      .value("hbt_xx", ExperimentKind::hbt_xx)
      .value("cross_correlation", ExperimentKind::cross_correlation)
      .value("hom_x", ExperimentKind::hom_x)
      .value("hom_xx", ExperimentKind::hom_xx)
      .value("lifetime_x", ExperimentKind::lifetime_x)
      .value("lifetime_xx", ExperimentKind::lifetime_xx);

  py::enum_<RelativePol>(m, "RelativePol")
      .value("co", RelativePol::co)
      .value("cross", RelativePol::cross);

  py::class_<SourceParams>(m, "SourceParams")
      .def(py::init<>())
      .def_readwrite("fss_uev", &SourceParams::fss_uev)
      .def_readwrite("tau_x_ps", &SourceParams::tau_x_ps)
      .def_readwrite("tau_xx_ps", &SourceParams::tau_xx_ps)
      .def_readwrite("tau_ss_ps", &SourceParams::tau_ss_ps)
      .def_readwrite("eta_xx", &SourceParams::eta_xx)
      .def_readwrite("eta", &SourceParams::eta)
      .def_readwrite("xi", &SourceParams::xi)
      .def_readwrite("g2_x", &SourceParams::g2_x)
      .def_readwrite("g2_xx", &SourceParams::g2_xx)
      .def_readwrite("rep_rate_mhz", &SourceParams::rep_rate_mhz)
      .def_readwrite("overlap_m", &SourceParams::overlap_m)
      .def_readwrite("apd_correction", &SourceParams::apd_correction)
      .def("rep_period_ps", &SourceParams::rep_period_ps)
      .def("validate", &SourceParams::validate);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("kind", &ExperimentConfig::kind)
      .def_readwrite("basis", &ExperimentConfig::basis)
      .def_readwrite("relative_pol", &ExperimentConfig::relative_pol)
      .def_readwrite("mzi_delay_ps", &ExperimentConfig::mzi_delay_ps)
      .def_readwrite("double_pulse_sep_ps", &ExperimentConfig::double_pulse_sep_ps)
      .def_readwrite("irf_sigma_ps", &ExperimentConfig::irf_sigma_ps)
      .def_readwrite("dark_rate_hz", &ExperimentConfig::dark_rate_hz)
      .def_readwrite("n_pulses", &ExperimentConfig::n_pulses)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("validate", &ExperimentConfig::validate);

  py::class_<TimeTagStream>(m, "TimeTagStream")
      .def("__len__", [](const TimeTagStream& s) { return s.records.size(); })
      .def_property_readonly("params", [](const TimeTagStream& s) { return s.header.params; })
      .def_property_readonly("config", [](const TimeTagStream& s) { return s.header.config; })
      .def("duration_ps", &TimeTagStream::duration_ps)
      .def("channels", &channels_array)
      .def("pulse_indices", &pulses_array)
      .def("timestamps_ps", &timestamps_array);

  // physics
  m.def("hbar_uev_ps", [] { return kHbarUevPs; });
  m.def("coherence_factor", &coherence_factor, py::arg("fss_uev"), py::arg("tau_x_ps"));
  m.def("scattering_survival", &scattering_survival, py::arg("tau_x_ps"), py::arg("tau_ss_ps"));
  m.def(
      "model_density_matrix",
      [](const SourceParams& p) -> Eigen::Matrix4cd { return model_density_matrix(p).rho; },
      py::arg("params"));
  m.def(
      "fidelity_to_psi_plus",
      [](const Eigen::Matrix4cd& rho) {
        return fidelity_to_psi_plus(TwoPhotonDensityMatrix{rho});
      },
      py::arg("rho"));
  m.def(
      "predicted_correlation",
      [](const Eigen::Matrix4cd& rho, Basis basis) {
        return predicted_correlation(TwoPhotonDensityMatrix{rho}, basis);
      },
      py::arg("rho"), py::arg("basis"));
  m.def("fidelity_from_correlations", &fidelity_from_correlations, py::arg("c_lin"),
        py::arg("c_diag"), py::arg("c_circ"));
  m.def(
      "fidelity_vs_fss_curve",
      [](const SourceParams& p, const std::vector<double>& grid) {
        return fidelity_vs_fss_curve(p, grid);
      },
      py::arg("params"), py::arg("fss_grid_uev"));
  m.def("pair_collection_probability", &pair_collection_probability, py::arg("eta_xx"),
        py::arg("eta"), py::arg("g2_x"), py::arg("g2_xx"));
  m.def("collection_efficiency_from_rate", &collection_efficiency_from_rate,
        py::arg("detected_rate_mhz"), py::arg("rep_rate_mhz"), py::arg("xi"),
        py::arg("apd_correction"), py::arg("eta_xx"));
  m.def("purcell_factor", &purcell_factor, py::arg("tau_bulk_ps"), py::arg("tau_cavity_ps"));
  m.def("rabi_preparation_probability", &rabi_preparation_probability, py::arg("power"),
        py::arg("power_pi"), py::arg("eta_max"));

  // simulation and file formats
  m.def("simulate", &simulate, py::arg("params"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "write_tagfile",
      [](const TimeTagStream& s, const std::filesystem::path& path, const std::string& format) {
        write_tagfile(s, path, format == "csv" ? TagFormat::csv : TagFormat::binary);
      },
      py::arg("stream"), py::arg("path"), py::arg("format") = "binary");
  m.def("read_tagfile", &read_tagfile, py::arg("path"));

  // analysis
  py::class_<AnalysisOptions>(m, "AnalysisOptions")
      .def(py::init<>())
      .def_readwrite("bin_width_ps", &AnalysisOptions::bin_width_ps)
      .def_readwrite("lifetime_bin_width_ps", &AnalysisOptions::lifetime_bin_width_ps)
      .def_readwrite("window_ps", &AnalysisOptions::window_ps)
      .def_readwrite("range_periods", &AnalysisOptions::range_periods);

  m.def(
      "analyze_streams",
      [](const std::vector<TimeTagStream>& streams, const AnalysisOptions& options) {
        return estimates_dict(analyze_streams(streams, options));
      },
      py::arg("streams"), py::arg("options") = AnalysisOptions{});
  m.def(
      "fit_fss",
      [](const std::vector<double>& angles, const std::vector<double>& energies) {
        const FssFit fit = fit_fss(angles, energies);
        return py::make_tuple(fit.fss_uev.value, fit.fss_uev.sigma);
      },
      py::arg("angles_deg"), py::arg("delta_e_uev"));

  py::class_<CoincidenceHistogram>(m, "CoincidenceHistogram")
      .def_readonly("bin_width_ps", &CoincidenceHistogram::bin_width_ps)
      .def_readonly("min_ps", &CoincidenceHistogram::min_ps)
      .def_readonly("max_ps", &CoincidenceHistogram::max_ps)
      .def_readonly("rep_period_ps", &CoincidenceHistogram::rep_period_ps)
      .def("counts",
           [](const CoincidenceHistogram& h) {
             py::array_t<std::uint64_t> out(static_cast<py::ssize_t>(h.bins()));
             auto view = out.mutable_unchecked<1>();
             for (py::ssize_t i = 0; i < view.shape(0); ++i)
               view(i) = h.counts[static_cast<std::size_t>(i)];
             return out;
           })
      .def("bin_centers",
           [](const CoincidenceHistogram& h) {
             py::array_t<double> out(static_cast<py::ssize_t>(h.bins()));
             auto view = out.mutable_unchecked<1>();
             for (py::ssize_t i = 0; i < view.shape(0); ++i)
               view(i) = h.bin_center(static_cast<std::size_t>(i));
             return out;
           })
      .def("total", &CoincidenceHistogram::total);

  py::class_<PeakAreas>(m, "PeakAreas")
      .def_readonly("center_ps", &PeakAreas::center_ps)
      .def_readonly("area", &PeakAreas::area)
      .def_readonly("sigma", &PeakAreas::sigma)
      .def_readonly("window_ps", &PeakAreas::window_ps)
      .def_readonly("rep_period_ps", &PeakAreas::rep_period_ps);

  m.def(
      "build_histogram",
      [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, double bin_width,
         double min_ps, double max_ps, double rep_period_ps) {
        CoincidenceHistogram h = build_histogram(a, b, bin_width, min_ps, max_ps);
        h.rep_period_ps = rep_period_ps;
        return h;
      },
      py::arg("stream_a"), py::arg("stream_b"), py::arg("bin_width_ps"), py::arg("min_ps"),
      py::arg("max_ps"), py::arg("rep_period_ps") = 0.0);
  m.def("integrate_peaks", &integrate_peaks, py::arg("hist"), py::arg("rep_period_ps"),
        py::arg("window_ps"));
  auto as_tuple = [](const Estimate& e) { return py::make_tuple(e.value, e.sigma); };
  m.def(
      "g2_zero", [as_tuple](const PeakAreas& p) { return as_tuple(g2_zero(p)); },
      py::arg("peaks"));
  m.def(
      "correlation_from_areas",
      [as_tuple](const PeakAreas& co, const PeakAreas& cross) {
        return as_tuple(correlation_from_areas(co, cross));
      },
      py::arg("co"), py::arg("cross"));
  m.def(
      "hom_visibility",
      [as_tuple](const PeakAreas& co, const PeakAreas& cross) {
        return as_tuple(hom_visibility(co, cross));
      },
      py::arg("co"), py::arg("cross"));
  m.def(
      "fit_lifetime",
      [](const CoincidenceHistogram& decay, double irf_sigma_ps) {
        const LifetimeFit fit = fit_lifetime(decay, irf_sigma_ps);
        py::dict out;
        out["tau_ps"] = py::make_tuple(fit.tau_ps.value, fit.tau_ps.sigma);
        out["amplitude"] = fit.amplitude;
        out["t0_ps"] = fit.t0_ps;
        out["baseline"] = fit.baseline;
        out["chi2"] = fit.chi2;
        out["iterations"] = fit.iterations;
        return out;
      },
      py::arg("decay"), py::arg("irf_sigma_ps"));
  m.def("stream_peak_areas", &stream_peak_areas, py::arg("stream"),
        py::arg("options") = AnalysisOptions{});

  m.attr("__version__") = "1.0.0";
}
