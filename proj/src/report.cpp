#include "qdc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qdc/physics.hpp"

namespace qdc {

namespace {

FomField make_field(const Estimate& e, double lo, double hi) {
  FomField f;
  f.present = true;
  f.raw = e.value;
  f.value = std::clamp(e.value, lo, hi);
  f.sigma = e.sigma;
  return f;
}

FomField make_field(const std::optional<Estimate>& e, double lo, double hi) {
  return e ? make_field(*e, lo, hi) : FomField{};
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void render_kv_field(std::ostringstream& os, const char* name, const FomField& f) {
  if (!f.present) return;
  os << "fom." << name << " = " << format_double(f.value) << '\n';
  os << "fom." << name << ".sigma = " << format_double(f.sigma) << '\n';
  os << "fom." << name << ".raw = " << format_double(f.raw) << '\n';
  if (f.pass) os << "fom." << name << ".pass = " << (*f.pass ? "true" : "false") << '\n';
}

void render_text_field(std::ostringstream& os, const char* label, const FomField& f,
                       const char* unit = "") {
  if (!f.present) return;
  os << "  " << label;
  for (std::size_t i = std::string(label).size(); i < 24; ++i) os << ' ';
  std::ostringstream value;
  value.precision(6);
  value << f.value << " +- " << f.sigma << unit;
  os << value.str();
  if (f.pass) os << (*f.pass ? "   [pass]" : "   [FAIL]");
  if (f.raw != f.value) os << "   (raw " << f.raw << ")";
  os << '\n';
}

}  // namespace

FomReport compile_report(const FomEstimates& est, const SourceParams& params,
                         const Thresholds& thresholds) {
  if (est.empty())
    throw AnalysisError("compile_report: no estimates provided (incomplete report)");

  FomReport report;
  report.g2_x = make_field(est.g2_x, 0.0, HUGE_VAL);
  report.g2_xx = make_field(est.g2_xx, 0.0, HUGE_VAL);
  report.c_lin = make_field(est.c_lin, -1.0, 1.0);
  report.c_diag = make_field(est.c_diag, -1.0, 1.0);
  report.c_circ = make_field(est.c_circ, -1.0, 1.0);
  report.v_hom_x = make_field(est.v_hom_x, 0.0, 1.0);
  report.v_hom_xx = make_field(est.v_hom_xx, 0.0, 1.0);
  report.tau_x_ps = make_field(est.tau_x_ps, 0.0, HUGE_VAL);
  report.tau_xx_ps = make_field(est.tau_xx_ps, 0.0, HUGE_VAL);
  report.fss_uev = make_field(est.fss_uev, 0.0, HUGE_VAL);
  report.eta = make_field(est.eta, 0.0, 1.0);
  report.detected_rate_x_mhz = make_field(est.detected_rate_x_mhz, 0.0, HUGE_VAL);

  if (report.g2_x.present) report.g2_x.pass = report.g2_x.value <= thresholds.g2_max;
  if (report.g2_xx.present) report.g2_xx.pass = report.g2_xx.value <= thresholds.g2_max;
  if (report.v_hom_x.present) report.v_hom_x.pass = report.v_hom_x.value >= thresholds.visibility_min;
  if (report.v_hom_xx.present)
    report.v_hom_xx.pass = report.v_hom_xx.value >= thresholds.visibility_min;

  if (est.c_lin && est.c_diag && est.c_circ) {
    const double f = (1.0 + est.c_lin->value + est.c_diag->value - est.c_circ->value) / 4.0;
    const double sigma = 0.25 * std::sqrt(est.c_lin->sigma * est.c_lin->sigma +
                                          est.c_diag->sigma * est.c_diag->sigma +
                                          est.c_circ->sigma * est.c_circ->sigma);
    report.fidelity = make_field(Estimate{f, sigma}, 0.0, 1.0);
    report.fidelity.pass = report.fidelity.value >= thresholds.fidelity_min;
  }

  if (est.eta && est.g2_x && est.g2_xx) {
    const double eta = std::clamp(est.eta->value, 0.0, 1.0);
    const double gx = std::clamp(est.g2_x->value, 0.0, 1.0 - 1e-12);
    const double gxx = std::clamp(est.g2_xx->value, 0.0, 1.0 - 1e-12);
    const double p = pair_collection_probability(params.eta_xx, eta, gx, gxx);
    double rel2 = 0.0;
    if (eta > 0.0) rel2 += std::pow(2.0 * est.eta->sigma / eta, 2);
    rel2 += std::pow(0.5 * est.g2_x->sigma / (1.0 - gx), 2);
    rel2 += std::pow(0.5 * est.g2_xx->sigma / (1.0 - gxx), 2);
    report.pair_probability = make_field(Estimate{p, p * std::sqrt(rel2)}, 0.0, 1.0);
  }

  return report;
}

std::string render_report_text(const FomReport& r) {
  std::ostringstream os;
  os << "figures of merit (value +- one standard deviation)\n";
  render_text_field(os, "g2_x(0)", r.g2_x);
  render_text_field(os, "g2_xx(0)", r.g2_xx);
  render_text_field(os, "C_linear", r.c_lin);
  render_text_field(os, "C_diagonal", r.c_diag);
  render_text_field(os, "C_circular", r.c_circ);
  render_text_field(os, "fidelity", r.fidelity);
  render_text_field(os, "V_hom_x", r.v_hom_x);
  render_text_field(os, "V_hom_xx", r.v_hom_xx);
  render_text_field(os, "tau_x", r.tau_x_ps, " ps");
  render_text_field(os, "tau_xx", r.tau_xx_ps, " ps");
  render_text_field(os, "fss", r.fss_uev, " ueV");
  render_text_field(os, "eta", r.eta);
  render_text_field(os, "pair_probability", r.pair_probability);
  render_text_field(os, "detected_rate_x", r.detected_rate_x_mhz, " MHz");
  return os.str();
}

std::string render_report_kv(const FomReport& r) {
  std::ostringstream os;
  render_kv_field(os, "g2_x", r.g2_x);
  render_kv_field(os, "g2_xx", r.g2_xx);
  render_kv_field(os, "c_lin", r.c_lin);
  render_kv_field(os, "c_diag", r.c_diag);
  render_kv_field(os, "c_circ", r.c_circ);
  render_kv_field(os, "fidelity", r.fidelity);
  render_kv_field(os, "v_hom_x", r.v_hom_x);
  render_kv_field(os, "v_hom_xx", r.v_hom_xx);
  render_kv_field(os, "tau_x", r.tau_x_ps);
  render_kv_field(os, "tau_xx", r.tau_xx_ps);
  render_kv_field(os, "fss", r.fss_uev);
  render_kv_field(os, "eta", r.eta);
  render_kv_field(os, "pair_probability", r.pair_probability);
  render_kv_field(os, "detected_rate_x", r.detected_rate_x_mhz);
  return os.str();
}

}  // namespace qdc
