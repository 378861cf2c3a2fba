#include "qdc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qdc {

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double_value(std::string_view value) {
  if (value == "inf") return HUGE_VAL;
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw std::invalid_argument("expected a number, got \"" + std::string(value) + "\"");
  return out;
}

std::uint64_t parse_u64_value(std::string_view value) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw std::invalid_argument("expected a non-negative integer, got \"" + std::string(value) +
                                "\"");
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

struct KeySpec {
  Setter set;
};

#define QDC_DOUBLE_KEY(field, check, what)                                          \
  KeySpec{[](RunConfig& c, std::string_view v) {                                    \
    const double value = parse_double_value(v);                                     \
    if (!(check)) throw std::invalid_argument(what);                                \
    c.field = value;                                                                \
  }}

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  static const std::map<std::string, KeySpec, std::less<>> table = {
      {"source.fss", QDC_DOUBLE_KEY(source.fss_uev, value >= 0.0, "fss must be >= 0")},
      {"source.tau_x", QDC_DOUBLE_KEY(source.tau_x_ps, value > 0.0, "tau_x must be > 0")},
      {"source.tau_xx", QDC_DOUBLE_KEY(source.tau_xx_ps, value > 0.0, "tau_xx must be > 0")},
      {"source.tau_ss", QDC_DOUBLE_KEY(source.tau_ss_ps, value > 0.0, "tau_ss must be > 0")},
      {"source.eta_xx",
       QDC_DOUBLE_KEY(source.eta_xx, value >= 0.0 && value <= 1.0, "eta_xx must be in [0, 1]")},
      {"source.eta",
       QDC_DOUBLE_KEY(source.eta, value >= 0.0 && value <= 1.0, "eta must be in [0, 1]")},
      {"source.xi",
       QDC_DOUBLE_KEY(source.xi, value >= 0.0 && value <= 1.0, "xi must be in [0, 1]")},
      {"source.g2_x",
       QDC_DOUBLE_KEY(source.g2_x, value >= 0.0 && value < 1.0, "g2_x must be in [0, 1)")},
      {"source.g2_xx",
       QDC_DOUBLE_KEY(source.g2_xx, value >= 0.0 && value < 1.0, "g2_xx must be in [0, 1)")},
      {"source.rep_rate", QDC_DOUBLE_KEY(source.rep_rate_mhz, value > 0.0 && !std::isinf(value),
                                         "rep_rate must be finite and > 0")},
      {"source.overlap_m", QDC_DOUBLE_KEY(source.overlap_m, value >= 0.0 && value <= 1.0,
                                          "overlap_m must be in [0, 1]")},
      {"source.apd_correction",
       QDC_DOUBLE_KEY(source.apd_correction, value >= 1.0, "apd_correction must be >= 1")},
      {"experiment.kind",
       KeySpec{[](RunConfig& c, std::string_view v) { c.experiment.kind = parse_experiment_kind(v); }}},
      {"experiment.basis",
       KeySpec{[](RunConfig& c, std::string_view v) { c.experiment.basis = parse_basis(v); }}},
      {"experiment.relative_pol", KeySpec{[](RunConfig& c, std::string_view v) {
         c.experiment.relative_pol = parse_relative_pol(v);
       }}},
      {"experiment.mzi_delay",
       QDC_DOUBLE_KEY(experiment.mzi_delay_ps, value > 0.0, "mzi_delay must be > 0")},
      {"experiment.double_pulse_sep", QDC_DOUBLE_KEY(experiment.double_pulse_sep_ps, value > 0.0,
                                                     "double_pulse_sep must be > 0")},
      {"experiment.irf_sigma",
       QDC_DOUBLE_KEY(experiment.irf_sigma_ps, value >= 0.0, "irf_sigma must be >= 0")},
      {"experiment.dark_rate",
       QDC_DOUBLE_KEY(experiment.dark_rate_hz, value >= 0.0, "dark_rate must be >= 0")},
      {"experiment.n_pulses", KeySpec{[](RunConfig& c, std::string_view v) {
         const std::uint64_t value = parse_u64_value(v);
         if (value < 1) throw std::invalid_argument("n_pulses must be >= 1");
         c.experiment.n_pulses = value;
       }}},
      {"experiment.seed",
       KeySpec{[](RunConfig& c, std::string_view v) { c.experiment.seed = parse_u64_value(v); }}},
      {"analysis.bin_width",
       QDC_DOUBLE_KEY(analysis.bin_width_ps, value > 0.0, "bin_width must be > 0")},
      {"analysis.lifetime_bin_width", QDC_DOUBLE_KEY(analysis.lifetime_bin_width_ps, value > 0.0,
                                                     "lifetime_bin_width must be > 0")},
      {"analysis.window", QDC_DOUBLE_KEY(analysis.window_ps, value >= 0.0, "window must be >= 0")},
      {"analysis.range_periods", KeySpec{[](RunConfig& c, std::string_view v) {
         const std::uint64_t value = parse_u64_value(v);
         if (value < 3 || value > 1000) throw std::invalid_argument("range_periods must be in [3, 1000]");
         c.analysis.range_periods = static_cast<int>(value);
       }}},
      {"analysis.g2_threshold",
       QDC_DOUBLE_KEY(analysis.thresholds.g2_max, value >= 0.0, "g2_threshold must be >= 0")},
      {"analysis.fidelity_threshold",
       QDC_DOUBLE_KEY(analysis.thresholds.fidelity_min, value >= 0.0 && value <= 1.0,
                      "fidelity_threshold must be in [0, 1]")},
      {"analysis.visibility_threshold",
       QDC_DOUBLE_KEY(analysis.thresholds.visibility_min, value >= 0.0 && value <= 1.0,
                      "visibility_threshold must be in [0, 1]")},
      {"output.tag_file",
       KeySpec{[](RunConfig& c, std::string_view v) { c.output.tag_file = std::string(v); }}},
      {"output.report",
       KeySpec{[](RunConfig& c, std::string_view v) { c.output.report = std::string(v); }}},
      {"output.report_kv",
       KeySpec{[](RunConfig& c, std::string_view v) { c.output.report_kv = std::string(v); }}},
  };
  return table;
}

#undef QDC_DOUBLE_KEY

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::map<std::string, int, std::less<>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(std::string(line), line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto it = key_table().find(key);
    if (it == key_table().end()) throw ParseError(key, line_no, "unknown key");
    if (!seen.emplace(key, line_no).second) throw ParseError(key, line_no, "duplicate key");
    try {
      it->second.set(config, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(key, line_no, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(key, line_no, e.what());
    }
  }

  // Keys that only apply to specific experiment kinds.
  const ExperimentKind kind = config.experiment.kind;
  auto reject_if_set = [&](const char* key) {
    if (const auto it = seen.find(key); it != seen.end())
      throw ParseError(key, it->second,
                       "key does not apply to experiment kind " +
                           std::string(to_string(kind)));
  };
  if (kind != ExperimentKind::cross_correlation) reject_if_set("experiment.basis");
  if (kind != ExperimentKind::cross_correlation && !is_hom(kind))
    reject_if_set("experiment.relative_pol");
  if (!is_hom(kind)) {
    reject_if_set("experiment.mzi_delay");
    reject_if_set("experiment.double_pulse_sep");
  }

  config.source.validate();
  config.experiment.validate();
  config.analysis.validate();
  return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_stream_header(const SourceParams& p, const ExperimentConfig& e) {
  std::ostringstream os;
  os << "source.fss = " << format_double(p.fss_uev) << '\n';
  os << "source.tau_x = " << format_double(p.tau_x_ps) << '\n';
  os << "source.tau_xx = " << format_double(p.tau_xx_ps) << '\n';
  os << "source.tau_ss = " << format_double(p.tau_ss_ps) << '\n';
  os << "source.eta_xx = " << format_double(p.eta_xx) << '\n';
  os << "source.eta = " << format_double(p.eta) << '\n';
  os << "source.xi = " << format_double(p.xi) << '\n';
  os << "source.g2_x = " << format_double(p.g2_x) << '\n';
  os << "source.g2_xx = " << format_double(p.g2_xx) << '\n';
  os << "source.rep_rate = " << format_double(p.rep_rate_mhz) << '\n';
  os << "source.overlap_m = " << format_double(p.overlap_m) << '\n';
  os << "source.apd_correction = " << format_double(p.apd_correction) << '\n';
  os << "experiment.kind = " << to_string(e.kind) << '\n';
  if (e.kind == ExperimentKind::cross_correlation)
    os << "experiment.basis = " << to_string(e.basis) << '\n';
  if (e.kind == ExperimentKind::cross_correlation || is_hom(e.kind))
    os << "experiment.relative_pol = " << to_string(e.relative_pol) << '\n';
  if (is_hom(e.kind)) {
    os << "experiment.mzi_delay = " << format_double(e.mzi_delay_ps) << '\n';
    os << "experiment.double_pulse_sep = " << format_double(e.double_pulse_sep_ps) << '\n';
  }
  os << "experiment.irf_sigma = " << format_double(e.irf_sigma_ps) << '\n';
  os << "experiment.dark_rate = " << format_double(e.dark_rate_hz) << '\n';
  os << "experiment.n_pulses = " << e.n_pulses << '\n';
  os << "experiment.seed = " << e.seed << '\n';
  return os.str();
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << serialize_stream_header(c.source, c.experiment);
  os << "analysis.bin_width = " << format_double(c.analysis.bin_width_ps) << '\n';
  os << "analysis.lifetime_bin_width = " << format_double(c.analysis.lifetime_bin_width_ps)
     << '\n';
  os << "analysis.window = " << format_double(c.analysis.window_ps) << '\n';
  os << "analysis.range_periods = " << c.analysis.range_periods << '\n';
  os << "analysis.g2_threshold = " << format_double(c.analysis.thresholds.g2_max) << '\n';
  os << "analysis.fidelity_threshold = " << format_double(c.analysis.thresholds.fidelity_min)
     << '\n';
  os << "analysis.visibility_threshold = " << format_double(c.analysis.thresholds.visibility_min)
     << '\n';
  os << "output.tag_file = " << c.output.tag_file << '\n';
  os << "output.report = " << c.output.report << '\n';
  os << "output.report_kv = " << c.output.report_kv << '\n';
  return os.str();
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (ExperimentKind k :
       {ExperimentKind::hbt_x, ExperimentKind::hbt_xx, ExperimentKind::cross_correlation,
        ExperimentKind::hom_x, ExperimentKind::hom_xx, ExperimentKind::lifetime_x,
        ExperimentKind::lifetime_xx})
    if (name == to_string(k)) return k;
  throw ValidationError("unknown experiment kind \"" + std::string(name) + "\"");
}

Basis parse_basis(std::string_view name) {
  for (Basis b : {Basis::linear, Basis::diagonal, Basis::circular})
    if (name == to_string(b)) return b;
  throw ValidationError("unknown basis \"" + std::string(name) + "\"");
}

RelativePol parse_relative_pol(std::string_view name) {
  if (name == "co") return RelativePol::co;
  if (name == "cross") return RelativePol::cross;
  throw ValidationError("relative_pol must be co or cross");
}

}  // namespace qdc
