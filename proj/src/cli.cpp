#include "qdc/cli.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qdc/analysis_pipeline.hpp"
#include "qdc/cascade_mc.hpp"
#include "qdc/config.hpp"
#include "qdc/io_util.hpp"
#include "qdc/physics.hpp"
#include "qdc/tagfile.hpp"

namespace qdc {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct SimulateArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "binary";
  std::optional<double> fss, tau_x, tau_xx, tau_ss, eta_xx, eta, xi, g2_x, g2_xx, rep_rate,
      overlap_m, apd_correction;
  std::optional<std::string> kind, basis, relative_pol;
  std::optional<double> mzi_delay, double_pulse_sep, irf_sigma, dark_rate;
  std::optional<std::uint64_t> pulses, seed;
};

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string fss_scan;
  std::optional<double> bin_width, lifetime_bin_width, window;
  std::optional<int> range_periods;
  std::optional<double> g2_threshold, fidelity_threshold, visibility_threshold;
  std::string report_path;
  std::string report_kv_path;
};

struct CurveArgs {
  double tau_x = 60.0;
  double tau_ss = 15000.0;
  double from = 0.0;
  double to = 20.0;
  double step = 0.1;
  std::string out;
};

struct RabiArgs {
  double p_pi = 36.0;
  double eta_max = 0.9;
  double from = 0.0;
  double to = 200.0;
  double step = 1.0;
  double rep_rate = 79.0;
  double eta = 0.85;
  double xi = 0.07;
  std::string out;
};

struct ReportArgs {
  std::string fom_path;
  std::string reference_path = "data/source_comparison.csv";
  std::string out;
  bool compare = false;
};

struct CliArgs {
  SimulateArgs simulate;
  AnalyzeArgs analyze;
  CurveArgs curve;
  RabiArgs rabi;
  ReportArgs report;
};

struct Subcommands {
  CLI::App* simulate = nullptr;
  CLI::App* analyze = nullptr;
  CLI::App* curve = nullptr;
  CLI::App* curve_fss = nullptr;
  CLI::App* curve_rabi = nullptr;
  CLI::App* report = nullptr;
};

Subcommands build_app(CLI::App& app, CliArgs& args) {
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", "qdcascade 1.0.0");
  Subcommands sub;

  sub.simulate = app.add_subcommand(
      "simulate", "Generate a timestamped detection stream for one experiment");
  auto& sim = args.simulate;
  sub.simulate->add_option("--config", sim.config_path, "Run configuration file");
  sub.simulate->add_option("--out", sim.out_path, "Output tag file path")->required();
  sub.simulate->add_option("--format", sim.format, "Tag file encoding: binary or csv")
      ->check(CLI::IsMember({"binary", "csv"}));
  sub.simulate->add_option("--kind", sim.kind,
                           "Experiment kind (hbt_x, hbt_xx, cross_correlation, hom_x, hom_xx, "
                           "lifetime_x, lifetime_xx)");
  sub.simulate->add_option("--basis", sim.basis,
                           "Polarization basis for cross_correlation (linear, diagonal, circular)");
  sub.simulate->add_option("--relative-pol", sim.relative_pol,
                           "Analyzer configuration: co or cross");
  sub.simulate->add_option("--pulses", sim.pulses, "Number of excitation pulses");
  sub.simulate->add_option("--seed", sim.seed, "Master seed of the run");
  sub.simulate->add_option("--fss", sim.fss, "Fine structure splitting in ueV");
  sub.simulate->add_option("--tau-x", sim.tau_x, "Exciton lifetime in ps");
  sub.simulate->add_option("--tau-xx", sim.tau_xx, "Biexciton lifetime in ps");
  sub.simulate->add_option("--tau-ss", sim.tau_ss, "Spin-scattering time in ps");
  sub.simulate->add_option("--eta-xx", sim.eta_xx, "Preparation probability per pulse");
  sub.simulate->add_option("--eta", sim.eta, "Collection efficiency");
  sub.simulate->add_option("--xi", sim.xi, "Setup transmission");
  sub.simulate->add_option("--g2-x", sim.g2_x, "Residual X autocorrelation");
  sub.simulate->add_option("--g2-xx", sim.g2_xx, "Residual XX autocorrelation");
  sub.simulate->add_option("--rep-rate", sim.rep_rate, "Repetition rate in MHz");
  sub.simulate->add_option("--overlap-m", sim.overlap_m, "Wavepacket overlap for interference");
  sub.simulate->add_option("--apd-correction", sim.apd_correction,
                           "Detector nonlinearity correction factor");
  sub.simulate->add_option("--mzi-delay", sim.mzi_delay, "Interferometer delay in ps");
  sub.simulate->add_option("--double-pulse-sep", sim.double_pulse_sep,
                           "Separation of the two excitation pulses in ps");
  sub.simulate->add_option("--irf-sigma", sim.irf_sigma, "Detector timing jitter sigma in ps");
  sub.simulate->add_option("--dark-rate", sim.dark_rate, "Dark count rate per channel in Hz");

  sub.analyze = app.add_subcommand(
      "analyze", "Extract figures of merit from one or more tag files");
  auto& ana = args.analyze;
  sub.analyze->add_option("inputs", ana.inputs, "Tag files to analyze");
  sub.analyze->add_option("--fss-scan", ana.fss_scan,
                          "CSV polarization scan (angle_deg,delta_e_uev) for the FSS fit");
  sub.analyze->add_option("--bin-width", ana.bin_width, "Coincidence bin width in ps");
  sub.analyze->add_option("--lifetime-bin-width", ana.lifetime_bin_width,
                          "Decay histogram bin width in ps");
  sub.analyze->add_option("--window", ana.window, "Peak integration window in ps (0 = default)");
  sub.analyze->add_option("--range-periods", ana.range_periods,
                          "Side peaks on each side of zero delay");
  sub.analyze->add_option("--g2-threshold", ana.g2_threshold, "Pass threshold for g2(0)");
  sub.analyze->add_option("--fidelity-threshold", ana.fidelity_threshold,
                          "Pass threshold for the entanglement fidelity");
  sub.analyze->add_option("--visibility-threshold", ana.visibility_threshold,
                          "Pass threshold for interference visibilities");
  sub.analyze->add_option("--report", ana.report_path, "Write the human-readable report here");
  sub.analyze->add_option("--report-kv", ana.report_kv_path,
                          "Write the machine-readable report here");

  sub.curve = app.add_subcommand("curve", "Emit plot-ready CSV tables");
  sub.curve->require_subcommand(1);
  sub.curve_fss = sub.curve->add_subcommand("fidelity-vs-fss",
                                            "Entanglement fidelity as a function of the FSS");
  auto& cur = args.curve;
  sub.curve_fss->add_option("--tau-x", cur.tau_x, "Exciton lifetime in ps");
  sub.curve_fss->add_option("--tau-ss", cur.tau_ss, "Spin-scattering time in ps");
  sub.curve_fss->add_option("--from", cur.from, "First FSS value in ueV");
  sub.curve_fss->add_option("--to", cur.to, "Last FSS value in ueV");
  sub.curve_fss->add_option("--step", cur.step, "FSS grid step in ueV");
  sub.curve_fss->add_option("--out", cur.out, "Output CSV path (stdout when omitted)");

  sub.curve_rabi = sub.curve->add_subcommand(
      "rabi", "Detected rate versus excitation power (preparation probability curve)");
  auto& rabi = args.rabi;
  sub.curve_rabi->add_option("--p-pi", rabi.p_pi, "Pulse power of maximum preparation, nW");
  sub.curve_rabi->add_option("--eta-max", rabi.eta_max, "Preparation probability at the pi pulse");
  sub.curve_rabi->add_option("--from", rabi.from, "First power value in nW");
  sub.curve_rabi->add_option("--to", rabi.to, "Last power value in nW");
  sub.curve_rabi->add_option("--step", rabi.step, "Power grid step in nW");
  sub.curve_rabi->add_option("--rep-rate", rabi.rep_rate, "Repetition rate in MHz");
  sub.curve_rabi->add_option("--eta", rabi.eta, "Collection efficiency");
  sub.curve_rabi->add_option("--xi", rabi.xi, "Setup transmission");
  sub.curve_rabi->add_option("--out", rabi.out, "Output CSV path (stdout when omitted)");

  sub.report = app.add_subcommand("report", "Render or compare figure-of-merit reports");
  auto& rep = args.report;
  sub.report->add_option("--fom", rep.fom_path, "Machine-readable report to render");
  sub.report->add_flag("--compare", rep.compare,
                       "Print the bundled source comparison table alongside the report");
  sub.report->add_option("--reference", rep.reference_path,
                         "Reference comparison table (CSV with citations)");
  sub.report->add_option("--out", rep.out, "Write the table here instead of stdout");

  return sub;
}

void check_kind_flags(const SimulateArgs& a, const ExperimentConfig& config) {
  const ExperimentKind kind = config.kind;
  if (a.basis && kind != ExperimentKind::cross_correlation)
    throw ValidationError("--basis only applies to cross_correlation runs");
  if (a.relative_pol && kind != ExperimentKind::cross_correlation && !is_hom(kind))
    throw ValidationError("--relative-pol only applies to cross_correlation and hom runs");
  if ((a.mzi_delay || a.double_pulse_sep) && !is_hom(kind))
    throw ValidationError("--mzi-delay/--double-pulse-sep only apply to hom runs");
}

int cmd_simulate(const SimulateArgs& a) {
  RunConfig run = a.config_path.empty() ? RunConfig{} : parse_config_file(a.config_path);

  auto set = [](std::optional<double> v, double& field) {
    if (v) field = *v;
  };
  set(a.fss, run.source.fss_uev);
  set(a.tau_x, run.source.tau_x_ps);
  set(a.tau_xx, run.source.tau_xx_ps);
  set(a.tau_ss, run.source.tau_ss_ps);
  set(a.eta_xx, run.source.eta_xx);
  set(a.eta, run.source.eta);
  set(a.xi, run.source.xi);
  set(a.g2_x, run.source.g2_x);
  set(a.g2_xx, run.source.g2_xx);
  set(a.rep_rate, run.source.rep_rate_mhz);
  set(a.overlap_m, run.source.overlap_m);
  set(a.apd_correction, run.source.apd_correction);
  if (a.kind) run.experiment.kind = parse_experiment_kind(*a.kind);
  if (a.basis) run.experiment.basis = parse_basis(*a.basis);
  if (a.relative_pol) run.experiment.relative_pol = parse_relative_pol(*a.relative_pol);
  set(a.mzi_delay, run.experiment.mzi_delay_ps);
  set(a.double_pulse_sep, run.experiment.double_pulse_sep_ps);
  set(a.irf_sigma, run.experiment.irf_sigma_ps);
  set(a.dark_rate, run.experiment.dark_rate_hz);
  if (a.pulses) run.experiment.n_pulses = *a.pulses;
  if (a.seed) run.experiment.seed = *a.seed;

  check_kind_flags(a, run.experiment);
  run.source.validate();
  run.experiment.validate();

  const TimeTagStream stream = simulate(run.source, run.experiment);
  write_tagfile(stream, a.out_path, a.format == "csv" ? TagFormat::csv : TagFormat::binary);
  std::cout << "wrote " << stream.records.size() << " records to " << a.out_path << '\n';
  return 0;
}

void parse_fss_scan(const std::string& path, std::vector<double>& angles,
                    std::vector<double>& energies) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
      continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("fss scan: expected angle_deg,delta_e_uev in " + path);
    try {
      angles.push_back(std::stod(line.substr(0, comma)));
      energies.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ValidationError("fss scan: malformed line \"" + line + "\"");
    }
  }
}

int cmd_analyze(const AnalyzeArgs& a) {
  if (a.inputs.empty() && a.fss_scan.empty())
    throw ValidationError("analyze: give at least one tag file or --fss-scan");

  std::vector<TimeTagStream> streams;
  streams.reserve(a.inputs.size());
  for (const std::string& path : a.inputs) streams.push_back(read_tagfile(path));

  AnalysisOptions options;
  if (a.bin_width) options.bin_width_ps = *a.bin_width;
  if (a.lifetime_bin_width) options.lifetime_bin_width_ps = *a.lifetime_bin_width;
  if (a.window) options.window_ps = *a.window;
  if (a.range_periods) options.range_periods = *a.range_periods;
  if (a.g2_threshold) options.thresholds.g2_max = *a.g2_threshold;
  if (a.fidelity_threshold) options.thresholds.fidelity_min = *a.fidelity_threshold;
  if (a.visibility_threshold) options.thresholds.visibility_min = *a.visibility_threshold;

  FomEstimates estimates = analyze_streams(streams, options);
  if (!a.fss_scan.empty()) {
    std::vector<double> angles, energies;
    parse_fss_scan(a.fss_scan, angles, energies);
    estimates.fss_uev = fit_fss(angles, energies).fss_uev;
  }

  const SourceParams params = streams.empty() ? SourceParams{} : streams.front().header.params;
  const FomReport report = compile_report(estimates, params, options.thresholds);

  const std::string text = render_report_text(report);
  std::cout << text;
  if (!a.report_path.empty()) write_file_atomic(a.report_path, text);
  if (!a.report_kv_path.empty()) write_file_atomic(a.report_kv_path, render_report_kv(report));
  return 0;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0)) throw ValidationError("curve: step must be > 0");
  if (!(to >= from)) throw ValidationError("curve: to must be >= from");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
  grid.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(from + static_cast<double>(i) * step);
  return grid;
}

void emit_table(const std::string& out_path, const std::string& table) {
  if (out_path.empty())
    std::cout << table;
  else
    write_file_atomic(out_path, table);
}

int cmd_curve_fss(const CurveArgs& a) {
  SourceParams params;
  params.tau_x_ps = a.tau_x;
  params.tau_ss_ps = a.tau_ss;
  const std::vector<double> grid = make_grid(a.from, a.to, a.step);
  std::ostringstream os;
  os << "fss_uev,fidelity\n";
  for (const auto& [s, f] : fidelity_vs_fss_curve(params, grid))
    os << format_double(s) << ',' << format_double(f) << '\n';
  emit_table(a.out, os.str());
  return 0;
}

int cmd_curve_rabi(const RabiArgs& a) {
  if (!(a.rep_rate > 0.0)) throw ValidationError("curve rabi: rep-rate must be > 0");
  const std::vector<double> grid = make_grid(a.from, a.to, a.step);
  std::ostringstream os;
  os << "power_nw,sqrt_power_ratio,eta_xx,detected_rate_mhz\n";
  for (double p : grid) {
    const double eta_xx = rabi_preparation_probability(p, a.p_pi, a.eta_max);
    const double rate = a.rep_rate * eta_xx * a.eta * a.xi;
    os << format_double(p) << ',' << format_double(std::sqrt(p / a.p_pi)) << ','
       << format_double(eta_xx) << ',' << format_double(rate) << '\n';
  }
  emit_table(a.out, os.str());
  return 0;
}

/// Minimal CSV row splitter; the last field may be quoted.
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(0, 1);
    kv[key] = value;
  }
  return kv;
}

int cmd_report(const ReportArgs& a) {
  std::ostringstream os;

  std::map<std::string, std::string> fom;
  if (!a.fom_path.empty()) fom = parse_kv_file(a.fom_path);
  if (!a.compare && a.fom_path.empty())
    throw ValidationError("report: give --fom and/or --compare");

  if (!a.compare) {
    os << "figures of merit (" << a.fom_path << ")\n";
    for (const auto& [key, value] : fom) os << "  " << key << " = " << value << '\n';
    emit_table(a.out, os.str());
    return 0;
  }

  const std::string text = read_file(a.reference_path);
  std::istringstream in(text);
  std::string header_line;
  std::getline(in, header_line);
  std::vector<std::array<std::string, 5>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 5)
      throw ValidationError("reference table: expected 5 columns in \"" + line + "\"");
    rows.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
  }

  os << "entangled photon pair sources: pair efficiency / fidelity / indistinguishability\n";
  for (const auto& row : rows) {
    os << "  " << row[0];
    for (std::size_t i = row[0].size(); i < 44; ++i) os << ' ';
    os << row[1] << " / " << row[2] << " / " << row[3] << "    [" << row[4] << "]\n";
  }
  if (!fom.empty()) {
    auto value_or = [&](const char* key, const char* fallback) {
      const auto it = fom.find(key);
      return it == fom.end() ? std::string(fallback) : it->second;
    };
    os << "  measured (this run)";
    for (std::size_t i = std::string("measured (this run)").size(); i < 44; ++i) os << ' ';
    os << value_or("fom.pair_probability", "n/a") << " / " << value_or("fom.fidelity", "n/a")
       << " / " << value_or("fom.v_hom_x", "n/a") << "    [analyze output]\n";
  }
  emit_table(a.out, os.str());
  return 0;
}

void collect_flags(const CLI::App* app, std::vector<std::string>& out) {
  for (const CLI::Option* opt : app->get_options())
    for (const std::string& name : opt->get_lnames()) out.push_back("--" + name);
  for (const CLI::App* sub : app->get_subcommands({})) collect_flags(sub, out);
}

}  // namespace

std::vector<std::string> cli_flag_names() {
  CliArgs args;
  CLI::App app{"qdcascade"};
  build_app(app, args);
  std::vector<std::string> names;
  collect_flags(&app, names);
  return names;
}

int run_command(int argc, const char* const* argv) {
  CliArgs args;
  CLI::App app{
      "Simulation and time-tag analysis toolkit for quantum-dot cascade photon-pair sources"};
  app.name("qdcascade");
  const Subcommands sub = build_app(app, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help/version requests exit 0, real parse errors map to 2
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sub.simulate->parsed()) return cmd_simulate(args.simulate);
    if (sub.analyze->parsed()) return cmd_analyze(args.analyze);
    if (sub.curve->parsed()) {
      if (sub.curve_fss->parsed()) return cmd_curve_fss(args.curve);
      if (sub.curve_rabi->parsed()) return cmd_curve_rabi(args.rabi);
    }
    if (sub.report->parsed()) return cmd_report(args.report);
    std::cerr << app.help();
    return 2;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace qdc
