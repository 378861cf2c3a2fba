#include "qdc/cascade_mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <tuple>

#include "qdc/physics.hpp"

namespace qdc {

namespace {

constexpr std::uint16_t kDarkBoth[] = {0, 1};
constexpr std::uint16_t kDarkPhotonOnly[] = {1};

std::int64_t to_timestamp(double t_ps) {
  return std::max<std::int64_t>(0, std::llround(t_ps));
}

struct RecordSink {
  std::vector<DetectionRecord>& out;
  void emit(std::uint16_t channel, std::uint64_t pulse, double t_ps) {
    out.push_back({channel, pulse, to_timestamp(t_ps)});
  }
};

/// Emission delay of the selected transition relative to its excitation.
/// The X photon inherits the biexciton delay it cascades through.
double transition_delay(const SourceParams& p, bool x_line, PulseRng& rng) {
  double d = rng.exponential(p.tau_xx_ps);
  if (x_line) d += rng.exponential(p.tau_x_ps);
  return d;
}

void dark_counts(const ExperimentConfig& config, const SourceParams& params,
                 std::uint64_t pulse_index, double period_start_ps,
                 std::span<const std::uint16_t> channels, PulseRng& rng, RecordSink sink) {
  if (config.dark_rate_hz <= 0.0) return;
  const double period = params.rep_period_ps();
  const double mean = config.dark_rate_hz * period * 1e-12;
  for (std::uint16_t ch : channels) {
    const std::uint64_t n = rng.poisson(mean);
    for (std::uint64_t i = 0; i < n; ++i)
      sink.emit(ch, pulse_index, period_start_ps + rng.uniform() * period);
  }
}

struct PulseContext {
  const SourceParams& params;
  const ExperimentConfig& config;
  std::vector<EmissionEvent>& scratch;
  std::vector<DetectionRecord>& out;
};

void run_hbt_pulse(const PulseContext& ctx, std::uint64_t pulse, double beta) {
  const SourceParams& p = ctx.params;
  PulseRng rng(ctx.config.seed, pulse);
  const double pulse_time = (static_cast<double>(pulse) + 1.0) * p.rep_period_ps();
  const bool x_line = ctx.config.kind == ExperimentKind::hbt_x;

  ctx.scratch.clear();
  std::uint64_t photons = rng.bernoulli(p.eta_xx) ? 1 : 0;
  photons += rng.poisson(beta);
  for (std::uint64_t i = 0; i < photons; ++i) {
    const double delay = transition_delay(p, x_line, rng);
    const std::uint16_t port = rng.bernoulli(0.5) ? 1 : 0;
    ctx.scratch.push_back({port, pulse_time + delay});
  }
  apply_detection_chain(ctx.scratch, p, ctx.config, pulse, pulse_time - 0.5 * p.rep_period_ps(),
                        kDarkBoth, rng, ctx.out);
}

void run_cross_pulse(const PulseContext& ctx, std::uint64_t pulse, const Jones& analyzer_x,
                     const Jones& analyzer_xx) {
  const SourceParams& p = ctx.params;
  PulseRng rng(ctx.config.seed, pulse);
  const double pulse_time = (static_cast<double>(pulse) + 1.0) * p.rep_period_ps();

  ctx.scratch.clear();
  if (rng.bernoulli(p.eta_xx)) {
    const CascadeOutcome cascade = sample_pair_event(p, rng);
    const auto [x_port, xx_port] =
        project_polarization(cascade.pair_state, analyzer_x, analyzer_xx, rng);
    if (xx_port == 0) ctx.scratch.push_back({0, pulse_time + cascade.xx_emit_ps});
    if (x_port == 0) ctx.scratch.push_back({1, pulse_time + cascade.x_emit_ps});
  }
  apply_detection_chain(ctx.scratch, p, ctx.config, pulse, pulse_time - 0.5 * p.rep_period_ps(),
                        kDarkBoth, rng, ctx.out);
}

void run_lifetime_pulse(const PulseContext& ctx, std::uint64_t pulse) {
  const SourceParams& p = ctx.params;
  PulseRng rng(ctx.config.seed, pulse);
  const double pulse_time = (static_cast<double>(pulse) + 1.0) * p.rep_period_ps();
  RecordSink sink{ctx.out};

  sink.emit(0, pulse, pulse_time);  // electronic sync, no loss or jitter
  ctx.scratch.clear();
  if (rng.bernoulli(p.eta_xx)) {
    // bare decay of the selected line, matching the single-exponential
    // response model the lifetime fit assumes (no biexciton feeding delay)
    const double tau =
        ctx.config.kind == ExperimentKind::lifetime_x ? p.tau_x_ps : p.tau_xx_ps;
    ctx.scratch.push_back({1, pulse_time + rng.exponential(tau)});
  }
  apply_detection_chain(ctx.scratch, p, ctx.config, pulse, pulse_time - 0.5 * p.rep_period_ps(),
                        kDarkPhotonOnly, rng, ctx.out);
}

/// One laser period of the HOM experiment: two excitations, each photon
/// routed through the short or long interferometer arm, photons meeting at
/// the output combiner leave through correlated ports. Detection loss is
/// applied before routing; for these counting statistics loss commutes with
/// the interferometer.
void run_hom_period(const PulseContext& ctx, std::uint64_t period) {
  const SourceParams& p = ctx.params;
  const ExperimentConfig& c = ctx.config;
  const double period_time = (static_cast<double>(period) + 1.0) * p.rep_period_ps();
  const bool x_line = c.kind == ExperimentKind::hom_x;
  const double survive = p.eta * p.xi;

  struct CombinerPhoton {
    double arrival_ps;
    std::uint64_t pulse;
    bool present = false;
    int port = 0;
  };
  CombinerPhoton photon[2];

  PulseRng rng_a(c.seed, 2 * period);
  PulseRng rng_b(c.seed, 2 * period + 1);
  const std::uint64_t n_exc = std::min<std::uint64_t>(2, c.n_pulses - 2 * period);
  for (std::uint64_t sub = 0; sub < n_exc; ++sub) {
    PulseRng& rng = sub == 0 ? rng_a : rng_b;
    if (!rng.bernoulli(p.eta_xx) || !rng.bernoulli(survive)) continue;
    const double delay = transition_delay(p, x_line, rng);
    const double arm = rng.bernoulli(0.5) ? c.mzi_delay_ps : 0.0;
    photon[sub].arrival_ps =
        period_time + static_cast<double>(sub) * c.double_pulse_sep_ps + delay + arm;
    photon[sub].pulse = 2 * period + sub;
    photon[sub].present = true;
  }

  const bool meet = photon[0].present && photon[1].present &&
                    std::abs(photon[0].arrival_ps - photon[1].arrival_ps) <= 0.5 * c.mzi_delay_ps;
  if (meet) {
    const double p_pol = c.relative_pol == RelativePol::co ? 1.0 : 0.0;
    const bool same_port = rng_a.bernoulli(0.5 * (1.0 + p.overlap_m * p_pol));
    const int first = rng_a.bernoulli(0.5) ? 1 : 0;
    photon[0].port = first;
    photon[1].port = same_port ? first : 1 - first;
  } else {
    for (auto& ph : photon)
      if (ph.present) ph.port = rng_a.bernoulli(0.5) ? 1 : 0;
  }

  RecordSink sink{ctx.out};
  for (auto& ph : photon) {
    if (!ph.present) continue;
    const double jitter = c.irf_sigma_ps > 0.0 ? rng_a.normal(c.irf_sigma_ps) : 0.0;
    sink.emit(static_cast<std::uint16_t>(ph.port), ph.pulse, ph.arrival_ps + jitter);
  }
  dark_counts(c, p, 2 * period, period_time - 0.5 * p.rep_period_ps(), kDarkBoth, rng_a, sink);
}

}  // namespace

CascadeOutcome sample_pair_event(const SourceParams& params, PulseRng& rng) {
  CascadeOutcome outcome;
  outcome.xx_emit_ps = rng.exponential(params.tau_xx_ps);
  const double x_delay = rng.exponential(params.tau_x_ps);
  outcome.x_emit_ps = outcome.xx_emit_ps + x_delay;

  const double k = scattering_survival(params.tau_x_ps, params.tau_ss_ps);
  outcome.spin_flipped = rng.bernoulli(1.0 - k);
  if (outcome.spin_flipped) {
    const int idx = std::min(3, static_cast<int>(rng.uniform() * 4.0));
    outcome.pair_state = PairKet::Zero();
    outcome.pair_state(idx) = 1.0;
  } else {
    // Phase sign chosen so that ensemble averages of |psi><psi| land on the
    // +i x coherence convention of model_density_matrix.
    const double phase = -params.fss_uev * x_delay / kHbarUevPs;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    outcome.pair_state = PairKet::Zero();
    outcome.pair_state(0) = inv_sqrt2;
    outcome.pair_state(3) = std::polar(inv_sqrt2, phase);
  }
  return outcome;
}

std::pair<int, int> project_polarization(const PairKet& state, const Jones& analyzer_x,
                                         const Jones& analyzer_xx, PulseRng& rng) {
  if (std::abs(analyzer_x.norm() - 1.0) > 1e-9 || std::abs(analyzer_xx.norm() - 1.0) > 1e-9)
    throw ValidationError("project_polarization: analyzers must be unit vectors");

  const Jones ax[2] = {analyzer_x, orthogonal(analyzer_x)};
  const Jones axx[2] = {analyzer_xx, orthogonal(analyzer_xx)};
  double prob[4];
  double total = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const complexd amp = pair_product(ax[i], axx[j]).dot(state);
      prob[2 * i + j] = std::norm(amp);
      total += prob[2 * i + j];
    }

  double u = rng.uniform() * total;
  for (int idx = 0; idx < 4; ++idx) {
    u -= prob[idx];
    if (u <= 0.0) return {idx >> 1, idx & 1};
  }
  return {1, 1};
}

void apply_detection_chain(std::span<const EmissionEvent> events, const SourceParams& params,
                           const ExperimentConfig& config, std::uint64_t pulse_index,
                           double period_start_ps, std::span<const std::uint16_t> dark_channels,
                           PulseRng& rng, std::vector<DetectionRecord>& out) {
  RecordSink sink{out};
  const double survive = params.eta * params.xi;
  for (const EmissionEvent& ev : events) {
    if (!rng.bernoulli(survive)) continue;
    const double jitter = config.irf_sigma_ps > 0.0 ? rng.normal(config.irf_sigma_ps) : 0.0;
    sink.emit(ev.channel, pulse_index, ev.time_ps + jitter);
  }
  dark_counts(config, params, pulse_index, period_start_ps, dark_channels, rng, sink);
}

double hbt_background_rate(double eta_xx, double g2_target) {
  if (!(g2_target >= 0.0 && g2_target < 1.0))
    throw ValidationError("hbt_background_rate: g2 must be in [0, 1)");
  // With a Bernoulli(eta_xx) signal photon and Poisson(beta) background the
  // normalized zero-delay area is 1 - (eta_xx / (eta_xx + beta))^2.
  return eta_xx * (1.0 / std::sqrt(1.0 - g2_target) - 1.0);
}

unsigned simulation_worker_count() {
  if (const char* env = std::getenv("CSTG_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

TimeTagStream simulate(const SourceParams& params, const ExperimentConfig& config) {
  params.validate();
  config.validate();

  const bool hom = is_hom(config.kind);
  const std::uint64_t units = hom ? (config.n_pulses + 1) / 2 : config.n_pulses;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(simulation_worker_count(), units));

  double beta = 0.0;
  if (is_hbt(config.kind))
    beta = hbt_background_rate(
        params.eta_xx, config.kind == ExperimentKind::hbt_x ? params.g2_x : params.g2_xx);

  BasisVectors vecs = basis_vectors(config.basis);
  const Jones analyzer_xx = vecs.a;
  const Jones analyzer_x = config.relative_pol == RelativePol::co ? vecs.a : vecs.b;

  std::vector<std::vector<DetectionRecord>> partial(workers);
  auto worker = [&](unsigned w) {
    const std::uint64_t begin = units * w / workers;
    const std::uint64_t end = units * (w + 1) / workers;
    std::vector<EmissionEvent> scratch;
    scratch.reserve(16);
    PulseContext ctx{params, config, scratch, partial[w]};
    for (std::uint64_t u = begin; u < end; ++u) {
      switch (config.kind) {
        case ExperimentKind::hbt_x:
        case ExperimentKind::hbt_xx:
          run_hbt_pulse(ctx, u, beta);
          break;
        case ExperimentKind::cross_correlation:
          run_cross_pulse(ctx, u, analyzer_x, analyzer_xx);
          break;
        case ExperimentKind::hom_x:
        case ExperimentKind::hom_xx:
          run_hom_period(ctx, u);
          break;
        case ExperimentKind::lifetime_x:
        case ExperimentKind::lifetime_xx:
          run_lifetime_pulse(ctx, u);
          break;
      }
    }
  };

  if (workers <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  TimeTagStream stream;
  stream.header.params = params;
  stream.header.config = config;
  std::size_t total = 0;
  for (const auto& part : partial) total += part.size();
  stream.records.reserve(total);
  for (auto& part : partial) {
    stream.records.insert(stream.records.end(), part.begin(), part.end());
    part.clear();
    part.shrink_to_fit();
  }
  std::sort(stream.records.begin(), stream.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.timestamp_ps, a.channel, a.pulse_index) <
           std::tie(b.timestamp_ps, b.channel, b.pulse_index);
  });
  stream.header.record_count = stream.records.size();
  return stream;
}

}  // namespace qdc
