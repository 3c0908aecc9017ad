#include "atdf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "atdf/error.hpp"

namespace atdf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

// Runs f(i) for i in [0, n) on a small worker pool. Results are written by
// index, so the output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
}

std::size_t first_index_at_or_after(const TimeSeries& ts, double t) {
  if (ts.samples.empty()) return 0;
  const double pos = (t - ts.t0) / ts.dt;
  if (pos <= 0.0) return 0;
  // Tolerate round-off in t0 + k dt.
  const double k = std::ceil(pos - 1e-9);
  return static_cast<std::size_t>(std::min(k, static_cast<double>(ts.samples.size())));
}

std::size_t last_index_at_or_before(const TimeSeries& ts, double t) {
  const double pos = (t - ts.t0) / ts.dt;
  const double k = std::floor(pos + 1e-9);
  if (k < 0.0) return 0;
  return static_cast<std::size_t>(std::min(k, static_cast<double>(ts.samples.size() - 1)));
}

RunMetrics judge(const TimeSeries& response, double target, double step, double last_impulse,
                 double judged_from, double judged_until) {
  RunMetrics m;
  const double scale = std::abs(step);
  const std::size_t from = first_index_at_or_after(response, judged_from);
  const std::size_t until = last_index_at_or_before(response, judged_until);
  if (from >= response.size() || from > until) {
    m.residual_vibration = kNaN;
  } else {
    double worst = 0.0;
    for (std::size_t k = from; k <= until; ++k) {
      worst = std::max(worst, std::abs(response.samples[k] - target));
    }
    m.residual_vibration = worst / scale;
  }
  const double sign = step > 0.0 ? 1.0 : -1.0;
  double over = 0.0;
  for (std::size_t k = first_index_at_or_after(response, last_impulse); k <= until && k < response.size();
       ++k) {
    over = std::max(over, sign * (response.samples[k] - target));
  }
  m.overshoot = over / scale;
  m.settle_error = std::abs(response.samples[until] - target) / scale;
  return m;
}

void append(TimeSeries& into, const TimeSeries& more) {
  into.samples.insert(into.samples.end(), more.samples.begin(), more.samples.end());
}

void check_reference(const PiecewiseConstantSignal& reference, double tau) {
  if (reference.initial_level() != 0.0) {
    throw Error(Errc::InvalidArgument, "reference must start from 0 (plant at rest)");
  }
  if (reference.level_at(0.0) == 0.0) {
    throw Error(Errc::InvalidArgument, "reference must command a nonzero level at t = 0");
  }
  for (const auto& e : reference.events()) {
    if (e.time > 0.0 && e.time <= tau) {
      throw Error(Errc::InvalidArgument,
                  "reference must stay constant during the estimation window [0, tau]");
    }
  }
}

struct Identification {
  TimeSeries window;  // samples of the main trajectory on [0, tau]
  ResponseFeatures features;
  Estimate estimate;
  bool from_probe = false;
};

// Estimation phase. Only sampled responses leave the simulator.
Identification identify_phase(Simulator& sim, const PlantParams& plant, double level,
                              const ShaperConfig& config, const AdaptiveOptions& options) {
  Identification id;
  id.window = sim.advance(estimation_prefix(level, config.K, config.tau), config.tau);
  const double amplitude = config.K * level;
  if (options.probe_window) {
    if (!(*options.probe_window > 0.0)) {
      throw Error(Errc::InvalidArgument, "probe window must be > 0");
    }
    Simulator probe(plant, sim.dt());
    const TimeSeries trial =
        probe.advance(estimation_prefix(level, config.K, *options.probe_window), *options.probe_window);
    id.features = extract_features(trial, amplitude);
    id.from_probe = true;
  } else {
    id.features = extract_features(id.window, amplitude);
  }
  id.estimate = estimate(id.features, classify(id.features));
  return id;
}

// Shaped tracking from tau on, continuing the estimation trajectory.
RunResult finish(Simulator& sim, Identification id, const ShaperDesign& design,
                 const PiecewiseConstantSignal& reference, const ShaperConfig& config,
                 const AdaptiveOptions& options) {
  RunResult r;
  r.estimate = id.estimate;
  r.features = std::move(id.features);
  r.identified_from_probe = id.from_probe;
  r.design = design;
  r.reference = reference;
  r.shaped = shape(reference, design);
  r.shaped.estimation_end = config.tau;
  r.estimation_end = config.tau;
  r.estimation_samples = id.window.size();

  const double dt = sim.dt();
  const double last_change = reference.events().back().time;
  const double last_impulse = design.last_impulse_time();
  const double margin = residual_margin(id.estimate.omega_n_hat, dt);
  const double needed = last_change + last_impulse + margin;
  double t_end = last_change + last_impulse + 10.0 * 2.0 * kPi / id.estimate.omega_n_hat;
  if (options.t_end) {
    if (*options.t_end <= needed) {
      throw Error(Errc::InvalidArgument,
                  "t_end = " + std::to_string(*options.t_end) +
                      " ends before the last impulse has settled (needs > " + std::to_string(needed) +
                      ")");
    }
    t_end = *options.t_end;
  }

  r.response = std::move(id.window);
  append(r.response, sim.advance(r.shaped.signal, t_end));

  const auto events = reference.events();
  double previous = reference.initial_level();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double step = events[i].level - previous;
    previous = events[i].level;
    if (step == 0.0) continue;
    TransitionMetrics tm;
    tm.time = events[i].time;
    tm.level = events[i].level;
    tm.step = step;
    tm.judged_from = tm.time + last_impulse + margin;
    tm.judged_until = i + 1 < events.size() ? events[i + 1].time : r.response.end_time();
    tm.metrics = judge(r.response, tm.level, step, tm.time + last_impulse, tm.judged_from,
                       tm.judged_until);
    r.transitions.push_back(tm);
  }
  for (const auto& tm : r.transitions) {
    auto worst = [](double a, double b) { return std::isnan(b) || b > a ? b : a; };
    r.metrics.residual_vibration = worst(r.metrics.residual_vibration, tm.metrics.residual_vibration);
    r.metrics.overshoot = worst(r.metrics.overshoot, tm.metrics.overshoot);
    r.metrics.settle_error = worst(r.metrics.settle_error, tm.metrics.settle_error);
  }
  return r;
}

ShaperDesign baseline_for(const ShaperConfig& config, const Estimate& est) {
  switch (est.damping) {
    case DampingClass::Undamped:
      return design_fixed_baseline(config, 0.0, est.omega_n_hat);
    case DampingClass::Underdamped:
      return design_fixed_baseline(config, std::min(est.zeta_hat, shaper_tuning::kMaxDampedZeta),
                                   est.omega_n_hat);
    case DampingClass::CriticallyDamped:
      break;
  }
  return design_fixed_baseline(config, shaper_tuning::kMaxDampedZeta, est.omega_n_hat);
}

SweepRow failed_row(double zeta, double omega_n, double tau, double K, double dt,
                    const std::string& why) {
  SweepRow row;
  row.zeta = zeta;
  row.omega_n = omega_n;
  row.tau = tau;
  row.K = K;
  row.zeta_hat = row.omega_n_hat = row.A = row.T = row.residual_vibration = kNaN;
  row.dt = dt;
  row.error = why.empty() ? "failed" : why;
  return row;
}

}  // namespace

double residual_vibration(const TimeSeries& response, double target, double t_after, double step) {
  if (step == 0.0) throw Error(Errc::InvalidArgument, "step magnitude must be nonzero");
  double worst = 0.0;
  for (std::size_t k = first_index_at_or_after(response, t_after); k < response.size(); ++k) {
    worst = std::max(worst, std::abs(response.samples[k] - target));
  }
  return worst / std::abs(step);
}

double residual_margin(double omega_n, double dt) noexcept {
  return 0.02 * (2.0 * kPi / omega_n) + 2.0 * dt;
}

RunResult run_adaptive(const PlantParams& plant, const PiecewiseConstantSignal& reference,
                       const ShaperConfig& config, double dt, const AdaptiveOptions& options) {
  plant.validate();
  config.validate();
  check_reference(reference, config.tau);
  Simulator sim(plant, dt);
  Identification id = identify_phase(sim, plant, reference.level_at(0.0), config, options);
  const ShaperDesign d = design(config, id.estimate);
  return finish(sim, std::move(id), d, reference, config, options);
}

BaselineComparison run_baseline_comparison(const PlantParams& plant, const ShaperConfig& config,
                                           double dt, const AdaptiveOptions& options) {
  const auto reference = PiecewiseConstantSignal::step(1.0);
  BaselineComparison out;
  out.adaptive = run_adaptive(plant, reference, config, dt, options);

  plant.validate();
  config.validate();
  Simulator sim(plant, dt);
  Identification id = identify_phase(sim, plant, 1.0, config, options);
  ShaperDesign applied = baseline_for(config, id.estimate);
  // Impulses whose slot passed during estimation can only fire at tau.
  for (std::size_t i = 1; i < applied.impulses.size(); ++i) {
    applied.impulses[i].time = std::max(applied.impulses[i].time, config.tau);
  }
  out.fixed = finish(sim, std::move(id), applied, reference, config, options);
  return out;
}

RunResult run_unshaped(const PlantParams& plant, double dt, double t_end) {
  RunResult r;
  r.reference = PiecewiseConstantSignal::step(1.0);
  r.design = pass_through_design();
  r.shaped = shape(r.reference, r.design);
  r.response = simulate(plant, r.reference, dt, t_end);
  const double margin = residual_margin(plant.omega_n, dt);
  TransitionMetrics tm;
  tm.level = 1.0;
  tm.step = 1.0;
  tm.judged_from = margin;
  tm.judged_until = r.response.end_time();
  tm.metrics = judge(r.response, 1.0, 1.0, 0.0, tm.judged_from, tm.judged_until);
  r.transitions.push_back(tm);
  r.metrics = tm.metrics;
  return r;
}

std::vector<SweepRow> table1_experiment(const Table1Options& options) {
  struct Scenario {
    double zeta, omega_n, tau;
    bool coarse;
  };
  const std::vector<Scenario> scenarios = {
      {0.0, kPi, 2.0, false},          {0.5, kPi, 2.0, false},
      {0.707, kPi, 2.0, false},        {1.0, kPi, 2.0, false},
      {0.707, 3 * kPi, 2.0, false},    {0.707, 30 * kPi, 2.0, false},
      {0.707, 300 * kPi, 2.0, false},  {0.707, 3000 * kPi, 2.0, false},
      {0.707, 3 * kPi, 1.5, false},    {0.707, 3 * kPi, 15.0, false},
      {0.707, 3 * kPi, 50.0, false},   {0.707, 3 * kPi, 150.0, false},
      {0.707, 300 * kPi, 2.0, true},   {0.707, 3000 * kPi, 2.0, true},
  };
  std::vector<SweepRow> rows(scenarios.size());
  parallel_for(scenarios.size(), [&](std::size_t i) {
    const auto& s = scenarios[i];
    const double dt = s.coarse ? options.dt_coarse
                               : options.dt_fine.value_or(default_timestep(s.omega_n));
    try {
      const ShaperConfig config{options.K, s.tau};
      const RunResult r =
          run_adaptive({s.zeta, s.omega_n}, PiecewiseConstantSignal::step(1.0), config, dt);
      SweepRow row;
      row.zeta = s.zeta;
      row.omega_n = s.omega_n;
      row.tau = s.tau;
      row.K = options.K;
      row.zeta_hat = r.estimate.zeta_hat;
      row.omega_n_hat = r.estimate.omega_n_hat;
      row.A = r.design.A;
      row.T = r.design.T;
      row.residual_vibration = r.metrics.residual_vibration;
      row.dt = dt;
      rows[i] = row;
    } catch (const std::exception& e) {
      rows[i] = failed_row(s.zeta, s.omega_n, s.tau, options.K, dt, e.what());
    }
  });
  return rows;
}

std::vector<SweepRow> sweep_AT(const std::vector<double>& zeta_grid,
                               const std::vector<double>& omega_grid, const ShaperConfig& config) {
  if (zeta_grid.empty() || omega_grid.empty()) {
    throw Error(Errc::InvalidArgument, "sweep grids must be nonempty");
  }
  config.validate();
  const std::size_t n = zeta_grid.size() * omega_grid.size();
  std::vector<SweepRow> rows(n);
  parallel_for(n, [&](std::size_t i) {
    const double zeta = zeta_grid[i / omega_grid.size()];
    const double wn = omega_grid[i % omega_grid.size()];
    const double dt = default_timestep(wn);
    try {
      const ShaperDesign d = design_for(config, zeta, wn);
      const PlantParams plant{zeta, wn};
      const auto shaped = shape(PiecewiseConstantSignal::step(1.0), d);
      const double last = d.last_impulse_time();
      const TimeSeries resp = simulate(plant, shaped.signal, dt, last + 10.0 * 2.0 * kPi / wn);
      SweepRow row;
      row.zeta = zeta;
      row.omega_n = wn;
      row.tau = config.tau;
      row.K = config.K;
      row.zeta_hat = zeta;
      row.omega_n_hat = wn;
      row.A = d.A;
      row.T = d.T;
      row.residual_vibration = residual_vibration(resp, 1.0, last + residual_margin(wn, dt), 1.0);
      row.dt = dt;
      rows[i] = row;
    } catch (const std::exception& e) {
      rows[i] = failed_row(zeta, wn, config.tau, config.K, dt, e.what());
    }
  });
  return rows;
}

RunResult stepwise_experiment(const PlantParams& plant, const ShaperConfig& config,
                              const PiecewiseConstantSignal& schedule, double dt,
                              const AdaptiveOptions& options) {
  if (schedule.empty() || schedule.events().front().time != 0.0) {
    throw Error(Errc::InvalidArgument, "step-wise schedule must start with an event at t = 0");
  }
  return run_adaptive(plant, schedule, config, dt, options);
}

}  // namespace atdf
