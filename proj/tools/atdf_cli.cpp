// atdf: adaptive time-delay filter experiments from the command line.
//
// Exit codes: 0 success, 2 invalid input (config, arguments, files),
// 3 runtime failure (identification or design could not complete).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atdf/config.hpp"
#include "atdf/emit.hpp"
#include "atdf/error.hpp"
#include "atdf/pipeline.hpp"

namespace {

using namespace atdf;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::optional<double> dt;
  std::optional<unsigned long long> seed;  // reserved; every run is deterministic
  std::string format;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "scenario file");
  cmd->add_option("--out", f.out_path, "data output path");
  cmd->add_option("--dt", f.dt, "simulation step [s]");
  cmd->add_option("--seed", f.seed, "reserved; the pipeline is deterministic");
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

ScenarioConfig resolve(const CommonFlags& f) {
  ScenarioConfig cfg = f.config_path.empty() ? parse_config("") : load_config(f.config_path);
  if (f.dt) cfg.dt = *f.dt;
  if (!f.out_path.empty()) cfg.output_path = f.out_path;
  if (f.format == "json") cfg.format = OutputFormat::Json;
  if (f.format == "csv") cfg.format = OutputFormat::Csv;
  validate(cfg);
  return cfg;
}

AdaptiveOptions options_of(const ScenarioConfig& cfg) {
  AdaptiveOptions o;
  o.t_end = cfg.t_end;
  o.probe_window = cfg.probe_window;
  return o;
}

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_estimate(const Estimate& e) {
  std::cout << "estimate: zeta_hat=" << g(e.zeta_hat) << " omega_n_hat=" << g(e.omega_n_hat)
            << " (" << g(e.omega_n_hat / std::numbers::pi) << " pi) class=" << to_string(e.damping)
            << (e.steady_state_assumed ? " steady_state=commanded" : "") << '\n';
}

void print_design(const ShaperDesign& d) {
  std::cout << "design: method=" << to_string(d.method) << " A=" << g(d.A) << " T=" << g(d.T)
            << " tau=" << g(d.tau) << " |G(pole)|=" << g(d.residual) << '\n';
  for (const auto& imp : d.impulses) {
    std::cout << "  impulse t=" << g(imp.time) << " amplitude=" << g(imp.amplitude) << '\n';
  }
}

void print_run(const char* label, const RunResult& r) {
  std::cout << "[" << label << "]\n";
  if (r.design.method != DesignMethod::PassThrough) {
    print_estimate(r.estimate);
    if (r.identified_from_probe) std::cout << "  identified from a separate probe window\n";
    print_design(r.design);
  }
  std::cout << "samples=" << r.response.size() << " dt=" << g(r.response.dt) << '\n';
  for (const auto& t : r.transitions) {
    std::cout << "transition t=" << g(t.time) << " level=" << g(t.level)
              << " residual=" << g(t.metrics.residual_vibration)
              << " overshoot=" << g(t.metrics.overshoot) << " judged=[" << g(t.judged_from) << ", "
              << g(t.judged_until) << "]\n";
  }
  std::cout << "residual_vibration=" << g(r.metrics.residual_vibration)
            << " overshoot=" << g(r.metrics.overshoot)
            << " settle_error=" << g(r.metrics.settle_error) << '\n';
}

void print_rows(const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    std::cout << "zeta=" << g(r.zeta) << " omega_n=" << g(r.omega_n) << " tau=" << g(r.tau)
              << " dt=" << g(r.dt) << " -> zeta_hat=" << g(r.zeta_hat)
              << " omega_n_hat=" << g(r.omega_n_hat) << " A=" << g(r.A) << " T=" << g(r.T)
              << " residual=" << g(r.residual_vibration);
    if (!r.error.empty()) std::cout << " error=" << r.error;
    std::cout << '\n';
  }
}

// "out.csv" -> "out.fixed.csv"
std::string sibling(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "." + tag + p.extension().string());
  return out.string();
}

void emit(const RunResult& r, const ScenarioConfig& cfg, const std::string& path) {
  if (path.empty()) return;
  emit_timeseries(r, path, cfg.format);
  std::cout << "wrote " << path << '\n';
}

std::vector<double> default_zeta_grid() {
  std::vector<double> z;
  for (int i = 0; i <= 9; ++i) z.push_back(0.1 * i);
  return z;
}

std::vector<double> default_omega_grid() {
  std::vector<double> w;
  for (int i = 1; i <= 10; ++i) w.push_back(i * std::numbers::pi);
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive time-delay filter: estimation, shaper design and simulation"};
  app.require_subcommand(1);

  CommonFlags run_f, base_f, table_f, sweep_f, step_f, design_f, est_f;
  auto* run = app.add_subcommand("run", "single adaptive run");
  add_common(run, run_f);
  auto* baseline = app.add_subcommand("baseline", "adaptive vs fixed-estimation-time shaper");
  add_common(baseline, base_f);
  auto* table1 = app.add_subcommand("table1", "parameter estimation table (fine and coarse dt)");
  add_common(table1, table_f);
  double dt_coarse = 1e-4;
  table1->add_option("--dt-coarse", dt_coarse, "step for the coarse 300 pi / 3000 pi rows");
  auto* sweep = app.add_subcommand("sweep", "(A, T) over a zeta x omega_n grid");
  add_common(sweep, sweep_f);
  auto* stepwise = app.add_subcommand("stepwise", "multi-level reference schedule");
  add_common(stepwise, step_f);
  CommonFlags scen_f;
  auto* scenario = app.add_subcommand("scenario", "run whatever experiment.type the config names");
  add_common(scenario, scen_f);
  scenario->get_option("--config")->required();

  auto* design_cmd = app.add_subcommand("design", "print the shaper for given parameters");
  add_common(design_cmd, design_f);
  std::optional<double> d_zeta, d_omega, d_K, d_tau;
  design_cmd->add_option("--zeta", d_zeta, "damping ratio");
  design_cmd->add_option("--omega-n", d_omega, "natural frequency [rad/s]");
  design_cmd->add_option("--K", d_K, "reference fraction");
  design_cmd->add_option("--tau", d_tau, "estimation duration [s]");

  auto* estimate_cmd = app.add_subcommand("estimate", "identify zeta, omega_n from a response file");
  add_common(estimate_cmd, est_f);
  std::string in_path;
  std::optional<double> e_tau, e_amplitude;
  estimate_cmd->add_option("--in", in_path, "CSV with t and response columns")->required();
  estimate_cmd->add_option("--tau", e_tau, "use samples with t <= tau only");
  estimate_cmd->add_option("--amplitude", e_amplitude,
                           "step amplitude (default: shaped_reference in the first row)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    // `scenario` borrows the experiment from the config and reuses that branch.
    std::optional<Experiment> scen;
    if (scenario->parsed()) {
      scen = resolve(scen_f).experiment;
      run_f = base_f = table_f = sweep_f = step_f = scen_f;
    }
    auto chosen = [&](CLI::App* cmd, Experiment e) { return scen ? *scen == e : cmd->parsed(); };
    if (chosen(run, Experiment::Single)) {
      const auto cfg = resolve(run_f);
      const auto r = run_adaptive(cfg.plant, cfg.reference, cfg.shaper, cfg.dt, options_of(cfg));
      print_run("adaptive", r);
      emit(r, cfg, cfg.output_path);
    } else if (chosen(baseline, Experiment::Baseline)) {
      const auto cfg = resolve(base_f);
      const auto b = run_baseline_comparison(cfg.plant, cfg.shaper, cfg.dt, options_of(cfg));
      print_run("adaptive", b.adaptive);
      print_run("fixed baseline", b.fixed);
      emit(b.adaptive, cfg, cfg.output_path);
      if (!cfg.output_path.empty()) emit(b.fixed, cfg, sibling(cfg.output_path, "fixed"));
    } else if (chosen(table1, Experiment::Table1)) {
      const auto cfg = resolve(table_f);
      Table1Options o;
      if (table_f.dt) o.dt_fine = *table_f.dt;
      o.dt_coarse = dt_coarse;
      o.K = cfg.shaper.K;
      const auto rows = table1_experiment(o);
      print_rows(rows);
      if (!cfg.output_path.empty()) {
        emit_sweep(rows, cfg.output_path, cfg.format);
        std::cout << "wrote " << cfg.output_path << '\n';
      }
    } else if (chosen(sweep, Experiment::Sweep)) {
      const auto cfg = resolve(sweep_f);
      const auto rows = sweep_AT(cfg.zeta_grid.empty() ? default_zeta_grid() : cfg.zeta_grid,
                                 cfg.omega_grid.empty() ? default_omega_grid() : cfg.omega_grid,
                                 cfg.shaper);
      print_rows(rows);
      if (!cfg.output_path.empty()) {
        emit_sweep(rows, cfg.output_path, cfg.format);
        std::cout << "wrote " << cfg.output_path << '\n';
      }
    } else if (chosen(stepwise, Experiment::Stepwise)) {
      const auto cfg = resolve(step_f);
      const auto r = stepwise_experiment(cfg.plant, cfg.shaper, cfg.reference, cfg.dt, options_of(cfg));
      print_run("stepwise", r);
      emit(r, cfg, cfg.output_path);
    } else if (!scen && design_cmd->parsed()) {
      auto cfg = resolve(design_f);
      if (d_zeta) cfg.plant.zeta = *d_zeta;
      if (d_omega) cfg.plant.omega_n = *d_omega;
      if (d_K) cfg.shaper.K = *d_K;
      if (d_tau) cfg.shaper.tau = *d_tau;
      validate(cfg);
      print_design(design_for(cfg.shaper, cfg.plant.zeta, cfg.plant.omega_n));
    } else if (!scen && estimate_cmd->parsed()) {
      const auto cfg = resolve(est_f);
      auto loaded = load_response_csv(in_path);
      TimeSeries& ts = loaded.response;
      if (e_tau) {
        if (!(*e_tau > ts.t0)) throw Error(Errc::InvalidArgument, "--tau must lie after the first sample");
        const auto last = static_cast<std::size_t>(std::llround((*e_tau - ts.t0) / ts.dt));
        if (last + 1 < ts.samples.size()) ts.samples.resize(last + 1);
      }
      const std::optional<double> amplitude = e_amplitude ? e_amplitude : loaded.step_amplitude;
      if (!amplitude) {
        throw Error(Errc::InvalidArgument, "no --amplitude given and the file has no shaped_reference column");
      }
      std::cout << "samples=" << ts.size() << " dt=" << g(ts.dt) << " amplitude=" << g(*amplitude) << '\n';
      print_estimate(identify(ts, *amplitude));
      (void)cfg;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
