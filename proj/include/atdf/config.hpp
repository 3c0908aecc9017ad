#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atdf/lti_sim.hpp"
#include "atdf/shaper_design.hpp"
#include "atdf/signal.hpp"

namespace atdf {

enum class Experiment { Single, Baseline, Table1, Sweep, Stepwise };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Experiment e) noexcept;
std::string_view to_string(OutputFormat f) noexcept;

struct ScenarioConfig {
  PlantParams plant{0.0, 3.141592653589793};
  ShaperConfig shaper{0.01, 2.0};
  double dt = 0.0;                  ///< resolved: explicit value or default_timestep(omega_n)
  std::optional<double> t_end;
  std::optional<double> probe_window;
  PiecewiseConstantSignal reference = PiecewiseConstantSignal::step(1.0);
  Experiment experiment = Experiment::Single;
  std::vector<double> zeta_grid;    ///< sweep axes
  std::vector<double> omega_grid;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
};

/// Line-oriented `key = value` document with optional `[section]` headers,
/// `#` comments. Keys may also appear before any section header. Throws
/// Errc::ParseError (with line number) for malformed lines or values and
/// Errc::ValidationError naming the violated invariant.
ScenarioConfig parse_config(std::string_view text);

/// Reads a file and parses it. I/O failures raise Errc::ParseError.
ScenarioConfig load_config(const std::string& path);

/// Checks every numeric field against its owning type's invariants.
void validate(const ScenarioConfig& config);

/// "t:level, t:level, ..." as used by the `events` key.
std::vector<SignalEvent> parse_events(std::string_view text);

}  // namespace atdf
