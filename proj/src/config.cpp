#include "atdf/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "atdf/error.hpp"

namespace atdf {

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::Single: return "single";
    case Experiment::Baseline: return "baseline";
    case Experiment::Table1: return "table1";
    case Experiment::Sweep: return "sweep";
    case Experiment::Stepwise: return "stepwise";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat f) noexcept {
  return f == OutputFormat::Json ? "json" : "csv";
}

namespace {

constexpr std::array kKnownKeys = {
    "plant.zeta",      "plant.omega_n",  "shaper.k",          "shaper.tau",
    "sim.dt",          "sim.t_end",      "sim.probe_window",  "reference.initial",
    "reference.level", "reference.events", "experiment.type", "sweep.zeta_grid",
    "sweep.omega_grid", "output.path",   "output.format",
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line;
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + msg);
}

// Accepts plain numbers and multiples of pi: "3.5", "pi", "3pi", "0.5*pi".
bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  double factor = 1.0;
  if (text.size() >= 2 && lower(text.substr(text.size() - 2)) == "pi") {
    factor = std::numbers::pi;
    text = trim(text.substr(0, text.size() - 2));
    if (!text.empty() && text.back() == '*') text = trim(text.substr(0, text.size() - 1));
    if (text.empty()) {
      out = factor;
      return true;
    }
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return false;
  out = v * factor;
  return true;
}

double number_field(const std::map<std::string, Entry>& entries, const std::string& key,
                    double fallback) {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  double v = 0.0;
  if (!parse_number(it->second.value, v)) {
    parse_fail(it->second.line, "field '" + key + "' expects a number, got '" + it->second.value + "'");
  }
  return v;
}

std::vector<double> list_field(const std::map<std::string, Entry>& entries, const std::string& key) {
  std::vector<double> out;
  const auto it = entries.find(key);
  if (it == entries.end()) return out;
  std::string_view rest = it->second.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    double v = 0.0;
    if (!parse_number(item, v)) {
      parse_fail(it->second.line, "field '" + key + "' has a non-numeric item '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void invalid(const std::string& field, const std::string& invariant) {
  throw Error(Errc::ValidationError, field + " violates " + invariant);
}

}  // namespace

std::vector<SignalEvent> parse_events(std::string_view text) {
  std::vector<SignalEvent> out;
  std::string_view rest = text;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    const auto colon = item.find(':');
    SignalEvent e{};
    if (colon == std::string_view::npos || !parse_number(item.substr(0, colon), e.time) ||
        !parse_number(item.substr(colon + 1), e.level)) {
      throw Error(Errc::ParseError, "event '" + std::string(item) + "' is not time:level");
    }
    out.push_back(e);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) parse_fail(line_no, "malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_fail(line_no, "empty key");
    if (value.empty()) parse_fail(line_no, "field '" + key + "' has no value");

    std::string canonical;
    if (!section.empty()) {
      canonical = section + "." + key;
      if (std::find(kKnownKeys.begin(), kKnownKeys.end(), canonical) == kKnownKeys.end()) {
        parse_fail(line_no, "unknown field '" + key + "' in [" + section + "]");
      }
    } else if (key == "experiment") {
      canonical = "experiment.type";
    } else {
      for (const std::string_view known : kKnownKeys) {
        if (known.substr(known.find('.') + 1) == key) {
          if (!canonical.empty()) parse_fail(line_no, "field '" + key + "' is ambiguous outside a section");
          canonical = known;
        }
      }
      if (canonical.empty()) parse_fail(line_no, "unknown field '" + key + "'");
    }
    if (!entries.emplace(canonical, Entry{value, line_no}).second) {
      parse_fail(line_no, "field '" + canonical + "' given twice");
    }
  }

  ScenarioConfig cfg;
  cfg.plant.zeta = number_field(entries, "plant.zeta", cfg.plant.zeta);
  cfg.plant.omega_n = number_field(entries, "plant.omega_n", cfg.plant.omega_n);
  cfg.shaper.K = number_field(entries, "shaper.k", 0.01);
  cfg.shaper.tau = number_field(entries, "shaper.tau", cfg.shaper.tau);
  if (entries.count("sim.t_end")) cfg.t_end = number_field(entries, "sim.t_end", 0.0);
  if (entries.count("sim.probe_window")) cfg.probe_window = number_field(entries, "sim.probe_window", 0.0);

  const double initial = number_field(entries, "reference.initial", 0.0);
  if (const auto it = entries.find("reference.events"); it != entries.end()) {
    if (entries.count("reference.level")) {
      parse_fail(it->second.line, "give either reference.level or reference.events, not both");
    }
    try {
      cfg.reference = PiecewiseConstantSignal(initial, parse_events(it->second.value));
    } catch (const Error& e) {
      parse_fail(it->second.line, e.what());
    }
  } else {
    const double level = number_field(entries, "reference.level", 1.0);
    cfg.reference = PiecewiseConstantSignal(initial, {{0.0, level}});
  }

  if (const auto it = entries.find("experiment.type"); it != entries.end()) {
    const std::string v = lower(it->second.value);
    if (v == "single" || v == "run") cfg.experiment = Experiment::Single;
    else if (v == "baseline") cfg.experiment = Experiment::Baseline;
    else if (v == "table1") cfg.experiment = Experiment::Table1;
    else if (v == "sweep") cfg.experiment = Experiment::Sweep;
    else if (v == "stepwise") cfg.experiment = Experiment::Stepwise;
    else parse_fail(it->second.line, "unknown experiment '" + it->second.value + "'");
  }

  cfg.zeta_grid = list_field(entries, "sweep.zeta_grid");
  cfg.omega_grid = list_field(entries, "sweep.omega_grid");

  if (const auto it = entries.find("output.path"); it != entries.end()) cfg.output_path = it->second.value;
  if (const auto it = entries.find("output.format"); it != entries.end()) {
    const std::string v = lower(it->second.value);
    if (v == "csv") cfg.format = OutputFormat::Csv;
    else if (v == "json") cfg.format = OutputFormat::Json;
    else parse_fail(it->second.line, "format must be csv or json");
  }

  // dt last: its default depends on omega_n.
  cfg.dt = std::isfinite(cfg.plant.omega_n) && cfg.plant.omega_n > 0.0
               ? default_timestep(cfg.plant.omega_n)
               : 0.0;
  cfg.dt = number_field(entries, "sim.dt", cfg.dt);

  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ScenarioConfig& c) {
  if (!(std::isfinite(c.plant.zeta) && c.plant.zeta >= 0.0)) invalid("plant.zeta", "zeta >= 0");
  if (!(std::isfinite(c.plant.omega_n) && c.plant.omega_n > 0.0)) invalid("plant.omega_n", "omega_n > 0");
  if (!(std::isfinite(c.shaper.K) && c.shaper.K > 0.0 && c.shaper.K < 0.5)) {
    invalid("shaper.K", "0 < K < 0.5");
  }
  if (!(std::isfinite(c.shaper.tau) && c.shaper.tau > 0.0)) invalid("shaper.tau", "tau > 0");
  const double limit = std::numbers::pi / (10.0 * c.plant.omega_n);
  if (!(std::isfinite(c.dt) && c.dt > 0.0 && c.dt <= limit * (1.0 + 1e-12))) {
    invalid("sim.dt", "0 < dt <= pi/(10 omega_n)");
  }
  if (c.t_end && !(std::isfinite(*c.t_end) && *c.t_end > 0.0)) invalid("sim.t_end", "t_end > 0");
  if (c.probe_window && !(std::isfinite(*c.probe_window) && *c.probe_window > 0.0)) {
    invalid("sim.probe_window", "probe_window > 0");
  }
  if (c.reference.initial_level() != 0.0) invalid("reference.initial", "initial level == 0 (plant at rest)");
  if (c.reference.empty() || c.reference.events().front().time != 0.0 ||
      c.reference.events().front().level == 0.0) {
    invalid("reference.events", "a nonzero level commanded at t = 0");
  }
  for (const double z : c.zeta_grid) {
    if (!(std::isfinite(z) && z >= 0.0 && z < 1.0)) invalid("sweep.zeta_grid", "0 <= zeta < 1");
  }
  for (const double w : c.omega_grid) {
    if (!(std::isfinite(w) && w > 0.0)) invalid("sweep.omega_grid", "omega_n > 0");
  }
}

}  // namespace atdf
