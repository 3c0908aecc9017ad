#include "atdf/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "atdf/error.hpp"

namespace atdf {

namespace {

// Level in force at each sample, with the same event snapping the
// simulator applies.
std::vector<double> sampled_levels(const PiecewiseConstantSignal& signal, const TimeSeries& ts) {
  std::vector<double> out(ts.size());
  const auto events = signal.events();
  std::size_t next = 0;
  double level = signal.initial_level();
  const std::ptrdiff_t offset = sample_index(ts.t0, ts.dt);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto index = offset + static_cast<std::ptrdiff_t>(k);
    while (next < events.size() && sample_index(events[next].time, ts.dt) <= index) {
      level = events[next++].level;
    }
    out[k] = level;
  }
  return out;
}

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << data;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

void write_timeseries(std::ostream& out, const RunResult& result, OutputFormat format) {
  const TimeSeries& ts = result.response;
  const auto reference = sampled_levels(result.reference, ts);
  const auto shaped = sampled_levels(result.shaped.signal, ts);
  if (format == OutputFormat::Json) {
    nlohmann::json j;
    j["columns"] = {"t", "reference", "shaped_reference", "response"};
    nlohmann::json t = nlohmann::json::array();
    nlohmann::json r = nlohmann::json::array();
    nlohmann::json s = nlohmann::json::array();
    nlohmann::json x = nlohmann::json::array();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      t.push_back(ts.time(k));
      r.push_back(reference[k]);
      s.push_back(shaped[k]);
      x.push_back(ts.samples[k]);
    }
    j["t"] = std::move(t);
    j["reference"] = std::move(r);
    j["shaped_reference"] = std::move(s);
    j["response"] = std::move(x);
    out << j.dump() << '\n';
    return;
  }
  out << "t,reference,shaped_reference,response\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    out << format_double(ts.time(k)) << ',' << format_double(reference[k]) << ','
        << format_double(shaped[k]) << ',' << format_double(ts.samples[k]) << '\n';
  }
}

void emit_timeseries(const RunResult& result, const std::string& path, OutputFormat format) {
  std::ostringstream buf;
  write_timeseries(buf, result, format);
  write_file(path, buf.str());
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o;
      o["zeta"] = number(r.zeta);
      o["omega_n"] = number(r.omega_n);
      o["tau"] = number(r.tau);
      o["K"] = number(r.K);
      o["zeta_hat"] = number(r.zeta_hat);
      o["omega_n_hat"] = number(r.omega_n_hat);
      o["A"] = number(r.A);
      o["T"] = number(r.T);
      o["residual"] = number(r.residual_vibration);
      o["dt"] = number(r.dt);
      o["error"] = r.error;
      j.push_back(std::move(o));
    }
    out << j.dump(1) << '\n';
    return;
  }
  out << "zeta,omega_n,tau,K,zeta_hat,omega_n_hat,A,T,residual,dt,error\n";
  for (const auto& r : rows) {
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n' || c == '"') c = ';';
    }
    out << format_double(r.zeta) << ',' << format_double(r.omega_n) << ',' << format_double(r.tau)
        << ',' << format_double(r.K) << ',' << format_double(r.zeta_hat) << ','
        << format_double(r.omega_n_hat) << ',' << format_double(r.A) << ',' << format_double(r.T)
        << ',' << format_double(r.residual_vibration) << ',' << format_double(r.dt) << ','
        << error << '\n';
  }
}

void emit_sweep(const std::vector<SweepRow>& rows, const std::string& path, OutputFormat format) {
  std::ostringstream buf;
  write_sweep(buf, rows, format);
  write_file(path, buf.str());
}

LoadedResponse read_response_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "response file is empty");
  const auto header = split_csv(line);
  int t_col = -1, x_col = -1, u_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") t_col = static_cast<int>(i);
    if (header[i] == "response") x_col = static_cast<int>(i);
    if (header[i] == "shaped_reference") u_col = static_cast<int>(i);
  }
  if (t_col < 0 || x_col < 0) {
    throw Error(Errc::ParseError, "response file needs 't' and 'response' columns");
  }
  std::vector<double> t, x;
  std::optional<double> amplitude;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    auto cell = [&](int col) {
      if (col >= static_cast<int>(cells.size())) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": missing column");
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[static_cast<std::size_t>(col)], &used);
        if (used != cells[static_cast<std::size_t>(col)].size()) throw std::invalid_argument("tail");
        return v;
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number '" +
                                          cells[static_cast<std::size_t>(col)] + "'");
      }
    };
    t.push_back(cell(t_col));
    x.push_back(cell(x_col));
    if (u_col >= 0 && !amplitude) amplitude = cell(u_col);
  }
  if (t.size() < 2) throw Error(Errc::ParseError, "response file needs at least two samples");
  LoadedResponse out;
  out.response.t0 = t.front();
  out.response.dt = t[1] - t[0];
  if (!(out.response.dt > 0.0)) throw Error(Errc::ParseError, "time column must increase");
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double expected = out.response.time(k);
    if (std::abs(t[k] - expected) > 1e-6 * out.response.dt + 1e-12 * std::abs(expected)) {
      throw Error(Errc::ParseError, "time column is not uniformly sampled at row " + std::to_string(k + 2));
    }
  }
  out.response.samples = std::move(x);
  out.step_amplitude = amplitude;
  return out;
}

LoadedResponse load_response_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open response file '" + path + "'");
  return read_response_csv(in);
}

}  // namespace atdf
