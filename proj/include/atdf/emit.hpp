#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atdf/config.hpp"
#include "atdf/pipeline.hpp"

namespace atdf {

/// Columns t, reference, shaped_reference, response; one row per sample.
void write_timeseries(std::ostream& out, const RunResult& result, OutputFormat format);
void emit_timeseries(const RunResult& result, const std::string& path, OutputFormat format);

/// Columns zeta, omega_n, tau, K, zeta_hat, omega_n_hat, A, T, residual, dt, error.
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows, OutputFormat format);
void emit_sweep(const std::vector<SweepRow>& rows, const std::string& path, OutputFormat format);

/// Scientific notation with 17 significant digits (round-trips doubles).
std::string format_double(double value);

struct LoadedResponse {
  TimeSeries response;
  std::optional<double> step_amplitude;  ///< shaped_reference at the first row, if present
};

/// Reads a CSV with at least `t` and `response` columns (e.g. a file written
/// by write_timeseries). Throws Errc::ParseError.
LoadedResponse read_response_csv(std::istream& in);
LoadedResponse load_response_csv(const std::string& path);

}  // namespace atdf
