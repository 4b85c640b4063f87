#pragma once

#include <string>

#include "mviopt/solver.hpp"

namespace mviopt {

/// 17-significant-digit decimal formatting ('.' decimal point, no locale).
std::string format_g17(double v);

/// Per-iteration trace as RFC-4180 CSV with the fixed v1 header
///   iter,lambda_i,omega_step,oracle_delta,inner_iters,gap_estimate,
///   cumulative_oracle_calls,wall_time_ms
/// cumulative_oracle_calls accumulates inner iterations. With timings off,
/// wall_time_ms is written as 0 so reruns are byte-identical.
std::string trace_to_csv(const SolverTrace& trace, bool timings);

/// Writes via a temp file in the same directory, then renames.
void write_text_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit hash, hex-encoded; used to stamp summaries with the exact
/// config bytes they came from.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace mviopt
