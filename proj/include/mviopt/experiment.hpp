#pragma once

#include <string>

namespace mviopt {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by the CLI verbs.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitIo = 4;

/// Executes a single-K experiment config: builds the instance, runs the
/// solver, writes the per-iteration CSV trace and the JSON summary.
/// Returns an exit code; diagnostics go to stderr.
int run_experiment(const std::string& config_path);

/// Executes a K-sweep config: one run per K (shared instance and seed),
/// a combined gap-vs-K CSV, and a summary with the fitted rate exponent.
int run_sweep(const std::string& config_path);

/// Runs a named property suite and writes a machine-readable pass/fail
/// report to stdout. Suites: bregman, tseng, power-mean, hard-instance-kkt,
/// taylor-remainder, subproblem-cross, all.
int run_verify(const std::string& suite);

/// The JSON config schema as a human- and machine-readable document.
std::string config_schema();

}  // namespace mviopt
