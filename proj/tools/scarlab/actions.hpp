#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace scarlab::cli {

/// Solve the configured problem and write eigenstates.qscr, spectrum.csv, and
/// potential.csv into out_dir, registering them with the manifest.
void run_solve(const Context& ctx, const std::string& out_dir, Manifest& man);

/// Estimate (q, Q, alpha) for each input spectrum and write report.json plus
/// curve CSVs (single input) into out_dir.  Returns 1 if any estimator failed,
/// 0 otherwise; individual failures are recorded in the report and the
/// remaining estimators still run.
int run_stats(const Context& ctx, const std::vector<std::string>& inputs,
              const std::string& out_dir, Manifest& man);

/// Expand one stored eigenstate in the unperturbed labeled basis and write
/// subspectrum.csv, subspec.json, and a density image.  An expansion below the
/// completeness threshold is reported with a warning, not an error.
void run_subspec(const Context& ctx, const std::string& container_path,
                 const std::string& out_dir, Manifest& man);

/// Density-of-states map over the configured axes (harmonic well only):
/// dos.csv plus a dense binary matrix.
void run_dos(const Context& ctx, const std::string& out_dir, Manifest& man);

/// Synthetic reference spectrum written as spectrum.csv.
void run_synth(const Context& ctx, const std::string& kind, std::size_t count,
               std::uint64_t seed, const std::string& out_dir, Manifest& man);

/// Run every (M, sigma, B, seed) tuple as an isolated worker process and
/// aggregate the per-job reports into sweep.csv.  Returns the worst job exit
/// status; failed jobs are recorded in the manifest and do not stop the sweep.
int run_sweep(const Context& ctx, Manifest& man);

}  // namespace scarlab::cli
