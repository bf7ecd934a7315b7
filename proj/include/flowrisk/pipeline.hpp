#pragma once

#include <cstdint>
#include <string>

#include "flowrisk/config.hpp"

namespace flowrisk {

// Exit status contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFatal = 1;
inline constexpr int kExitComputeError = 2;
inline constexpr int kExitConfigError = 3;

/// Runs all three loaders plus the cross-dataset checks; writes
/// validation.json into the output directory.
int cmd_validate(const RunConfig& cfg);

/// Emits the mobility trend/baseline/percent-change/region/top-k outputs.
int cmd_analyze(const RunConfig& cfg);

/// Emits correlations_lag<T>.csv per configured lag, daily coefficients
/// plus the max/mean/median summary rows.
int cmd_correlate(const RunConfig& cfg);

/// Emits fits.csv (every period x lag cell), importance.csv and the
/// per-scenario design dumps.
int cmd_fit(const RunConfig& cfg);

/// Generates a synthetic world and writes the standard input CSV triplet
/// plus a parameter echo, so synthetic data flows through the ordinary
/// ingestion path.
int cmd_synth(const RunConfig& cfg);

/// Runs everything and emits manifest.json; the run directory is staged and
/// renamed into place so interrupted runs leave no partial results.
int cmd_report(const RunConfig& cfg);

/// FNV-1a 64-bit digest of a file's bytes, as "fnv1a64:<hex>".
std::string file_digest(const std::string& path);

}  // namespace flowrisk
