#pragma once

#include <string>
#include <vector>

#include "srsim/scenario.hpp"
#include "srsim/simulation.hpp"

namespace srsim {

/// Writes a completed run into `dir`: scenario.json (resolved), manifest.json,
/// metrics.csv, controller_trace.csv and, when frames were recorded,
/// events.log. Contents are a pure function of the scenario, so reruns are
/// byte-identical.
void write_run_dir(const std::string& dir, const ScenarioSpec& spec,
                   const RunResult& result, bool write_events);

/// Everything compare needs from a finished run directory.
struct RunSummary {
  std::string dir;
  std::string controller;
  std::string rate;
  std::uint64_t seed = 0;
  std::uint64_t scenario_fingerprint = 0;
  double tm_tot_mbit = 0.0;
  double final_step_agg_mbps = 0.0;
  std::vector<double> per_step_agg_mbps;
};

RunSummary read_run_dir(const std::string& dir);

struct Comparison {
  std::string table;      // human-readable summary, one row per run
  std::string series_csv; // per-step aggregates aligned by step index
};

/// Refuses (ConfigError) unless at least two directories are given and all
/// scenario fingerprints match.
Comparison compare_runs(const std::vector<std::string>& dirs);

} // namespace srsim
