#ifndef SLAPATH_EXPERIMENT_HPP
#define SLAPATH_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slapath/scenario.hpp"
#include "slapath/simulator.hpp"

namespace slapath {

// A batch of seeded runs over one scenario, plus the per-experiment knobs
// (sweep grid, baseline derivation) each runner below consumes.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string scenario_path;
  std::vector<uint64_t> seeds;
  std::string out_dir = "out";
  std::vector<double> alpha_grid;                      // sweep only
  std::optional<std::string> baseline_scenario_path;   // compare only
  std::optional<uint32_t> baseline_pinned_path;        // compare only
  std::optional<uint64_t> horizon_us;
  std::optional<BackendKind> backend;
};

// Throws ScenarioError on malformed files or specs that violate the
// constraints above (empty seed list, sweep values outside (0,1]).
ExperimentSpec load_experiment(const std::string& path);

struct TimeseriesResult {
  std::vector<SimulationTrace> traces;  // one per seed, spec order
};

// Writes timeseries_s<seed>.csv and agent_s<seed>.csv per seed plus a
// stacked summary.csv into spec.out_dir.
TimeseriesResult run_timeseries(const ExperimentSpec& spec);

struct SweepCell {
  uint64_t seed = 0;
  std::optional<uint64_t> convergence_us;  // empty = censored (no convergence within horizon)
  std::optional<uint64_t> convergence_updates;
};

struct SweepPoint {
  double alpha = 0.0;
  std::vector<SweepCell> cells;
  double mean_us = 0.0;  // over converged runs only
  double std_us = 0.0;
  uint32_t censored = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::string csv;  // contents of the sweep.csv that was written
};

// Sweep points run as independent parallel jobs; rows are emitted in grid
// order so the output is byte-stable regardless of scheduling.
SweepResult run_alpha_sweep(const ExperimentSpec& spec);

struct CompareRun {
  uint64_t seed = 0;
  double baseline_goodput_pps = 0.0;
  double sla_goodput_pps = 0.0;
  double relative_delta = 0.0;  // (sla - baseline) / baseline
};

struct CompareResult {
  std::vector<CompareRun> runs;
  double baseline_mean = 0.0;
  double sla_mean = 0.0;
  double relative_delta = 0.0;
  std::string csv;
};

// Baseline = the spec's baseline scenario if given, otherwise the main
// scenario with the agent disabled and traffic pinned to baseline_pinned_path.
CompareResult run_throughput_compare(const ExperimentSpec& spec);

}  // namespace slapath

#endif  // SLAPATH_EXPERIMENT_HPP
