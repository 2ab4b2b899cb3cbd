#include "slapath/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "slapath/stats.hpp"
#include "slapath/trace.hpp"

namespace slapath {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

RunOptions options_for(const ExperimentSpec& spec, uint64_t seed) {
  RunOptions opt;
  opt.seed = seed;
  opt.backend_override = spec.backend;
  opt.horizon_override_us = spec.horizon_us;
  opt.keep_hop_log = false;
  return opt;
}

void ensure_out_dir(const ExperimentSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
}

std::string out_path(const ExperimentSpec& spec, const std::string& file) {
  return (std::filesystem::path(spec.out_dir) / file).string();
}

}  // namespace

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open experiment file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ScenarioError(path + ": top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "name" && k != "scenario" && k != "seeds" && k != "out_dir" && k != "sweep" &&
        k != "baseline" && k != "horizon_us" && k != "backend") {
      throw ScenarioError(path + ": unknown key \"" + k + "\"");
    }
  }

  ExperimentSpec spec;
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (!j.contains("scenario") || !j.at("scenario").is_string()) {
    throw ScenarioError(path + ": missing scenario path");
  }
  spec.scenario_path = j.at("scenario").get<std::string>();
  // Relative scenario paths resolve against the experiment file's directory,
  // so specs work from any working directory.
  if (!std::filesystem::path(spec.scenario_path).is_absolute()) {
    spec.scenario_path =
        (std::filesystem::path(path).parent_path() / spec.scenario_path).string();
  }
  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty()) {
    throw ScenarioError(path + ": seeds must be a non-empty list");
  }
  for (const json& s : j.at("seeds")) {
    if (!s.is_number_unsigned()) throw ScenarioError(path + ": seeds must be non-negative integers");
    spec.seeds.push_back(s.get<uint64_t>());
  }
  if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("horizon_us")) spec.horizon_us = j.at("horizon_us").get<uint64_t>();
  if (j.contains("backend")) {
    BackendKind kind;
    if (!parse_backend(j.at("backend").get<std::string>(), kind)) {
      throw ScenarioError(path + ": backend must be \"exact\" or \"constrained\"");
    }
    spec.backend = kind;
  }
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    if (!sw.is_object() || !sw.contains("alpha") || !sw.at("alpha").is_array()) {
      throw ScenarioError(path + ": sweep needs an alpha grid");
    }
    for (const json& a : sw.at("alpha")) {
      const double v = a.get<double>();
      if (!(v > 0.0) || v > 1.0) {
        throw ScenarioError(path + ": sweep alpha values must lie in (0, 1]");
      }
      spec.alpha_grid.push_back(v);
    }
  }
  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    if (b.contains("scenario")) {
      std::string bp = b.at("scenario").get<std::string>();
      if (!std::filesystem::path(bp).is_absolute()) {
        bp = (std::filesystem::path(path).parent_path() / bp).string();
      }
      spec.baseline_scenario_path = bp;
    }
    if (b.contains("pinned_path")) {
      spec.baseline_pinned_path = b.at("pinned_path").get<uint32_t>();
    }
  }
  return spec;
}

TimeseriesResult run_timeseries(const ExperimentSpec& spec) {
  const Scenario base = load_scenario(spec.scenario_path);
  ensure_out_dir(spec);

  TimeseriesResult result;
  std::string summary = summary_csv_header();
  for (uint64_t seed : spec.seeds) {
    SimulationTrace trace = run_simulation(base, options_for(spec, seed));
    write_file(out_path(spec, "timeseries_s" + std::to_string(seed) + ".csv"),
               timeseries_csv(trace));
    write_file(out_path(spec, "agent_s" + std::to_string(seed) + ".csv"), agent_csv(trace));
    summary += summary_csv_row(trace.summary);
    result.traces.push_back(std::move(trace));
  }
  write_file(out_path(spec, "summary.csv"), summary);
  return result;
}

SweepResult run_alpha_sweep(const ExperimentSpec& spec) {
  if (spec.alpha_grid.empty()) throw ScenarioError("sweep experiment has no alpha grid");
  const Scenario base = load_scenario(spec.scenario_path);
  ensure_out_dir(spec);

  auto sweep_point = [&](double alpha) {
    SweepPoint point;
    point.alpha = alpha;
    Scenario sc = base;
    sc.agent.alpha = alpha;
    std::vector<double> converged_us;
    for (uint64_t seed : spec.seeds) {
      const SimulationTrace trace = run_simulation(sc, options_for(spec, seed));
      SweepCell cell;
      cell.seed = seed;
      cell.convergence_us = trace.summary.convergence_time_us;
      cell.convergence_updates = trace.summary.convergence_updates;
      if (cell.convergence_us) {
        converged_us.push_back(static_cast<double>(*cell.convergence_us));
      } else {
        ++point.censored;
      }
      point.cells.push_back(cell);
    }
    point.mean_us = mean(converged_us);
    point.std_us = sample_std(converged_us);
    return point;
  };

  // One job per grid point; join in grid order for stable output.
  std::vector<std::future<SweepPoint>> jobs;
  jobs.reserve(spec.alpha_grid.size());
  for (double alpha : spec.alpha_grid) {
    jobs.push_back(std::async(std::launch::async, sweep_point, alpha));
  }

  SweepResult result;
  std::string csv = "alpha,mean_convergence_us,std_convergence_us,censored";
  for (uint64_t seed : spec.seeds) csv += ",seed_" + std::to_string(seed) + "_us";
  csv += '\n';
  for (auto& job : jobs) {
    SweepPoint point = job.get();
    csv += fmt_double(point.alpha);
    csv += ',';
    csv += point.censored < point.cells.size() ? fmt_double(point.mean_us) : "";
    csv += ',';
    csv += point.censored < point.cells.size() ? fmt_double(point.std_us) : "";
    csv += ',';
    csv += std::to_string(point.censored);
    for (const SweepCell& cell : point.cells) {
      csv += ',';
      csv += cell.convergence_us ? std::to_string(*cell.convergence_us) : "censored";
    }
    csv += '\n';
    result.points.push_back(std::move(point));
  }
  write_file(out_path(spec, "sweep.csv"), csv);
  result.csv = std::move(csv);
  return result;
}

CompareResult run_throughput_compare(const ExperimentSpec& spec) {
  const Scenario sla = load_scenario(spec.scenario_path);
  Scenario baseline;
  if (spec.baseline_scenario_path) {
    baseline = load_scenario(*spec.baseline_scenario_path);
  } else {
    baseline = sla;
    baseline.agent_enabled = false;
    if (spec.baseline_pinned_path) baseline.pinned_path = *spec.baseline_pinned_path;
  }
  ensure_out_dir(spec);

  CompareResult result;
  std::vector<double> base_vals, sla_vals;
  std::string csv = "row,seed,baseline_goodput_pps,sla_goodput_pps,relative_delta\n";
  for (uint64_t seed : spec.seeds) {
    const SimulationTrace b = run_simulation(baseline, options_for(spec, seed));
    const SimulationTrace s = run_simulation(sla, options_for(spec, seed));
    CompareRun run;
    run.seed = seed;
    run.baseline_goodput_pps = b.summary.goodput_pps;
    run.sla_goodput_pps = s.summary.goodput_pps;
    run.relative_delta = run.baseline_goodput_pps > 0.0
                             ? (run.sla_goodput_pps - run.baseline_goodput_pps) /
                                   run.baseline_goodput_pps
                             : 0.0;
    base_vals.push_back(run.baseline_goodput_pps);
    sla_vals.push_back(run.sla_goodput_pps);
    csv += "run," + std::to_string(seed) + ',' + fmt_double(run.baseline_goodput_pps) + ',' +
           fmt_double(run.sla_goodput_pps) + ',' + fmt_double(run.relative_delta) + '\n';
    result.runs.push_back(run);
  }
  result.baseline_mean = mean(base_vals);
  result.sla_mean = mean(sla_vals);
  result.relative_delta = result.baseline_mean > 0.0
                              ? (result.sla_mean - result.baseline_mean) / result.baseline_mean
                              : 0.0;
  csv += "mean,," + fmt_double(result.baseline_mean) + ',' + fmt_double(result.sla_mean) + ',' +
         fmt_double(result.relative_delta) + '\n';
  write_file(out_path(spec, "compare.csv"), csv);
  result.csv = std::move(csv);
  return result;
}

}  // namespace slapath
