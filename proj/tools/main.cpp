#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slapath/experiment.hpp"
#include "slapath/scenario.hpp"
#include "slapath/sigmoid_table.hpp"
#include "slapath/simulator.hpp"
#include "slapath/trace.hpp"

namespace {

struct CommonFlags {
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> backend;
  std::optional<uint64_t> horizon_us;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Override the spec's seed list with a single seed");
  cmd->add_option("--out-dir", flags.out_dir, "Directory for CSV outputs");
  cmd->add_option("--backend", flags.backend, "Agent arithmetic backend")
      ->check(CLI::IsMember({"exact", "constrained"}));
  cmd->add_option("--horizon-us", flags.horizon_us, "Override the simulation horizon");
}

slapath::ExperimentSpec load_with_flags(const std::string& path, const CommonFlags& flags) {
  slapath::ExperimentSpec spec = slapath::load_experiment(path);
  if (flags.seed) spec.seeds = {*flags.seed};
  if (flags.out_dir) spec.out_dir = *flags.out_dir;
  if (flags.horizon_us) spec.horizon_us = *flags.horizon_us;
  if (flags.backend) {
    slapath::BackendKind kind;
    slapath::parse_backend(*flags.backend, kind);
    spec.backend = kind;
  }
  return spec;
}

int cmd_validate(const std::string& path) {
  const slapath::Scenario sc = slapath::load_scenario(path);
  const std::vector<std::string> problems = slapath::validate_scenario(sc);
  if (problems.empty()) {
    std::printf("%s: ok (%zu nodes, %zu links, %zu domains, %zu flows)\n", sc.name.c_str(),
                sc.topology.nodes().size(), sc.topology.links().size(), sc.domains.size(),
                sc.flows.size());
    return 0;
  }
  for (const std::string& p : problems) std::fprintf(stderr, "%s\n", p.c_str());
  return 1;
}

int cmd_run(const std::string& path, const CommonFlags& flags) {
  const slapath::ExperimentSpec spec = load_with_flags(path, flags);
  const slapath::TimeseriesResult result = slapath::run_timeseries(spec);
  for (size_t i = 0; i < result.traces.size(); ++i) {
    const slapath::SimulationSummary& s = result.traces[i].summary;
    std::printf("seed %llu: delivered %llu/%llu data packets, goodput %.1f pps, %s\n",
                static_cast<unsigned long long>(s.seed),
                static_cast<unsigned long long>(s.delivered_data),
                static_cast<unsigned long long>(s.injected_data), s.goodput_pps,
                s.converged ? "converged" : "did not converge");
  }
  std::printf("wrote %zu run(s) to %s\n", result.traces.size(), spec.out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& path, const CommonFlags& flags) {
  const slapath::ExperimentSpec spec = load_with_flags(path, flags);
  const slapath::SweepResult result = slapath::run_alpha_sweep(spec);
  for (const slapath::SweepPoint& p : result.points) {
    std::printf("alpha %.3g: mean %.0f us (std %.0f, censored %u/%zu)\n", p.alpha, p.mean_us,
                p.std_us, p.censored, p.cells.size());
  }
  std::printf("wrote sweep.csv to %s\n", spec.out_dir.c_str());
  return 0;
}

int cmd_compare(const std::string& path, const CommonFlags& flags) {
  const slapath::ExperimentSpec spec = load_with_flags(path, flags);
  const slapath::CompareResult result = slapath::run_throughput_compare(spec);
  std::printf("baseline mean %.1f pps, agent mean %.1f pps, relative delta %.4f\n",
              result.baseline_mean, result.sla_mean, result.relative_delta);
  std::printf("wrote compare.csv to %s\n", spec.out_dir.c_str());
  return 0;
}

int cmd_dump_sigmoid(double c, double tau, int buckets) {
  const slapath::SigmoidTable table = slapath::SigmoidTable::build(tau, c, buckets);
  std::printf("bucket,metric_lo,metric_hi,raw,value,exact_at_mid\n");
  const double lo = table.domain_low();
  const double width = table.bucket_width();
  for (int i = 0; i < buckets; ++i) {
    const double a = lo + i * width;
    const double b = a + width;
    const double mid = a + width / 2.0;
    const slapath::FixedPoint out = table.lookup(mid);
    std::printf("%d,%.9g,%.9g,%u,%.9g,%.9g\n", i, a, b, out.raw, out.to_real(),
                slapath::sigmoid_exact(mid, tau, c));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for telemetry-driven path selection"};
  app.require_subcommand(1);

  std::string scenario_path, experiment_path;
  CommonFlags flags;

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file and list violations");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  CLI::App* run = app.add_subcommand("run", "Run the time-series experiment");
  run->add_option("spec", experiment_path, "Experiment JSON file")->required();
  add_common(run, flags);

  CLI::App* sweep = app.add_subcommand("sweep", "Run the learning-rate sweep");
  sweep->add_option("spec", experiment_path, "Experiment JSON file")->required();
  add_common(sweep, flags);

  CLI::App* compare = app.add_subcommand("compare", "Compare agent goodput against a pinned baseline");
  compare->add_option("spec", experiment_path, "Experiment JSON file")->required();
  add_common(compare, flags);

  CLI::App* table = app.add_subcommand("table", "Inspect data-plane lookup tables");
  double c = 0.3, tau = 20.0;
  int buckets = 64;
  CLI::App* dump = table->add_subcommand("dump-sigmoid", "Print the sigmoid lookup table as CSV");
  dump->add_option("--c", c, "Sigmoid steepness");
  dump->add_option("--tau", tau, "Sigmoid midpoint (metric units)");
  dump->add_option("--buckets", buckets, "Bucket count")->check(CLI::PositiveNumber);
  table->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help; anything else is a usage error.
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (run->parsed()) return cmd_run(experiment_path, flags);
    if (sweep->parsed()) return cmd_sweep(experiment_path, flags);
    if (compare->parsed()) return cmd_compare(experiment_path, flags);
    if (table->parsed() && dump->parsed()) return cmd_dump_sigmoid(c, tau, buckets);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
