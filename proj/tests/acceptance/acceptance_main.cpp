// Acceptance gate for the whole library. Nine end-to-end checks, each
// printing exactly one [PASS]/[FAIL] verdict line; failure details are
// printed indented above the verdict. Exits nonzero if anything failed.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "slapath/agent.hpp"
#include "slapath/arith_backend.hpp"
#include "slapath/experiment.hpp"
#include "slapath/packet.hpp"
#include "slapath/rng.hpp"
#include "slapath/scenario.hpp"
#include "slapath/sigmoid_table.hpp"
#include "slapath/simulator.hpp"
#include "slapath/stats.hpp"
#include "slapath/telemetry.hpp"
#include "slapath/trace.hpp"

namespace fs = std::filesystem;
using namespace slapath;

namespace {

int failures = 0;
bool current_ok = true;

void expect(bool cond, const std::string& detail) {
  if (cond) return;
  current_ok = false;
  std::printf("    %s\n", detail.c_str());
}

void verdict(int number, const char* label) {
  std::printf("[%s] criterion %d: %s\n", current_ok ? "PASS" : "FAIL", number, label);
  std::fflush(stdout);
  if (!current_ok) ++failures;
  current_ok = true;
}

std::string scenario_path(const char* name) {
  return std::string(SLAPATH_SCENARIO_DIR) + "/" + name;
}

fs::path fresh_dir(const char* name) {
  fs::path d = fs::temp_directory_path() / "slapath_acceptance" / name;
  std::error_code ec;
  fs::remove_all(d, ec);
  fs::create_directories(d);
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Probability simplex invariant under a million randomized updates.

void check_simplex() {
  for (BackendKind kind : {BackendKind::Exact, BackendKind::Constrained}) {
    auto be = ArithBackend::make(kind, RewardParams{});
    const bool exact = kind == BackendKind::Exact;
    const double tol = exact ? 1e-9 : std::ldexp(1.0, -12);
    Rng rng(exact ? 11 : 12);
    std::string first_bad;
    for (size_t n : {2, 3, 4, 5}) {
      std::vector<double> p;
      be->init_uniform(p, n);
      for (int step = 0; step < 250000; ++step) {
        size_t sel = static_cast<size_t>(rng.below(static_cast<uint64_t>(n)));
        double reward = rng.below(4) == 0 ? 0.0 : rng.uniform01();
        double alpha = static_cast<double>(rng.below(1000) + 1) / 1000.0;
        be->sla_update(p, sel, reward, alpha);
        double sum = 0.0;
        bool in_range = true;
        for (double v : p) {
          sum += v;
          if (v < 0.0 || v > 1.0) in_range = false;
        }
        if ((std::fabs(sum - 1.0) > tol || !in_range) && first_bad.empty()) {
          first_bad = fmt("%s backend, n=%zu step %d: sum %.15g, in_range %d",
                          exact ? "exact" : "constrained", n, step, sum, in_range ? 1 : 0);
        }
      }
    }
    expect(first_bad.empty(), first_bad);
  }
  verdict(1, "probability simplex invariant");
}

// ---------------------------------------------------------------------------
// 2. Two-path trajectory under constant reward matches the closed form
//    p(t) = 1 - (1 - 1/2) (1 - alpha R)^t on the exact backend.

void check_closed_form() {
  auto be = ArithBackend::make(BackendKind::Exact, RewardParams{});
  std::string first_bad;
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    for (double reward : {0.25, 0.5, 1.0}) {
      std::vector<double> p = {0.5, 0.5};
      for (int t = 1; t <= 50; ++t) {
        be->sla_update(p, 0, reward, alpha);
        double want = 1.0 - 0.5 * std::pow(1.0 - alpha * reward, t);
        double dev = std::max(std::fabs(p[0] - want), std::fabs(p[1] - (1.0 - want)));
        if (dev > 1e-9 && first_bad.empty()) {
          first_bad = fmt("alpha %.2f reward %.2f t %d: |dev| %.3g", alpha, reward, t, dev);
        }
      }
    }
  }
  expect(first_bad.empty(), first_bad);
  verdict(2, "closed-form learning trajectory");
}

// ---------------------------------------------------------------------------
// 3. Reward anchors: the midpoint metrics score exactly 0.5, and the default
//    sigmoid tables stay within 0.05 of the true curve everywhere.

void check_reward_anchors() {
  RewardParams params;
  auto be = ArithBackend::make(BackendKind::Exact, params);
  double mid = compute_reward(SegmentMetrics{20, 500}, *be);
  expect(std::fabs(mid - 0.5) <= 1e-9, fmt("midpoint reward %.12f, want 0.5", mid));

  struct Curve {
    const char* name;
    double tau, c;
  };
  for (const Curve& cv : {Curve{"queue", params.tau_queue, params.c_queue},
                          Curve{"delay", params.tau_delay, params.c_delay}}) {
    SigmoidTable table = SigmoidTable::build(cv.tau, cv.c, SigmoidTable::kDefaultBuckets);
    double lo = cv.tau - 10.0 / cv.c;
    double hi = cv.tau + 10.0 / cv.c;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double m = lo + (hi - lo) * k / 999.0;
      double truth = 1.0 / (1.0 + std::exp(cv.c * (m - cv.tau)));
      worst = std::max(worst, std::fabs(table.lookup(m).to_real() - truth));
    }
    expect(worst <= 0.05, fmt("%s table: max error %.4f exceeds 0.05", cv.name, worst));
  }
  verdict(3, "reward anchors and sigmoid table error");
}

// ---------------------------------------------------------------------------
// 4. Faster learning rates converge faster: mean convergence time strictly
//    improves from alpha 0.1 to 0.5 and trends down in rank across the grid.

struct SweepHandle {
  ExperimentSpec spec;
  SweepResult result;
};

SweepHandle check_convergence_trend() {
  SweepHandle h;
  h.spec = load_experiment(scenario_path("sweep.json"));
  h.spec.out_dir = fresh_dir("sweep-a").string();
  h.result = run_alpha_sweep(h.spec);

  expect(h.result.points.size() == 10,
         fmt("expected 10 sweep points, got %zu", h.result.points.size()));
  std::vector<double> alphas;
  std::vector<double> means;
  double mean_01 = -1.0;
  double mean_05 = -1.0;
  for (const SweepPoint& pt : h.result.points) {
    expect(pt.censored == 0, fmt("alpha %.2f: %u censored runs", pt.alpha, pt.censored));
    alphas.push_back(pt.alpha);
    means.push_back(pt.mean_us);
    if (std::fabs(pt.alpha - 0.1) < 1e-12) mean_01 = pt.mean_us;
    if (std::fabs(pt.alpha - 0.5) < 1e-12) mean_05 = pt.mean_us;
  }
  expect(mean_01 > 0.0 && mean_05 > 0.0, "grid is missing alpha 0.1 or 0.5");
  expect(mean_01 > mean_05,
         fmt("mean convergence did not improve: %.1f us at 0.1 vs %.1f us at 0.5",
             mean_01, mean_05));
  // One-tailed critical value for Spearman's rho at n=10, p=0.05.
  double rho = spearman_rho(alphas, means);
  expect(rho <= -0.564, fmt("Spearman rho %.3f, need <= -0.564", rho));
  verdict(4, "convergence trend across step sizes");
  return h;
}

// ---------------------------------------------------------------------------
// 5. Congestion-shift scenario over 20 seeds: learns the clear path before
//    the shift, re-learns within 2000 data packets after it, and never
//    flaps inside a steering window.

std::vector<int> check_adaptation() {
  Scenario sc = load_scenario(scenario_path("poc.json"));
  std::vector<int> final_paths;
  int pre_ok = 0;
  int post_ok = 0;
  std::string first_osc;
  std::string first_shiftless;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    RunOptions opt;
    opt.seed = seed;
    opt.keep_hop_log = false;
    SimulationTrace t = run_simulation(sc, opt);
    final_paths.push_back(t.summary.final_learned_path);

    uint64_t shift_time = 0;
    uint64_t shift_embeds = 0;
    bool have_shift = false;
    for (const ScenarioEventRow& row : t.scenario_rows) {
      if (row.description.find("bg-seg1 start") != std::string::npos) {
        shift_time = row.time_us;
        shift_embeds = row.data_embeds;
        have_shift = true;
        break;
      }
    }
    if (!have_shift && first_shiftless.empty()) {
      first_shiftless = fmt("seed %llu: shift event missing from the trace",
                            static_cast<unsigned long long>(seed));
      continue;
    }

    const PhaseChange* first_steer = nullptr;
    for (const PhaseChange& pc : t.phase_changes) {
      if (pc.phase == AgentPhase::OptimizedSteering) {
        first_steer = &pc;
        break;
      }
    }
    if (first_steer && first_steer->time_us < shift_time && first_steer->learned_path == 1) {
      ++pre_ok;
    }
    for (const PhaseChange& pc : t.phase_changes) {
      if (pc.phase == AgentPhase::OptimizedSteering && pc.learned_path == 0 &&
          pc.time_us >= shift_time && pc.data_embeds - shift_embeds <= 2000) {
        ++post_ok;
        break;
      }
    }

    // A steering window opens with control packets still in flight: directives
    // emitted during the tail of the learning phase land just after the
    // transition, then the install itself. All register movement must fit
    // inside that settling burst, end on the learned path, and stop for the
    // rest of the window.
    constexpr uint64_t kSettleUs = 1000;
    for (size_t i = 0; i < t.phase_changes.size(); ++i) {
      if (t.phase_changes[i].phase != AgentPhase::OptimizedSteering) continue;
      uint64_t start = t.phase_changes[i].time_us;
      uint64_t end = i + 1 < t.phase_changes.size() ? t.phase_changes[i + 1].time_us
                                                    : sc.horizon_us + 1;
      int in_burst = 0;
      int late = 0;
      int last_path = -1;
      for (const RegisterChange& rc : t.register_changes) {
        if (rc.time_us < start || rc.time_us >= end) continue;
        last_path = static_cast<int>(rc.path);
        if (rc.time_us - start <= kSettleUs) {
          ++in_burst;
        } else {
          ++late;
        }
      }
      bool stable = late == 0 && in_burst <= 3 &&
                    (last_path == -1 || last_path == t.phase_changes[i].learned_path);
      if (!stable && first_osc.empty()) {
        first_osc = fmt(
            "seed %llu window at %llu us: %d settling + %d late switches, register ends on %d",
            static_cast<unsigned long long>(seed), static_cast<unsigned long long>(start),
            in_burst, late, last_path);
      }
    }
  }
  expect(first_shiftless.empty(), first_shiftless);
  expect(pre_ok >= 19, fmt("only %d/20 seeds converged to path 1 before the shift", pre_ok));
  expect(post_ok >= 18,
         fmt("only %d/20 seeds re-steered to path 0 within 2000 data packets", post_ok));
  expect(first_osc.empty(), first_osc);
  verdict(5, "adaptation to the congestion shift");
  return final_paths;
}

// ---------------------------------------------------------------------------
// 6. Telemetry fidelity: header round trips, payload restoration, and an
//    exact join of delivered reports against the simulator's own hop log.

void check_telemetry_roundtrip() {
  Rng rng(21);
  std::string first_bad;
  for (int n = 0; n < 10000; ++n) {
    IntHeader h;
    h.path_index = static_cast<uint8_t>(rng.below(256));
    h.is_probe = rng.below(2) == 1;
    h.packet_seq = static_cast<uint32_t>(rng.next_u64());
    size_t hops = static_cast<size_t>(rng.below(IntHeader::kMaxHops + 1));
    for (size_t i = 0; i < hops; ++i) {
      h.records.push_back(HopRecord{static_cast<uint32_t>(rng.next_u64()),
                                    static_cast<uint32_t>(rng.next_u64()),
                                    static_cast<uint32_t>(rng.next_u64())});
    }
    std::vector<uint8_t> wire = serialize_header(h);
    ParseResult pr = parse_header(wire);
    if ((!pr.ok || !(pr.header == h) || pr.consumed != wire.size()) && first_bad.empty()) {
      first_bad = fmt("header %d failed to round trip (%s)", n, pr.error.c_str());
    }
  }
  expect(first_bad.empty(), first_bad);

  std::string first_payload_bad;
  for (int n = 0; n < 1000; ++n) {
    Packet pk;
    size_t len = static_cast<size_t>(rng.below(65));
    for (size_t i = 0; i < len; ++i) pk.payload.push_back(static_cast<uint8_t>(rng.below(256)));
    std::vector<uint8_t> original = pk.payload;
    uint8_t path = static_cast<uint8_t>(rng.below(2));
    uint32_t seq = static_cast<uint32_t>(rng.next_u64());
    embed_header(pk, path, false, seq);
    std::vector<HopRecord> appended;
    size_t hops = static_cast<size_t>(rng.below(IntHeader::kMaxHops + 1));
    for (size_t i = 0; i < hops; ++i) {
      HopRecord rec{static_cast<uint32_t>(rng.below(100)),
                    static_cast<uint32_t>(rng.below(64)) + 1,
                    static_cast<uint32_t>(rng.below(5000))};
      append_hop(*pk.int_header, rec);
      appended.push_back(rec);
    }
    ExtractResult ex = extract_and_clone(pk, 9, 12345);
    bool ok = ex.had_header && pk.payload == original && !pk.int_header.has_value() &&
              ex.report.records == appended && ex.report.path_index == path &&
              ex.report.packet_seq == seq;
    if (!ok && first_payload_bad.empty()) {
      first_payload_bad = fmt("payload round trip %d corrupted the packet", n);
    }
  }
  expect(first_payload_bad.empty(), first_payload_bad);

  // Every delivered report must agree record-for-record with the hop log.
  Scenario sc = load_scenario(scenario_path("poc.json"));
  RunOptions opt;
  opt.seed = 1;
  opt.keep_hop_log = true;
  SimulationTrace t = run_simulation(sc, opt);
  expect(!t.reports.empty(), "the verification run delivered no reports");

  std::unordered_map<uint64_t, std::vector<const HopLogEntry*>> by_packet;
  for (const HopLogEntry& e : t.hop_log) by_packet[e.packet_id].push_back(&e);
  // The sink's egress port serializes extractions, so the timestamp of a
  // packet's last hop entry identifies it uniquely among sink-terminated logs.
  std::map<uint64_t, std::vector<uint64_t>> sink_groups;
  uint32_t sink_switch = sc.domains[0].endpoint_node;
  for (const auto& [pkt, entries] : by_packet) {
    if (entries.back()->switch_id == sink_switch) {
      sink_groups[entries.back()->time_us].push_back(pkt);
    }
  }
  std::string first_join_bad;
  for (size_t r = 0; r < t.reports.size(); ++r) {
    const TelemetryReport& rep = t.reports[r];
    auto it = sink_groups.find(rep.sink_timestamp_us);
    if (it == sink_groups.end() || it->second.size() != 1) {
      if (first_join_bad.empty()) {
        first_join_bad = fmt("report %zu at %llu us: %zu candidate hop-log groups", r,
                             static_cast<unsigned long long>(rep.sink_timestamp_us),
                             it == sink_groups.end() ? size_t{0} : it->second.size());
      }
      continue;
    }
    const auto& entries = by_packet[it->second[0]];
    bool match = rep.records.size() == entries.size();
    for (size_t i = 0; match && i < entries.size(); ++i) {
      match = rep.records[i].switch_id == entries[i]->switch_id &&
              rep.records[i].queue_length == entries[i]->queue_length &&
              rep.records[i].dequeue_delay == entries[i]->dequeue_delay;
    }
    if (!match && first_join_bad.empty()) {
      first_join_bad = fmt("report %zu at %llu us disagrees with the hop log", r,
                           static_cast<unsigned long long>(rep.sink_timestamp_us));
    }
  }
  expect(first_join_bad.empty(), first_join_bad);
  verdict(6, "telemetry round-trip fidelity");
}

// ---------------------------------------------------------------------------
// 7. Agent overhead: goodput with the agent on stays within 5% of the
//    pinned-path baseline on a clean network.

void check_overhead() {
  ExperimentSpec spec = load_experiment(scenario_path("compare.json"));
  spec.out_dir = fresh_dir("compare").string();
  CompareResult res = run_throughput_compare(spec);
  expect(res.baseline_mean > 0.0, "baseline goodput is zero");
  expect(res.sla_mean >= 0.95 * res.baseline_mean,
         fmt("goodput %.1f pps fell below 95%% of baseline %.1f pps", res.sla_mean,
             res.baseline_mean));
  verdict(7, "goodput overhead bound");
}

// ---------------------------------------------------------------------------
// 8. Determinism: identical specs and seeds give byte-identical outputs.

void check_determinism(const SweepHandle& sweep) {
  ExperimentSpec ts = load_experiment(scenario_path("timeseries.json"));
  fs::path dir_a = fresh_dir("ts-a");
  fs::path dir_b = fresh_dir("ts-b");
  ts.out_dir = dir_a.string();
  run_timeseries(ts);
  ts.out_dir = dir_b.string();
  run_timeseries(ts);
  for (const char* name : {"timeseries_s1.csv", "agent_s1.csv", "summary.csv"}) {
    std::string a = read_file(dir_a / name);
    std::string b = read_file(dir_b / name);
    expect(!a.empty(), fmt("%s was not written", name));
    expect(a == b, fmt("%s differs between identical runs", name));
  }

  ExperimentSpec again = sweep.spec;
  again.out_dir = fresh_dir("sweep-b").string();
  SweepResult rerun = run_alpha_sweep(again);
  expect(rerun.csv == sweep.result.csv, "sweep.csv differs between identical runs");
  expect(read_file(fs::path(sweep.spec.out_dir) / "sweep.csv") ==
             read_file(fs::path(again.out_dir) / "sweep.csv"),
         "written sweep.csv files differ");
  verdict(8, "byte-identical reruns");
}

// ---------------------------------------------------------------------------
// 9. Backend agreement: exact and constrained arithmetic land on the same
//    final learned path for every seed of both shipped experiment cohorts.

void check_backend_agreement(const std::vector<int>& exact_full) {
  std::string first_bad;

  ExperimentSpec sweep = load_experiment(scenario_path("sweep.json"));
  Scenario sc = load_scenario(sweep.scenario_path);
  for (uint64_t seed : sweep.seeds) {
    RunOptions opt;
    opt.seed = seed;
    opt.keep_hop_log = false;
    opt.horizon_override_us = sweep.horizon_us;
    opt.backend_override = BackendKind::Exact;
    int exact = run_simulation(sc, opt).summary.final_learned_path;
    opt.backend_override = BackendKind::Constrained;
    int constrained = run_simulation(sc, opt).summary.final_learned_path;
    if (exact != constrained && first_bad.empty()) {
      first_bad = fmt("sweep cohort seed %llu: exact path %d vs constrained path %d",
                      static_cast<unsigned long long>(seed), exact, constrained);
    }
  }

  for (uint64_t seed = 1; seed <= exact_full.size(); ++seed) {
    RunOptions opt;
    opt.seed = seed;
    opt.keep_hop_log = false;
    opt.backend_override = BackendKind::Constrained;
    int constrained = run_simulation(sc, opt).summary.final_learned_path;
    int exact = exact_full[seed - 1];
    if (exact != constrained && first_bad.empty()) {
      first_bad = fmt("shift cohort seed %llu: exact path %d vs constrained path %d",
                      static_cast<unsigned long long>(seed), exact, constrained);
    }
  }
  expect(first_bad.empty(), first_bad);
  verdict(9, "backend decision agreement");
}

}  // namespace

int main() {
  check_simplex();
  check_closed_form();
  check_reward_anchors();
  SweepHandle sweep = check_convergence_trend();
  std::vector<int> exact_full = check_adaptation();
  check_telemetry_roundtrip();
  check_overhead();
  check_determinism(sweep);
  check_backend_agreement(exact_full);

  if (failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d of 9 criteria failed\n", failures);
  return 1;
}
