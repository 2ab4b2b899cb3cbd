#ifndef SLAPATH_TRACE_HPP
#define SLAPATH_TRACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slapath/agent.hpp"
#include "slapath/telemetry.hpp"

namespace slapath {

// Agent snapshot taken immediately after a report was processed.
struct AgentRow {
  uint64_t time_us = 0;
  uint32_t domain = 0;
  AgentPhase phase = AgentPhase::Learning;
  std::vector<double> probs;
  std::vector<double> ema;
  uint8_t reported_path = 0;
  bool is_probe = false;
  uint64_t queue_total = 0;
  uint64_t delay_total = 0;
  int directive_path = -1;  // -1 when no directive was emitted
};

// Last-known per-segment telemetry view at each report arrival, plus the
// decision-node register at that instant: the three panels of the run's
// story in one row.
struct TimeseriesRow {
  uint64_t time_us = 0;
  std::vector<uint64_t> queue_by_path;
  std::vector<uint64_t> delay_by_path;
  uint32_t selected = 0;
};

struct RegisterChange {
  uint64_t time_us = 0;
  uint32_t path = 0;
  uint64_t data_embeds = 0;  // data packets embedded before this change
};

struct PhaseChange {
  uint64_t time_us = 0;
  AgentPhase phase = AgentPhase::Learning;
  int learned_path = -1;
  uint64_t data_embeds = 0;
};

struct ScenarioEventRow {
  uint64_t time_us = 0;
  std::string description;
  uint64_t data_embeds = 0;
};

// One entry per append_hop the simulator performed, for exact cross-checking
// of reported telemetry against the simulator's own bookkeeping.
struct HopLogEntry {
  uint64_t packet_id = 0;
  uint32_t switch_id = 0;
  uint32_t queue_length = 0;
  uint32_t dequeue_delay = 0;
  uint64_t time_us = 0;
};

struct FlowStats {
  std::string name;
  bool background = false;
  uint64_t injected = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;
  uint64_t in_flight = 0;  // still queued or on a link at the horizon
};

struct SimulationSummary {
  uint64_t seed = 0;
  BackendKind backend = BackendKind::Exact;
  uint64_t horizon_us = 0;
  uint64_t injected_data = 0;
  uint64_t delivered_data = 0;
  uint64_t dropped_data = 0;
  uint64_t injected_background = 0;
  uint64_t delivered_background = 0;
  uint64_t dropped_background = 0;
  uint64_t probes_sent = 0;
  uint64_t probes_delivered = 0;
  uint64_t probes_dropped = 0;
  uint64_t probes_in_flight = 0;
  uint64_t reports_sent = 0;
  uint64_t reports_delivered = 0;
  uint64_t report_drops = 0;
  uint64_t reports_in_flight = 0;
  uint64_t control_sent = 0;
  uint64_t control_delivered = 0;
  uint64_t control_drops = 0;
  uint64_t control_in_flight = 0;
  uint64_t telemetry_overflows = 0;
  uint64_t misroutes = 0;
  uint64_t rejected_reports = 0;
  uint64_t data_embeds = 0;
  uint64_t register_switches = 0;
  uint64_t phase_transitions = 0;
  double goodput_pps = 0.0;
  bool converged = false;
  std::optional<uint64_t> convergence_time_us;  // from first data embed
  std::optional<uint64_t> convergence_updates;
  AgentPhase final_phase = AgentPhase::Learning;
  int final_learned_path = -1;  // argmax of probs when still learning
};

struct SimulationTrace {
  SimulationSummary summary;
  std::vector<TelemetryReport> reports;
  std::vector<AgentRow> agent_rows;
  std::vector<TimeseriesRow> timeseries;
  std::vector<RegisterChange> register_changes;
  std::vector<PhaseChange> phase_changes;
  std::vector<ScenarioEventRow> scenario_rows;
  std::vector<HopLogEntry> hop_log;
  std::vector<FlowStats> flow_stats;
};

// CSV renderings. Columns are documented in the README; all of these start
// with a header row and are byte-stable for fixed inputs.
std::string timeseries_csv(const SimulationTrace& t);
std::string agent_csv(const SimulationTrace& t);
std::string summary_csv(const SimulationTrace& t);

// Split form so multi-run experiments can stack one row per run.
std::string summary_csv_header();
std::string summary_csv_row(const SimulationSummary& s);

void write_file(const std::string& path, const std::string& content);

}  // namespace slapath

#endif  // SLAPATH_TRACE_HPP
