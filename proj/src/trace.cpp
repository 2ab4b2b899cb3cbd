#include "slapath/trace.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slapath {

namespace {

// %.9g keeps doubles byte-stable across runs without dumping 17 digits
// into every cell.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

size_t path_count(const SimulationTrace& t) {
  size_t n = 0;
  for (const TimeseriesRow& r : t.timeseries) n = std::max(n, r.queue_by_path.size());
  for (const AgentRow& r : t.agent_rows) n = std::max(n, r.probs.size());
  return n;
}

}  // namespace

std::string timeseries_csv(const SimulationTrace& t) {
  const size_t n = path_count(t);
  std::string out = "time_us";
  for (size_t i = 0; i < n; ++i) out += ",queue_p" + std::to_string(i);
  for (size_t i = 0; i < n; ++i) out += ",delay_us_p" + std::to_string(i);
  out += ",selected_path\n";
  for (const TimeseriesRow& r : t.timeseries) {
    out += std::to_string(r.time_us);
    for (size_t i = 0; i < n; ++i) {
      out += ',';
      out += std::to_string(i < r.queue_by_path.size() ? r.queue_by_path[i] : 0);
    }
    for (size_t i = 0; i < n; ++i) {
      out += ',';
      out += std::to_string(i < r.delay_by_path.size() ? r.delay_by_path[i] : 0);
    }
    out += ',';
    out += std::to_string(r.selected);
    out += '\n';
  }
  return out;
}

std::string agent_csv(const SimulationTrace& t) {
  const size_t n = path_count(t);
  std::string out = "time_us,domain,phase,reported_path,is_probe,queue_total,delay_total_us";
  for (size_t i = 0; i < n; ++i) out += ",p" + std::to_string(i);
  for (size_t i = 0; i < n; ++i) out += ",ema" + std::to_string(i);
  out += ",directive_path\n";
  for (const AgentRow& r : t.agent_rows) {
    out += std::to_string(r.time_us);
    out += ',';
    out += std::to_string(r.domain);
    out += ',';
    out += phase_name(r.phase);
    out += ',';
    out += std::to_string(r.reported_path);
    out += ',';
    out += r.is_probe ? '1' : '0';
    out += ',';
    out += std::to_string(r.queue_total);
    out += ',';
    out += std::to_string(r.delay_total);
    for (size_t i = 0; i < n; ++i) {
      out += ',';
      out += fmt_double(i < r.probs.size() ? r.probs[i] : 0.0);
    }
    for (size_t i = 0; i < n; ++i) {
      out += ',';
      out += fmt_double(i < r.ema.size() ? r.ema[i] : 0.0);
    }
    out += ',';
    out += std::to_string(r.directive_path);
    out += '\n';
  }
  return out;
}

std::string summary_csv_header() {
  return "seed,backend,horizon_us,injected_data,delivered_data,dropped_data,"
         "injected_background,delivered_background,dropped_background,"
         "probes_sent,probes_delivered,probes_dropped,"
         "reports_sent,reports_delivered,report_drops,"
         "control_sent,control_delivered,control_drops,"
         "telemetry_overflows,misroutes,rejected_reports,data_embeds,"
         "register_switches,phase_transitions,goodput_pps,"
         "converged,convergence_time_us,convergence_updates,"
         "final_phase,final_learned_path\n";
}

std::string summary_csv_row(const SimulationSummary& s) {
  std::string out;
  out += std::to_string(s.seed);
  out += ',';
  out += backend_name(s.backend);
  out += ',';
  out += std::to_string(s.horizon_us);
  for (uint64_t v : {s.injected_data, s.delivered_data, s.dropped_data, s.injected_background,
                     s.delivered_background, s.dropped_background, s.probes_sent,
                     s.probes_delivered, s.probes_dropped, s.reports_sent, s.reports_delivered,
                     s.report_drops, s.control_sent, s.control_delivered, s.control_drops,
                     s.telemetry_overflows, s.misroutes, s.rejected_reports, s.data_embeds,
                     s.register_switches, s.phase_transitions}) {
    out += ',';
    out += std::to_string(v);
  }
  out += ',';
  out += fmt_double(s.goodput_pps);
  out += ',';
  out += s.converged ? '1' : '0';
  out += ',';
  out += s.convergence_time_us ? std::to_string(*s.convergence_time_us) : "";
  out += ',';
  out += s.convergence_updates ? std::to_string(*s.convergence_updates) : "";
  out += ',';
  out += phase_name(s.final_phase);
  out += ',';
  out += std::to_string(s.final_learned_path);
  out += '\n';
  return out;
}

std::string summary_csv(const SimulationTrace& t) {
  return summary_csv_header() + summary_csv_row(t.summary);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace slapath
