#ifndef SLAPATH_AGENT_HPP
#define SLAPATH_AGENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slapath/arith_backend.hpp"
#include "slapath/rng.hpp"
#include "slapath/telemetry.hpp"

namespace slapath {

enum class AgentPhase : uint8_t { Learning, OptimizedSteering };

const char* phase_name(AgentPhase p);

// Collector -> decision node instruction. flags bit 0 marks a probe
// directive, reserved for collector-driven probe scheduling; the shipped
// agent emits only data-path directives and the decision node schedules
// probes locally.
struct ControlDirective {
  uint32_t domain_id = 0;
  uint8_t path_index = 0;
  bool is_probe = false;

  friend bool operator==(const ControlDirective&, const ControlDirective&) = default;
};

// 6 bytes big-endian: domain_id, path index, flags.
std::vector<uint8_t> serialize_directive(const ControlDirective& d);

struct DirectiveParseResult {
  bool ok = false;
  std::string error;
  ControlDirective directive;
};

DirectiveParseResult parse_directive(const uint8_t* data, size_t size);
DirectiveParseResult parse_directive(const std::vector<uint8_t>& bytes);

struct AgentConfig {
  double alpha = 0.5;
  double p_conv = 0.9;
  uint32_t probe_interval = 100;  // data packets between probes
  double ema_gamma = 0.125;
  double theta_low = 0.4;
  double delta_improve = 0.1;
  uint32_t window = 3;  // consecutive degraded probes before re-exploration
  RewardParams reward;
  BackendKind backend = BackendKind::Exact;
  int sigmoid_buckets = SigmoidTable::kDefaultBuckets;

  // p_conv must exceed the uniform mass 1/num_segments.
  void validate(size_t num_segments) const;  // throws std::invalid_argument
};

struct AgentState {
  AgentPhase phase = AgentPhase::Learning;
  std::vector<double> probs;            // on the backend's grid
  std::optional<uint32_t> learned_path;
  std::vector<double> ema;              // per-segment reward EMA
  uint32_t probes_since_switch = 0;
  uint32_t degradation_streak = 0;
};

double compute_reward(const SegmentMetrics& metrics, const ArithBackend& backend);

// Draws i with probability probs[i] from a single uniform variate; the last
// entry absorbs any residual so a draw always lands.
uint32_t select_path(const std::vector<double>& probs, Rng& rng);

AgentState initial_state(const ArithBackend& backend, size_t num_segments);

// One agent per domain. Owns its random stream and arithmetic backend, so
// identical config + seed + report sequence reproduce the exact state
// trajectory.
class SlaAgent {
 public:
  SlaAgent(AgentConfig config, uint32_t domain_id, size_t num_segments, Rng rng);

  // The full per-report step. Returns the directive to send back to the
  // decision node, if any. Reports naming an unknown path index are counted
  // and ignored.
  std::optional<ControlDirective> on_report(const TelemetryReport& report);

  const AgentState& state() const { return state_; }
  const AgentConfig& config() const { return config_; }
  const ArithBackend& backend() const { return *backend_; }
  uint32_t domain_id() const { return domain_id_; }
  size_t num_segments() const { return state_.probs.size(); }

  uint64_t rejected_reports() const { return rejected_reports_; }
  uint64_t updates_applied() const { return updates_applied_; }
  uint64_t phase_transitions() const { return phase_transitions_; }

 private:
  std::optional<ControlDirective> directive(uint32_t path) const;
  void enter_learning();
  void enter_steering(uint32_t learned);

  AgentConfig config_;
  uint32_t domain_id_;
  std::unique_ptr<ArithBackend> backend_;
  AgentState state_;
  Rng rng_;
  uint64_t rejected_reports_ = 0;
  uint64_t updates_applied_ = 0;
  uint64_t phase_transitions_ = 0;
};

}  // namespace slapath

#endif  // SLAPATH_AGENT_HPP
