#ifndef SLAPATH_SCENARIO_HPP
#define SLAPATH_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slapath/agent.hpp"
#include "slapath/topology.hpp"

namespace slapath {

enum class TrafficMode : uint8_t { Cbr, OnOff, Responsive };

const char* traffic_mode_name(TrafficMode m);

// One traffic source. Data flows run host to host through the domain's
// decision node and receive telemetry; background flows are cross traffic
// that loads queues without participating in telemetry or goodput.
struct FlowSpec {
  std::string name;
  TrafficMode mode = TrafficMode::Cbr;
  bool background = false;
  uint32_t domain = 0;  // owning domain (data flows and on_segment shorthand)
  std::string src;      // node name; optional when on_segment is set
  std::string dst;
  // Background shorthand: ride the given segment from its first interior
  // switch to the endpoint, loading exactly the queues that segment's
  // telemetry observes.
  std::optional<uint32_t> on_segment;
  double rate_pps = 1000.0;
  uint64_t start_us = 0;
  std::optional<uint64_t> stop_us;
  // on-off mode
  double mean_on_us = 10000.0;
  double mean_off_us = 10000.0;
  // responsive mode (coarse additive-increase / halve-on-loss)
  double min_rate_pps = 100.0;
  double add_step_pps = 200.0;
  uint32_t batch = 32;
};

struct ScenarioEventSpec {
  enum class Kind : uint8_t { LinkCapacity, FlowStart, FlowStop };
  Kind kind = Kind::LinkCapacity;
  uint64_t time_us = 0;
  // LinkCapacity: scale the named link's configured capacity.
  std::string link_from;
  std::string link_to;
  double multiplier = 1.0;
  // FlowStart / FlowStop: named flow.
  std::string flow;
};

struct Scenario {
  std::string name;
  Topology topology;
  std::vector<Domain> domains;
  AgentConfig agent;
  bool agent_enabled = true;
  uint32_t pinned_path = 0;  // register value when the agent is disabled
  std::vector<FlowSpec> flows;
  std::vector<ScenarioEventSpec> events;
  uint64_t horizon_us = 5'000'000;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses a scenario file (see docs/scenario-schema.md). Unknown keys and type
// mismatches throw ScenarioError so typos never silently fall back to
// defaults. Semantic problems are validate_scenario's job; run_simulation
// applies it and throws on any violation.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin);

// Semantic checks beyond the topology validator: flow endpoints exist,
// rates are positive, referenced segments/links/flows exist. Returns all
// problems found. Events past the horizon are legal; they never fire.
std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace slapath

#endif  // SLAPATH_SCENARIO_HPP
