#ifndef SLAPATH_SIMULATOR_HPP
#define SLAPATH_SIMULATOR_HPP

#include <cstdint>
#include <optional>

#include "slapath/scenario.hpp"
#include "slapath/trace.hpp"

namespace slapath {

struct RunOptions {
  uint64_t seed = 1;
  std::optional<BackendKind> backend_override;
  std::optional<uint64_t> horizon_override_us;
  bool keep_hop_log = true;
};

struct HopMeasurement {
  uint32_t queue_length = 0;   // packets, including the departing one
  uint32_t dequeue_delay = 0;  // microseconds
};

// Sampled at the instant the head packet is taken for transmission.
// queue_len_including counts the departing packet, so it is never 0.
HopMeasurement measure_dequeue(size_t queue_len_including, uint64_t enqueued_us, uint64_t now_us);

// Runs the scenario to its horizon under a single-threaded deterministic
// event loop. Identical scenario + options give a bit-identical trace.
// Throws ScenarioError when the scenario fails validation.
SimulationTrace run_simulation(const Scenario& scenario, const RunOptions& options);

}  // namespace slapath

#endif  // SLAPATH_SIMULATOR_HPP
