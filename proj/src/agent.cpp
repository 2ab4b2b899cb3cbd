#include "slapath/agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace slapath {

const char* phase_name(AgentPhase p) {
  return p == AgentPhase::Learning ? "learning" : "optimized_steering";
}

std::vector<uint8_t> serialize_directive(const ControlDirective& d) {
  std::vector<uint8_t> out(6);
  out[0] = static_cast<uint8_t>(d.domain_id >> 24);
  out[1] = static_cast<uint8_t>(d.domain_id >> 16);
  out[2] = static_cast<uint8_t>(d.domain_id >> 8);
  out[3] = static_cast<uint8_t>(d.domain_id);
  out[4] = d.path_index;
  out[5] = d.is_probe ? 0x01 : 0x00;
  return out;
}

DirectiveParseResult parse_directive(const uint8_t* data, size_t size) {
  DirectiveParseResult r;
  if (size < 6) {
    r.error = "directive truncated";
    return r;
  }
  if (data[5] & ~0x01u) {
    r.error = "unknown directive flag bits";
    return r;
  }
  r.directive.domain_id = (static_cast<uint32_t>(data[0]) << 24) |
                          (static_cast<uint32_t>(data[1]) << 16) |
                          (static_cast<uint32_t>(data[2]) << 8) | static_cast<uint32_t>(data[3]);
  r.directive.path_index = data[4];
  r.directive.is_probe = (data[5] & 0x01u) != 0;
  r.ok = true;
  return r;
}

DirectiveParseResult parse_directive(const std::vector<uint8_t>& bytes) {
  return parse_directive(bytes.data(), bytes.size());
}

void AgentConfig::validate(size_t num_segments) const {
  if (num_segments < 2) throw std::invalid_argument("agent needs at least two segments");
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
  const double uniform = 1.0 / static_cast<double>(num_segments);
  if (!(p_conv > uniform) || !(p_conv < 1.0)) {
    throw std::invalid_argument("convergence threshold must lie between the uniform probability and 1");
  }
  if (probe_interval < 1) throw std::invalid_argument("probe interval must be >= 1");
  if (!(ema_gamma > 0.0) || !(ema_gamma < 1.0)) {
    throw std::invalid_argument("ema gamma must be in (0,1)");
  }
  if (!(theta_low >= 0.0) || !(theta_low <= 1.0)) {
    throw std::invalid_argument("theta_low must be in [0,1]");
  }
  if (!(delta_improve >= 0.0)) throw std::invalid_argument("delta_improve must be >= 0");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  reward.validate();
}

double compute_reward(const SegmentMetrics& metrics, const ArithBackend& backend) {
  const double fq = backend.sigmoid_queue(static_cast<double>(metrics.queue_total));
  const double fd = backend.sigmoid_delay(static_cast<double>(metrics.delay_total));
  return backend.combine_reward(fq, fd);
}

uint32_t select_path(const std::vector<double>& probs, Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("empty probability vector");
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return static_cast<uint32_t>(i);
  }
  return static_cast<uint32_t>(probs.size() - 1);
}

AgentState initial_state(const ArithBackend& backend, size_t num_segments) {
  AgentState s;
  s.phase = AgentPhase::Learning;
  backend.init_uniform(s.probs, num_segments);
  s.ema.assign(num_segments, backend.quantize_unit(0.5));  // neutral prior
  return s;
}

SlaAgent::SlaAgent(AgentConfig config, uint32_t domain_id, size_t num_segments, Rng rng)
    : config_(std::move(config)),
      domain_id_(domain_id),
      backend_(ArithBackend::make(config_.backend, config_.reward, config_.sigmoid_buckets)),
      state_(),
      rng_(rng) {
  config_.validate(num_segments);
  state_ = initial_state(*backend_, num_segments);
}

std::optional<ControlDirective> SlaAgent::directive(uint32_t path) const {
  return ControlDirective{domain_id_, static_cast<uint8_t>(path), false};
}

void SlaAgent::enter_learning() {
  state_.phase = AgentPhase::Learning;
  backend_->init_uniform(state_.probs, state_.probs.size());
  state_.learned_path.reset();
  state_.degradation_streak = 0;
  state_.probes_since_switch = 0;
  ++phase_transitions_;
}

void SlaAgent::enter_steering(uint32_t learned) {
  state_.phase = AgentPhase::OptimizedSteering;
  state_.learned_path = learned;
  state_.degradation_streak = 0;
  state_.probes_since_switch = 0;
  ++phase_transitions_;
}

std::optional<ControlDirective> SlaAgent::on_report(const TelemetryReport& report) {
  if (report.path_index >= state_.probs.size()) {
    ++rejected_reports_;
    return std::nullopt;
  }
  const size_t path = report.path_index;
  const double reward = compute_reward(aggregate(report), *backend_);
  state_.ema[path] = backend_->ema_step(state_.ema[path], reward, config_.ema_gamma);

  if (report.is_probe) {
    ++state_.probes_since_switch;
    if (state_.phase == AgentPhase::OptimizedSteering) {
      const uint32_t learned = *state_.learned_path;
      bool degraded = state_.ema[learned] < config_.theta_low;
      for (size_t i = 0; i < state_.ema.size() && !degraded; ++i) {
        if (i != learned && state_.ema[i] > state_.ema[learned] + config_.delta_improve) {
          degraded = true;
        }
      }
      if (degraded) {
        if (++state_.degradation_streak >= config_.window) enter_learning();
      } else {
        state_.degradation_streak = 0;
      }
    }
    return std::nullopt;  // probes monitor only
  }

  if (state_.phase == AgentPhase::OptimizedSteering) {
    return directive(*state_.learned_path);
  }

  backend_->sla_update(state_.probs, path, reward, config_.alpha);
  ++updates_applied_;
  const size_t argmax = static_cast<size_t>(
      std::max_element(state_.probs.begin(), state_.probs.end()) - state_.probs.begin());
  if (state_.probs[argmax] >= config_.p_conv) {
    enter_steering(static_cast<uint32_t>(argmax));
    return directive(argmax);
  }
  return directive(select_path(state_.probs, rng_));
}

}  // namespace slapath
