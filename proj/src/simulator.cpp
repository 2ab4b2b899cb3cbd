#include "slapath/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "slapath/packet.hpp"
#include "slapath/rng.hpp"

namespace slapath {

HopMeasurement measure_dequeue(size_t queue_len_including, uint64_t enqueued_us, uint64_t now_us) {
  constexpr uint64_t kMax = std::numeric_limits<uint32_t>::max();
  HopMeasurement m;
  m.queue_length = static_cast<uint32_t>(std::min<uint64_t>(queue_len_including, kMax));
  const uint64_t wait = now_us >= enqueued_us ? now_us - enqueued_us : 0;
  m.dequeue_delay = static_cast<uint32_t>(std::min<uint64_t>(wait, kMax));
  return m;
}

namespace {

// Synthetic flow ids for packets the network itself creates.
constexpr uint32_t kProbeFlow = 0xfffffffeu;
constexpr uint32_t kReportFlow = 0xfffffffdu;
constexpr uint32_t kControlFlow = 0xfffffffcu;

enum class EventKind : uint8_t { SourceTick, Arrival, PortService, ScenarioChange };

struct Event {
  uint64_t time = 0;
  uint64_t seq = 0;  // insertion order; ties execute FIFO
  EventKind kind = EventKind::SourceTick;
  uint32_t index = 0;  // flow / link / scenario event index
  uint32_t gen = 0;    // flow activation generation (stale ticks are ignored)
  NodeId node = 0;
  bool has_packet = false;
  Packet packet;  // meaningful only for Arrival events
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct PortState {
  std::deque<Packet> queue;
  uint64_t busy_until = 0;  // port is transmitting until this instant
  double capacity_pps = 0.0;
  LinkParams base;
};

struct FlowState {
  const FlowSpec* spec = nullptr;
  std::vector<NodeId> route;  // injection route (data flows: up to the decision node)
  NodeId final_dst = 0;       // real destination; beyond route.back() for data flows
  bool active = false;
  uint32_t gen = 0;
  uint64_t activation_us = 0;
  uint64_t tick_index = 0;
  double rate = 0.0;
  bool on = true;  // on-off mode state
  uint64_t phase_end_us = 0;
  uint64_t drops_seen = 0;      // responsive mode bookkeeping
  uint64_t delivered_credit = 0;
  uint64_t injected = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;
  uint64_t in_flight = 0;
  Rng rng{0};
};

struct DomainState {
  const Domain* dom = nullptr;
  uint32_t reg = 0;            // current_path register at the decision node
  uint64_t data_embeds = 0;    // data packets embedded so far
  uint64_t embed_seq = 0;      // header sequence numbers (data and probes)
  uint64_t probe_countdown = 0;
  uint32_t probe_rr = 0;       // cursor over alternate segments
  std::vector<uint64_t> last_q;
  std::vector<uint64_t> last_d;
  std::optional<SlaAgent> agent;
  AgentPhase prev_phase = AgentPhase::Learning;
  int prev_learned = -1;
};

class Simulation {
 public:
  Simulation(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt) {
    auto problems = validate_scenario(sc_);
    if (!problems.empty()) {
      std::string msg = "scenario invalid:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw ScenarioError(msg);
    }
    horizon_ = opt_.horizon_override_us.value_or(sc_.horizon_us);
    backend_ = opt_.backend_override.value_or(sc_.agent.backend);
    init_ports();
    init_domains();
    init_flows();
    init_schedule();
  }

  SimulationTrace run() {
    while (!heap_.empty() && heap_.front().time <= horizon_) {
      Event e = pop_event();
      now_ = e.time;
      switch (e.kind) {
        case EventKind::SourceTick: on_tick(e.index, e.gen); break;
        case EventKind::Arrival: handle_arrival(std::move(e.packet), e.node); break;
        case EventKind::PortService: on_port_service(e.index); break;
        case EventKind::ScenarioChange: on_scenario_change(e.index); break;
      }
    }
    finalize();
    return std::move(trace_);
  }

 private:
  // ---- setup ----

  void init_ports() {
    const auto& links = sc_.topology.links();
    ports_.resize(links.size());
    for (size_t i = 0; i < links.size(); ++i) {
      ports_[i].capacity_pps = links[i].params.capacity_pps;
      ports_[i].base = links[i].params;
    }
  }

  void init_domains() {
    domains_.resize(sc_.domains.size());
    AgentConfig cfg = sc_.agent;
    cfg.backend = backend_;
    for (size_t i = 0; i < sc_.domains.size(); ++i) {
      DomainState& ds = domains_[i];
      ds.dom = &sc_.domains[i];
      ds.reg = sc_.agent_enabled ? 0 : sc_.pinned_path;
      ds.probe_countdown = cfg.probe_interval;
      ds.last_q.assign(ds.dom->segments.size(), 0);
      ds.last_d.assign(ds.dom->segments.size(), 0);
      if (sc_.agent_enabled) {
        ds.agent.emplace(cfg, ds.dom->id, ds.dom->segments.size(),
                         Rng::fork(opt_.seed, 1 + static_cast<uint64_t>(i)));
      }
      decision_of_[ds.dom->decision_node] = static_cast<uint32_t>(i);
      domain_by_id_[ds.dom->id] = static_cast<uint32_t>(i);
    }
  }

  void init_flows() {
    flows_.resize(sc_.flows.size());
    for (size_t i = 0; i < sc_.flows.size(); ++i) {
      FlowState& f = flows_[i];
      f.spec = &sc_.flows[i];
      f.rate = f.spec->rate_pps;
      f.rng = Rng::fork(opt_.seed, 1000 + static_cast<uint64_t>(i));
      f.route = injection_route(*f.spec);
      // Data injection routes stop at the decision node; the packet's true
      // destination has to survive that truncation for the segment walk.
      f.final_dst =
          f.spec->background ? f.route.back() : *sc_.topology.find_node(f.spec->dst);
    }
  }

  std::vector<NodeId> injection_route(const FlowSpec& fs) {
    const Topology& t = sc_.topology;
    if (fs.background && fs.on_segment.has_value()) {
      const PathSegment& seg = sc_.domains[fs.domain].segments[*fs.on_segment];
      if (seg.nodes.size() >= 3) return {seg.nodes.begin() + 1, seg.nodes.end()};
      return seg.nodes;
    }
    NodeId src = *t.find_node(fs.src);
    NodeId dst = *t.find_node(fs.dst);
    if (fs.background) return static_route(src, dst);
    // Data traffic is routed to its domain's decision node; the segment and
    // the rest of the walk are chosen there.
    return static_route(src, sc_.domains[fs.domain].decision_node);
  }

  void init_schedule() {
    // A flow named by a flow_start event is driven by that event alone;
    // its own start_us would otherwise race the event's activation.
    std::set<std::string> event_started;
    for (const ScenarioEventSpec& ev : sc_.events) {
      if (ev.kind == ScenarioEventSpec::Kind::FlowStart) event_started.insert(ev.flow);
    }
    for (size_t i = 0; i < flows_.size(); ++i) {
      const FlowSpec& fs = *flows_[i].spec;
      if (!event_started.count(fs.name)) {
        schedule_flow_start(static_cast<uint32_t>(i), fs.start_us);
      }
      if (fs.stop_us) schedule_flow_stop(static_cast<uint32_t>(i), *fs.stop_us);
    }
    for (size_t i = 0; i < sc_.events.size(); ++i) {
      Event e;
      e.time = sc_.events[i].time_us;
      e.kind = EventKind::ScenarioChange;
      e.index = static_cast<uint32_t>(i);
      schedule(std::move(e));
    }
  }

  void schedule_flow_start(uint32_t idx, uint64_t when) {
    Event e;
    e.time = when;
    e.kind = EventKind::ScenarioChange;
    e.index = kFlowStartBase + idx;
    schedule(std::move(e));
  }

  void schedule_flow_stop(uint32_t idx, uint64_t when) {
    Event e;
    e.time = when;
    e.kind = EventKind::ScenarioChange;
    e.index = kFlowStopBase + idx;
    schedule(std::move(e));
  }

  // ---- event machinery ----

  void schedule(Event e) {
    e.seq = next_seq_++;
    heap_.push_back(std::move(e));
    std::push_heap(heap_.begin(), heap_.end(), EventAfter{});
  }

  Event pop_event() {
    std::pop_heap(heap_.begin(), heap_.end(), EventAfter{});
    Event e = std::move(heap_.back());
    heap_.pop_back();
    return e;
  }

  // ---- routing ----

  std::vector<NodeId> static_route(NodeId a, NodeId b) {
    auto key = std::make_pair(a, b);
    auto it = route_cache_.find(key);
    if (it != route_cache_.end()) return it->second;
    std::vector<NodeId> route = shortest_route(sc_.topology, a, b);
    route_cache_.emplace(key, route);
    return route;
  }

  // ---- traffic sources ----

  void on_scenario_change(uint32_t index) {
    if (index >= kFlowStopBase) {
      deactivate_flow(index - kFlowStopBase);
      return;
    }
    if (index >= kFlowStartBase) {
      activate_flow(index - kFlowStartBase);
      return;
    }
    const ScenarioEventSpec& ev = sc_.events[index];
    std::string desc;
    switch (ev.kind) {
      case ScenarioEventSpec::Kind::LinkCapacity: {
        NodeId from = *sc_.topology.find_node(ev.link_from);
        NodeId to = *sc_.topology.find_node(ev.link_to);
        size_t li = *sc_.topology.find_link(from, to);
        ports_[li].capacity_pps = ports_[li].base.capacity_pps * ev.multiplier;
        desc = "link " + ev.link_from + "->" + ev.link_to + " capacity x" +
               std::to_string(ev.multiplier);
        break;
      }
      case ScenarioEventSpec::Kind::FlowStart:
        activate_flow(flow_index(ev.flow));
        desc = "flow " + ev.flow + " start";
        break;
      case ScenarioEventSpec::Kind::FlowStop:
        deactivate_flow(flow_index(ev.flow));
        desc = "flow " + ev.flow + " stop";
        break;
    }
    trace_.scenario_rows.push_back({now_, desc, total_data_embeds()});
  }

  uint32_t flow_index(const std::string& name) const {
    for (size_t i = 0; i < flows_.size(); ++i) {
      if (flows_[i].spec->name == name) return static_cast<uint32_t>(i);
    }
    return 0;  // unreachable; validated
  }

  void activate_flow(uint32_t idx) {
    FlowState& f = flows_[idx];
    if (f.active) return;
    f.active = true;
    ++f.gen;
    f.activation_us = now_;
    f.tick_index = 0;
    f.rate = f.spec->rate_pps;
    f.on = true;
    if (f.spec->mode == TrafficMode::OnOff) {
      f.phase_end_us = now_ + duration_us(f.rng.exponential(f.spec->mean_on_us));
    }
    Event e;
    e.time = now_;
    e.kind = EventKind::SourceTick;
    e.index = idx;
    e.gen = f.gen;
    schedule(std::move(e));
  }

  void deactivate_flow(uint32_t idx) {
    FlowState& f = flows_[idx];
    f.active = false;
    ++f.gen;  // orphan any scheduled tick
  }

  static uint64_t duration_us(double v) {
    return v <= 1.0 ? 1 : static_cast<uint64_t>(std::llround(v));
  }

  uint64_t interval_us(double rate) const {
    return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(1e6 / rate)));
  }

  void on_tick(uint32_t idx, uint32_t gen) {
    FlowState& f = flows_[idx];
    if (!f.active || f.gen != gen) return;
    uint64_t next = 0;
    switch (f.spec->mode) {
      case TrafficMode::Cbr: {
        inject(idx);
        ++f.tick_index;
        // Anchored to the activation instant so the spacing never drifts.
        next = f.activation_us +
               static_cast<uint64_t>(std::llround(static_cast<double>(f.tick_index) * 1e6 /
                                                  f.rate));
        if (next <= now_) next = now_ + 1;
        break;
      }
      case TrafficMode::OnOff: {
        while (now_ >= f.phase_end_us) {
          f.on = !f.on;
          const double mean = f.on ? f.spec->mean_on_us : f.spec->mean_off_us;
          f.phase_end_us += duration_us(f.rng.exponential(mean));
        }
        if (f.on) {
          inject(idx);
          next = now_ + interval_us(f.rate);
        } else {
          next = f.phase_end_us;
        }
        break;
      }
      case TrafficMode::Responsive: {
        while (f.delivered >= f.delivered_credit + f.spec->batch) {
          f.delivered_credit += f.spec->batch;
          f.rate += f.spec->add_step_pps;
        }
        if (f.dropped > f.drops_seen) {
          f.drops_seen = f.dropped;
          f.rate = std::max(f.spec->min_rate_pps, f.rate * 0.5);
        }
        inject(idx);
        next = now_ + interval_us(f.rate);
        break;
      }
    }
    Event e;
    e.time = next;
    e.kind = EventKind::SourceTick;
    e.index = idx;
    e.gen = gen;
    schedule(std::move(e));
  }

  void inject(uint32_t idx) {
    FlowState& f = flows_[idx];
    Packet p;
    p.id = next_packet_id_++;
    p.kind = f.spec->background ? PacketKind::Background : PacketKind::Data;
    p.flow_id = idx;
    p.route = f.route;
    p.src = p.route.front();
    p.dst = f.final_dst;
    p.created_us = now_;
    p.payload = make_payload(p.id);
    ++f.injected;
    if (f.spec->background) {
      ++trace_.summary.injected_background;
    } else {
      ++trace_.summary.injected_data;
      if (!first_data_inject_) first_data_inject_ = now_;
    }
    const NodeId entry = p.route.front();
    handle_arrival(std::move(p), entry);
  }

  static std::vector<uint8_t> make_payload(uint64_t id) {
    const uint64_t bits = splitmix64(id);
    std::vector<uint8_t> out(8);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(bits >> (8 * i));
    return out;
  }

  // ---- forwarding ----

  void handle_arrival(Packet&& p, NodeId node) {
    if (p.kind == PacketKind::Data && !p.int_header.has_value()) {
      auto it = decision_of_.find(node);
      if (it != decision_of_.end() && flows_[p.flow_id].spec->domain == it->second) {
        embed_at_decision(p, it->second, node);
      }
    }
    if (node == p.route.back()) {
      deliver(std::move(p), node);
      return;
    }
    const NodeId next = p.route[p.hop + 1];
    auto li = sc_.topology.find_link(node, next);
    if (!li) {
      ++trace_.summary.misroutes;
      count_drop(p);
      return;
    }
    enqueue(*li, std::move(p));
  }

  void embed_at_decision(Packet& p, uint32_t di, NodeId node) {
    DomainState& ds = domains_[di];
    const Domain& dom = *ds.dom;
    const uint32_t chosen = ds.reg;
    p.domain = di;
    p.route = segment_walk(dom, chosen, p.dst);
    p.hop = 0;
    embed_header(p, static_cast<uint8_t>(chosen), false,
                 static_cast<uint32_t>(ds.embed_seq++));
    ++ds.data_embeds;
    if (sc_.agent_enabled && --ds.probe_countdown == 0) {
      ds.probe_countdown = sc_.agent.probe_interval;
      emit_probe(p, ds, di, node);
    }
  }

  std::vector<NodeId> segment_walk(const Domain& dom, uint32_t seg_idx, NodeId dst) {
    const PathSegment& seg = dom.segments[seg_idx];
    std::vector<NodeId> route = seg.nodes;
    const std::vector<NodeId> tail = static_route(dom.endpoint_node, dst);
    route.insert(route.end(), tail.begin() + 1, tail.end());
    return route;
  }

  void emit_probe(const Packet& original, DomainState& ds, uint32_t di, NodeId node) {
    const size_t segments = ds.dom->segments.size();
    // Round-robin over the segments not currently steered to.
    std::vector<uint32_t> alts;
    for (uint32_t i = 0; i < segments; ++i) {
      if (i != ds.reg) alts.push_back(i);
    }
    const uint32_t alt = alts[ds.probe_rr % alts.size()];
    ++ds.probe_rr;

    Packet probe;
    probe.id = next_packet_id_++;
    probe.kind = PacketKind::Probe;
    probe.flow_id = kProbeFlow;
    probe.domain = di;
    probe.route = segment_walk(*ds.dom, alt, original.dst);
    probe.src = node;
    probe.dst = original.dst;
    probe.created_us = now_;
    probe.payload = original.payload;
    embed_header(probe, static_cast<uint8_t>(alt), true,
                 static_cast<uint32_t>(ds.embed_seq++));
    ++trace_.summary.probes_sent;
    const NodeId next = probe.route[1];
    auto li = sc_.topology.find_link(node, next);
    if (!li) {
      ++trace_.summary.misroutes;
      count_drop(probe);
      return;
    }
    enqueue(*li, std::move(probe));
  }

  void enqueue(size_t link_idx, Packet&& p) {
    PortState& ps = ports_[link_idx];
    if (ps.queue.size() >= ps.base.queue_capacity) {
      count_drop(p);
      return;
    }
    p.enqueued_us = now_;
    ps.queue.push_back(std::move(p));
    if (ps.busy_until <= now_) {
      Event e;
      e.time = now_;
      e.kind = EventKind::PortService;
      e.index = static_cast<uint32_t>(link_idx);
      schedule(std::move(e));
    }
  }

  void on_port_service(uint32_t link_idx) {
    PortState& ps = ports_[link_idx];
    if (ps.busy_until > now_) return;  // spurious wakeup; still transmitting
    if (ps.queue.empty()) return;
    const size_t qlen_including = ps.queue.size();
    Packet p = std::move(ps.queue.front());
    ps.queue.pop_front();
    const uint64_t svc = interval_us(ps.capacity_pps);
    ps.busy_until = now_ + svc;
    Event completion;
    completion.time = ps.busy_until;
    completion.kind = EventKind::PortService;
    completion.index = link_idx;
    schedule(std::move(completion));

    on_dequeue(p, link_idx, qlen_including);

    const Link& l = sc_.topology.links()[link_idx];
    ++p.hop;
    Event arrival;
    arrival.time = ps.busy_until + static_cast<uint64_t>(std::llround(l.params.prop_delay_us));
    arrival.kind = EventKind::Arrival;
    arrival.node = l.to;
    arrival.has_packet = true;
    arrival.packet = std::move(p);
    schedule(std::move(arrival));
  }

  // Telemetry duties at the instant a packet leaves a switch's queue: every
  // switch past the decision node appends its record; the sink then strips
  // the stack and clones it toward the collector.
  void on_dequeue(Packet& p, size_t link_idx, size_t qlen_including) {
    if (!p.int_header.has_value() || !p.domain.has_value()) return;
    const Link& l = sc_.topology.links()[link_idx];
    const NodeId from = l.from;
    if (sc_.topology.node(from).role != NodeRole::Switch) return;
    DomainState& ds = domains_[*p.domain];
    if (from == ds.dom->decision_node) return;  // the source embeds, never appends

    const HopMeasurement m = measure_dequeue(qlen_including, p.enqueued_us, now_);
    if (!append_hop(*p.int_header, HopRecord{from, m.queue_length, m.dequeue_delay})) {
      ++trace_.summary.telemetry_overflows;
    } else if (opt_.keep_hop_log) {
      trace_.hop_log.push_back({p.id, from, m.queue_length, m.dequeue_delay, now_});
    }

    if (from == ds.dom->endpoint_node) {
      ExtractResult ex = extract_and_clone(p, ds.dom->id, now_);
      if (ex.had_header) send_report(std::move(ex.report), *p.domain, from);
    }
  }

  void send_report(TelemetryReport&& report, uint32_t di, NodeId sink) {
    DomainState& ds = domains_[di];
    Packet r;
    r.id = next_packet_id_++;
    r.kind = PacketKind::Report;
    r.flow_id = kReportFlow;
    r.domain = di;
    r.route = static_route(sink, ds.dom->collector_node);
    r.src = sink;
    r.dst = ds.dom->collector_node;
    r.created_us = now_;
    r.report = std::move(report);
    ++trace_.summary.reports_sent;
    handle_arrival(std::move(r), sink);
  }

  void deliver(Packet&& p, NodeId node) {
    switch (p.kind) {
      case PacketKind::Data:
        ++flows_[p.flow_id].delivered;
        ++trace_.summary.delivered_data;
        break;
      case PacketKind::Background:
        ++flows_[p.flow_id].delivered;
        ++trace_.summary.delivered_background;
        break;
      case PacketKind::Probe:
        ++trace_.summary.probes_delivered;
        break;
      case PacketKind::Report:
        ++trace_.summary.reports_delivered;
        process_report(*p.domain, *p.report);
        break;
      case PacketKind::Control:
        ++trace_.summary.control_delivered;
        apply_directive(node, *p.directive);
        break;
    }
  }

  void apply_directive(NodeId node, const ControlDirective& d) {
    auto it = domain_by_id_.find(d.domain_id);
    if (it == domain_by_id_.end()) return;
    DomainState& ds = domains_[it->second];
    if (ds.dom->decision_node != node) return;
    if (d.is_probe) return;  // probe scheduling stays local to the switch
    if (d.path_index >= ds.dom->segments.size()) return;
    if (ds.reg != d.path_index) {
      ds.reg = d.path_index;
      trace_.register_changes.push_back({now_, ds.reg, ds.data_embeds});
      ++trace_.summary.register_switches;
    }
  }

  void process_report(uint32_t di, const TelemetryReport& rep) {
    DomainState& ds = domains_[di];
    trace_.reports.push_back(rep);
    const SegmentMetrics m = aggregate(rep);
    if (rep.path_index < ds.last_q.size()) {
      ds.last_q[rep.path_index] = m.queue_total;
      ds.last_d[rep.path_index] = m.delay_total;
    }
    if (di == 0) {
      trace_.timeseries.push_back({now_, ds.last_q, ds.last_d, ds.reg});
    }
    if (!ds.agent.has_value()) return;

    SlaAgent& agent = *ds.agent;
    const auto dir = agent.on_report(rep);

    AgentRow row;
    row.time_us = now_;
    row.domain = di;
    row.phase = agent.state().phase;
    row.probs = agent.state().probs;
    row.ema = agent.state().ema;
    row.reported_path = rep.path_index;
    row.is_probe = rep.is_probe;
    row.queue_total = m.queue_total;
    row.delay_total = m.delay_total;
    row.directive_path = dir ? static_cast<int>(dir->path_index) : -1;
    trace_.agent_rows.push_back(std::move(row));

    const AgentPhase phase = agent.state().phase;
    const int learned =
        agent.state().learned_path ? static_cast<int>(*agent.state().learned_path) : -1;
    if (phase != ds.prev_phase || learned != ds.prev_learned) {
      trace_.phase_changes.push_back({now_, phase, learned, ds.data_embeds});
      if (di == 0 && ds.prev_phase == AgentPhase::Learning &&
          phase == AgentPhase::OptimizedSteering && !trace_.summary.converged) {
        trace_.summary.converged = true;
        trace_.summary.convergence_time_us = now_ - first_data_inject_.value_or(now_);
        trace_.summary.convergence_updates = agent.updates_applied();
      }
      ds.prev_phase = phase;
      ds.prev_learned = learned;
    }

    if (dir) {
      ++trace_.summary.control_sent;
      send_control(*dir, di);
    }
  }

  void send_control(const ControlDirective& d, uint32_t di) {
    DomainState& ds = domains_[di];
    Packet c;
    c.id = next_packet_id_++;
    c.kind = PacketKind::Control;
    c.flow_id = kControlFlow;
    c.domain = di;
    c.route = static_route(ds.dom->collector_node, ds.dom->decision_node);
    c.src = ds.dom->collector_node;
    c.dst = ds.dom->decision_node;
    c.created_us = now_;
    c.directive = d;
    const NodeId entry = c.route.front();
    handle_arrival(std::move(c), entry);
  }

  void count_drop(const Packet& p) {
    switch (p.kind) {
      case PacketKind::Data:
        ++flows_[p.flow_id].dropped;
        ++trace_.summary.dropped_data;
        break;
      case PacketKind::Background:
        ++flows_[p.flow_id].dropped;
        ++trace_.summary.dropped_background;
        break;
      case PacketKind::Probe: ++trace_.summary.probes_dropped; break;
      case PacketKind::Report: ++trace_.summary.report_drops; break;
      case PacketKind::Control: ++trace_.summary.control_drops; break;
    }
  }

  uint64_t total_data_embeds() const {
    uint64_t total = 0;
    for (const DomainState& ds : domains_) total += ds.data_embeds;
    return total;
  }

  void count_in_flight(const Packet& p) {
    switch (p.kind) {
      case PacketKind::Data:
      case PacketKind::Background:
        ++flows_[p.flow_id].in_flight;
        break;
      case PacketKind::Probe: ++trace_.summary.probes_in_flight; break;
      case PacketKind::Report: ++trace_.summary.reports_in_flight; break;
      case PacketKind::Control: ++trace_.summary.control_in_flight; break;
    }
  }

  void finalize() {
    for (const PortState& ps : ports_) {
      for (const Packet& p : ps.queue) count_in_flight(p);
    }
    for (const Event& e : heap_) {
      if (e.has_packet) count_in_flight(e.packet);
    }
    SimulationSummary& s = trace_.summary;
    s.seed = opt_.seed;
    s.backend = backend_;
    s.horizon_us = horizon_;
    s.goodput_pps = horizon_ > 0 ? static_cast<double>(s.delivered_data) /
                                       (static_cast<double>(horizon_) / 1e6)
                                 : 0.0;
    if (!domains_.empty()) {
      const DomainState& ds = domains_[0];
      s.data_embeds = ds.data_embeds;
      if (ds.agent.has_value()) {
        s.rejected_reports = ds.agent->rejected_reports();
        s.phase_transitions = ds.agent->phase_transitions();
        s.final_phase = ds.agent->state().phase;
        if (ds.agent->state().learned_path.has_value()) {
          s.final_learned_path = static_cast<int>(*ds.agent->state().learned_path);
        } else {
          const auto& probs = ds.agent->state().probs;
          s.final_learned_path = static_cast<int>(
              std::max_element(probs.begin(), probs.end()) - probs.begin());
        }
      } else {
        s.final_learned_path = static_cast<int>(ds.reg);
      }
    }
    for (const FlowState& f : flows_) {
      trace_.flow_stats.push_back(
          {f.spec->name, f.spec->background, f.injected, f.delivered, f.dropped, f.in_flight});
    }
  }

  static constexpr uint32_t kFlowStartBase = 0x40000000u;
  static constexpr uint32_t kFlowStopBase = 0x80000000u;

  const Scenario& sc_;
  RunOptions opt_;
  uint64_t horizon_ = 0;
  BackendKind backend_ = BackendKind::Exact;
  uint64_t now_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t next_packet_id_ = 0;
  std::optional<uint64_t> first_data_inject_;
  std::vector<Event> heap_;
  std::vector<PortState> ports_;
  std::vector<FlowState> flows_;
  std::vector<DomainState> domains_;
  std::map<NodeId, uint32_t> decision_of_;
  std::map<uint32_t, uint32_t> domain_by_id_;
  std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> route_cache_;
  SimulationTrace trace_;
};

}  // namespace

SimulationTrace run_simulation(const Scenario& scenario, const RunOptions& options) {
  Simulation sim(scenario, options);
  return sim.run();
}

}  // namespace slapath
