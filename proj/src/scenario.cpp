#include "slapath/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace slapath {

using nlohmann::json;

const char* traffic_mode_name(TrafficMode m) {
  switch (m) {
    case TrafficMode::Cbr: return "cbr";
    case TrafficMode::OnOff: return "onoff";
    case TrafficMode::Responsive: return "responsive";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw ScenarioError(ctx + ": " + msg);
}

// Unknown keys are configuration typos waiting to bite; reject them.
void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(ctx, "unknown key \"" + it.key() + "\"");
  }
}

double get_double(const json& j, const std::string& ctx, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(ctx, std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

uint64_t get_u64(const json& j, const std::string& ctx, const char* key, uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned()) fail(ctx, std::string(key) + " must be a non-negative integer");
  return j.at(key).get<uint64_t>();
}

std::string get_string(const json& j, const std::string& ctx, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(ctx, std::string(key) + " must be a string");
  return j.at(key).get<std::string>();
}

bool get_bool(const json& j, const std::string& ctx, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(ctx, std::string(key) + " must be a boolean");
  return j.at(key).get<bool>();
}

LinkParams parse_link_params(const json& j, const std::string& ctx, LinkParams defaults) {
  LinkParams p = defaults;
  p.capacity_pps = get_double(j, ctx, "capacity_pps", p.capacity_pps);
  p.prop_delay_us = get_double(j, ctx, "prop_delay_us", p.prop_delay_us);
  p.queue_capacity = static_cast<uint32_t>(get_u64(j, ctx, "queue_capacity", p.queue_capacity));
  return p;
}

NodeId resolve_node(const Topology& t, const std::string& name, const std::string& ctx) {
  auto id = t.find_node(name);
  if (!id) fail(ctx, "unknown node \"" + name + "\"");
  return *id;
}

void parse_topology(const json& j, const std::string& ctx, LinkParams defaults, Scenario& s) {
  check_keys(j, ctx, {"hosts", "switches", "links"});
  if (!j.contains("hosts") || !j.contains("switches") || !j.contains("links")) {
    fail(ctx, "needs hosts, switches, and links");
  }
  for (const json& h : j.at("hosts")) {
    check_keys(h, ctx + ".hosts", {"name", "side"});
    const std::string name = get_string(h, ctx, "name", "");
    const std::string side = get_string(h, ctx, "side", "source");
    if (name.empty()) fail(ctx, "host without a name");
    if (side != "source" && side != "destination") {
      fail(ctx, "host side must be \"source\" or \"destination\"");
    }
    s.topology.add_host(name, side == "source" ? HostSide::Source : HostSide::Destination);
  }
  for (const json& sw : j.at("switches")) {
    if (!sw.is_string()) fail(ctx, "switches must be a list of names");
    s.topology.add_switch(sw.get<std::string>());
  }
  for (const json& l : j.at("links")) {
    const std::string lctx = ctx + ".links";
    check_keys(l, lctx, {"from", "to", "capacity_pps", "prop_delay_us", "queue_capacity", "cable"});
    const NodeId from = resolve_node(s.topology, get_string(l, lctx, "from", ""), lctx);
    const NodeId to = resolve_node(s.topology, get_string(l, lctx, "to", ""), lctx);
    const LinkParams p = parse_link_params(l, lctx, defaults);
    if (get_bool(l, lctx, "cable", false)) {
      s.topology.add_cable(from, to, p);
    } else {
      s.topology.add_link(from, to, p);
    }
  }
}

void parse_domains(const json& j, const std::string& ctx, Scenario& s) {
  for (const json& d : j) {
    check_keys(d, ctx, {"id", "decision", "endpoint", "collector", "segments"});
    Domain dom;
    dom.id = static_cast<uint32_t>(get_u64(d, ctx, "id", s.domains.size()));
    dom.decision_node = resolve_node(s.topology, get_string(d, ctx, "decision", ""), ctx);
    dom.endpoint_node = resolve_node(s.topology, get_string(d, ctx, "endpoint", ""), ctx);
    dom.collector_node = resolve_node(s.topology, get_string(d, ctx, "collector", ""), ctx);
    if (!d.contains("segments")) fail(ctx, "domain without segments");
    uint32_t idx = 0;
    for (const json& seg : d.at("segments")) {
      PathSegment ps;
      ps.index = idx++;
      for (const json& n : seg) {
        if (!n.is_string()) fail(ctx, "segment entries must be node names");
        ps.nodes.push_back(resolve_node(s.topology, n.get<std::string>(), ctx));
      }
      dom.segments.push_back(std::move(ps));
    }
    s.domains.push_back(std::move(dom));
  }
}

void parse_reward(const json& j, const std::string& ctx, RewardParams& r) {
  check_keys(j, ctx, {"beta1", "beta2", "tau_queue", "tau_delay", "c_queue", "c_delay"});
  r.beta1 = get_double(j, ctx, "beta1", r.beta1);
  r.beta2 = get_double(j, ctx, "beta2", r.beta2);
  r.tau_queue = get_double(j, ctx, "tau_queue", r.tau_queue);
  r.tau_delay = get_double(j, ctx, "tau_delay", r.tau_delay);
  r.c_queue = get_double(j, ctx, "c_queue", r.c_queue);
  r.c_delay = get_double(j, ctx, "c_delay", r.c_delay);
}

void parse_agent(const json& j, const std::string& ctx, Scenario& s) {
  check_keys(j, ctx,
             {"enabled", "pinned_path", "alpha", "p_conv", "probe_interval", "ema_gamma",
              "theta_low", "delta_improve", "window", "backend", "sigmoid_buckets", "reward"});
  s.agent_enabled = get_bool(j, ctx, "enabled", true);
  s.pinned_path = static_cast<uint32_t>(get_u64(j, ctx, "pinned_path", 0));
  AgentConfig& a = s.agent;
  a.alpha = get_double(j, ctx, "alpha", a.alpha);
  a.p_conv = get_double(j, ctx, "p_conv", a.p_conv);
  a.probe_interval = static_cast<uint32_t>(get_u64(j, ctx, "probe_interval", a.probe_interval));
  a.ema_gamma = get_double(j, ctx, "ema_gamma", a.ema_gamma);
  a.theta_low = get_double(j, ctx, "theta_low", a.theta_low);
  a.delta_improve = get_double(j, ctx, "delta_improve", a.delta_improve);
  a.window = static_cast<uint32_t>(get_u64(j, ctx, "window", a.window));
  a.sigmoid_buckets = static_cast<int>(get_u64(j, ctx, "sigmoid_buckets", a.sigmoid_buckets));
  const std::string backend = get_string(j, ctx, "backend", backend_name(a.backend));
  if (!parse_backend(backend, a.backend)) fail(ctx, "backend must be \"exact\" or \"constrained\"");
  if (j.contains("reward")) parse_reward(j.at("reward"), ctx + ".reward", a.reward);
}

void parse_flow(const json& j, const std::string& ctx, Scenario& s) {
  check_keys(j, ctx,
             {"name", "mode", "background", "domain", "src", "dst", "on_segment", "rate_pps",
              "start_us", "stop_us", "mean_on_us", "mean_off_us", "min_rate_pps", "add_step_pps",
              "batch"});
  FlowSpec f;
  f.name = get_string(j, ctx, "name", "");
  const std::string mode = get_string(j, ctx, "mode", "cbr");
  if (mode == "cbr") {
    f.mode = TrafficMode::Cbr;
  } else if (mode == "onoff") {
    f.mode = TrafficMode::OnOff;
  } else if (mode == "responsive") {
    f.mode = TrafficMode::Responsive;
  } else {
    fail(ctx, "unknown traffic mode \"" + mode + "\"");
  }
  f.background = get_bool(j, ctx, "background", false);
  f.domain = static_cast<uint32_t>(get_u64(j, ctx, "domain", 0));
  f.src = get_string(j, ctx, "src", "");
  f.dst = get_string(j, ctx, "dst", "");
  if (j.contains("on_segment")) {
    f.on_segment = static_cast<uint32_t>(get_u64(j, ctx, "on_segment", 0));
  }
  f.rate_pps = get_double(j, ctx, "rate_pps", f.rate_pps);
  f.start_us = get_u64(j, ctx, "start_us", 0);
  if (j.contains("stop_us")) f.stop_us = get_u64(j, ctx, "stop_us", 0);
  f.mean_on_us = get_double(j, ctx, "mean_on_us", f.mean_on_us);
  f.mean_off_us = get_double(j, ctx, "mean_off_us", f.mean_off_us);
  f.min_rate_pps = get_double(j, ctx, "min_rate_pps", f.min_rate_pps);
  f.add_step_pps = get_double(j, ctx, "add_step_pps", f.add_step_pps);
  f.batch = static_cast<uint32_t>(get_u64(j, ctx, "batch", f.batch));
  s.flows.push_back(std::move(f));
}

void parse_event(const json& j, const std::string& ctx, Scenario& s) {
  check_keys(j, ctx, {"time_us", "kind", "from", "to", "multiplier", "flow"});
  ScenarioEventSpec ev;
  ev.time_us = get_u64(j, ctx, "time_us", 0);
  const std::string kind = get_string(j, ctx, "kind", "");
  if (kind == "link_capacity") {
    ev.kind = ScenarioEventSpec::Kind::LinkCapacity;
    ev.link_from = get_string(j, ctx, "from", "");
    ev.link_to = get_string(j, ctx, "to", "");
    ev.multiplier = get_double(j, ctx, "multiplier", 1.0);
  } else if (kind == "flow_start" || kind == "flow_stop") {
    ev.kind = kind == "flow_start" ? ScenarioEventSpec::Kind::FlowStart
                                   : ScenarioEventSpec::Kind::FlowStop;
    ev.flow = get_string(j, ctx, "flow", "");
  } else {
    fail(ctx, "unknown event kind \"" + kind + "\"");
  }
  s.events.push_back(std::move(ev));
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ScenarioError(origin + ": top level must be an object");
  check_keys(j, origin,
             {"name", "topology", "link_defaults", "domains", "agent", "flows", "events",
              "horizon_us"});

  Scenario s;
  s.name = get_string(j, origin, "name", "scenario");
  LinkParams defaults;
  if (j.contains("link_defaults")) {
    check_keys(j.at("link_defaults"), origin + ".link_defaults",
               {"capacity_pps", "prop_delay_us", "queue_capacity"});
    defaults = parse_link_params(j.at("link_defaults"), origin + ".link_defaults", defaults);
  }

  if (!j.contains("topology")) fail(origin, "missing topology");
  const json& topo = j.at("topology");
  if (topo.is_string()) {
    if (topo.get<std::string>() != "poc") fail(origin, "the only builtin topology is \"poc\"");
    if (j.contains("domains")) fail(origin, "builtin topology defines its own domains");
    PocNetwork net = build_poc_topology(defaults);
    s.topology = std::move(net.topology);
    s.domains = std::move(net.domains);
  } else {
    parse_topology(topo, origin + ".topology", defaults, s);
    if (!j.contains("domains")) fail(origin, "explicit topology needs domains");
    parse_domains(j.at("domains"), origin + ".domains", s);
  }

  if (j.contains("agent")) parse_agent(j.at("agent"), origin + ".agent", s);
  if (j.contains("flows")) {
    size_t i = 0;
    for (const json& f : j.at("flows")) {
      parse_flow(f, origin + ".flows[" + std::to_string(i++) + "]", s);
    }
  }
  if (j.contains("events")) {
    size_t i = 0;
    for (const json& e : j.at("events")) {
      parse_event(e, origin + ".events[" + std::to_string(i++) + "]", s);
    }
  }
  s.horizon_us = get_u64(j, origin, "horizon_us", s.horizon_us);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  ValidationResult topo = validate_topology(s.topology, s.domains);
  for (const Violation& v : topo.violations) out.push_back(v.message);

  if (s.horizon_us == 0) out.push_back("horizon must be positive");
  if (s.domains.empty()) out.push_back("at least one domain is required");

  for (const Domain& d : s.domains) {
    if (d.segments.size() < 2) continue;  // already reported by the topology validator
    try {
      s.agent.validate(d.segments.size());
    } catch (const std::invalid_argument& e) {
      out.push_back("agent config for domain " + std::to_string(d.id) + ": " + e.what());
      break;
    }
    if (!s.agent_enabled && s.pinned_path >= d.segments.size()) {
      out.push_back("pinned_path " + std::to_string(s.pinned_path) + " out of range for domain " +
                    std::to_string(d.id));
    }
    if (shortest_route(s.topology, d.endpoint_node, d.collector_node).empty()) {
      out.push_back("domain " + std::to_string(d.id) + ": collector unreachable from endpoint");
    }
    if (shortest_route(s.topology, d.collector_node, d.decision_node).empty()) {
      out.push_back("domain " + std::to_string(d.id) +
                    ": decision node unreachable from collector (control packets need a route)");
    }
  }

  std::set<std::string> names;
  for (const FlowSpec& f : s.flows) {
    const std::string ctx = "flow \"" + f.name + "\"";
    if (f.name.empty()) out.push_back("flow without a name");
    if (!names.insert(f.name).second) out.push_back("duplicate flow name \"" + f.name + "\"");
    if (!(f.rate_pps > 0.0)) out.push_back(ctx + ": rate must be positive");
    if (f.stop_us && *f.stop_us <= f.start_us) out.push_back(ctx + ": stop_us must exceed start_us");
    if (f.mode == TrafficMode::OnOff && (!(f.mean_on_us > 0.0) || !(f.mean_off_us > 0.0))) {
      out.push_back(ctx + ": on/off means must be positive");
    }
    if (f.mode == TrafficMode::Responsive) {
      if (!(f.min_rate_pps > 0.0)) out.push_back(ctx + ": min_rate_pps must be positive");
      if (!(f.add_step_pps >= 0.0)) out.push_back(ctx + ": add_step_pps must be non-negative");
      if (f.batch < 1) out.push_back(ctx + ": batch must be >= 1");
    }
    if (f.domain >= s.domains.size()) {
      out.push_back(ctx + ": domain " + std::to_string(f.domain) + " does not exist");
      continue;
    }
    const Domain& dom = s.domains[f.domain];
    if (f.background && f.on_segment.has_value()) {
      if (*f.on_segment >= dom.segments.size()) {
        out.push_back(ctx + ": on_segment " + std::to_string(*f.on_segment) + " out of range");
      }
      continue;
    }
    auto src = s.topology.find_node(f.src);
    auto dst = s.topology.find_node(f.dst);
    if (!src || !dst) {
      out.push_back(ctx + ": src/dst must name existing nodes");
      continue;
    }
    if (*src == *dst) out.push_back(ctx + ": src and dst must differ");
    if (!f.background) {
      if (s.topology.node(*src).role != NodeRole::Host ||
          s.topology.node(*dst).role != NodeRole::Host) {
        out.push_back(ctx + ": data flows run host to host");
        continue;
      }
      if (shortest_route(s.topology, *src, dom.decision_node).empty()) {
        out.push_back(ctx + ": no route from src to the decision node");
      }
      if (shortest_route(s.topology, dom.endpoint_node, *dst).empty()) {
        out.push_back(ctx + ": no route from the endpoint node to dst");
      }
    } else if (shortest_route(s.topology, *src, *dst).empty()) {
      out.push_back(ctx + ": no route from src to dst");
    }
  }

  for (const ScenarioEventSpec& ev : s.events) {
    if (ev.kind == ScenarioEventSpec::Kind::LinkCapacity) {
      if (!(ev.multiplier > 0.0)) out.push_back("capacity multiplier must be positive");
      auto from = s.topology.find_node(ev.link_from);
      auto to = s.topology.find_node(ev.link_to);
      if (!from || !to || !s.topology.find_link(*from, *to)) {
        out.push_back("capacity event names unknown link " + ev.link_from + "->" + ev.link_to);
      }
    } else {
      bool found = false;
      for (const FlowSpec& f : s.flows) found = found || f.name == ev.flow;
      if (!found) out.push_back("event references unknown flow \"" + ev.flow + "\"");
    }
  }
  return out;
}

}  // namespace slapath
