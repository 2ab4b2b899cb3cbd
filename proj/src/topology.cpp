#include "slapath/topology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace slapath {

NodeId Topology::add_host(const std::string& name, HostSide side) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, NodeRole::Host, name});
  (side == HostSide::Source ? source_hosts_ : dest_hosts_).push_back(id);
  return id;
}

NodeId Topology::add_switch(const std::string& name) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, NodeRole::Switch, name});
  return id;
}

size_t Topology::add_link(NodeId from, NodeId to, LinkParams params) {
  size_t idx = links_.size();
  links_.push_back(Link{from, to, params});
  link_index_.emplace(std::make_pair(from, to), idx);
  return idx;
}

void Topology::add_cable(NodeId a, NodeId b, LinkParams params) {
  add_link(a, b, params);
  add_link(b, a, params);
}

std::optional<NodeId> Topology::find_node(const std::string& name) const {
  for (const Node& n : nodes_) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

std::optional<size_t> Topology::find_link(NodeId from, NodeId to) const {
  auto it = link_index_.find({from, to});
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<size_t> Topology::links_from(NodeId id) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].from == id) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> shortest_route(const Topology& t, NodeId a, NodeId b) {
  if (!t.has_node(a) || !t.has_node(b)) return {};
  const size_t n = t.node_count();
  std::vector<std::vector<NodeId>> adj(n);
  for (const Link& l : t.links()) adj[l.from].push_back(l.to);
  for (auto& v : adj) std::sort(v.begin(), v.end());

  std::vector<int64_t> pred(n, -1);
  std::vector<uint8_t> seen(n, 0);
  std::vector<NodeId> frontier{a};
  seen[a] = 1;
  while (!frontier.empty() && !seen[b]) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          pred[v] = u;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  if (!seen[b]) return {};
  std::vector<NodeId> route;
  for (NodeId cur = b;; cur = static_cast<NodeId>(pred[cur])) {
    route.push_back(cur);
    if (cur == a) break;
  }
  std::reverse(route.begin(), route.end());
  return route;
}

namespace {

void check_node(const Topology& t, NodeId id, const std::string& what,
                std::vector<Violation>& out, bool must_be_switch = false) {
  if (!t.has_node(id)) {
    out.push_back({what + ": node " + std::to_string(id) + " does not exist"});
    return;
  }
  if (must_be_switch && t.node(id).role != NodeRole::Switch) {
    out.push_back({what + ": node " + t.node(id).name + " is not a switch"});
  }
}

}  // namespace

ValidationResult validate_topology(const Topology& t, const std::vector<Domain>& domains) {
  ValidationResult r;
  auto add = [&r](std::string msg) { r.violations.push_back({std::move(msg)}); };

  std::set<std::string> names;
  for (const Node& n : t.nodes()) {
    if (!names.insert(n.name).second) add("duplicate node name: " + n.name);
  }

  std::set<std::pair<NodeId, NodeId>> seen_links;
  for (const Link& l : t.links()) {
    if (!t.has_node(l.from) || !t.has_node(l.to)) {
      add("link endpoints " + std::to_string(l.from) + "->" + std::to_string(l.to) +
          " reference missing nodes");
      continue;
    }
    std::string tag = t.node(l.from).name + "->" + t.node(l.to).name;
    if (l.from == l.to) add("self-link at " + t.node(l.from).name);
    if (!seen_links.insert({l.from, l.to}).second) add("duplicate link " + tag);
    if (!(l.params.capacity_pps > 0.0)) add("link " + tag + ": capacity must be positive");
    if (l.params.queue_capacity < 1) add("link " + tag + ": queue capacity must be >= 1");
    if (!(l.params.prop_delay_us >= 0.0)) add("link " + tag + ": negative propagation delay");
  }

  std::set<uint32_t> domain_ids;
  for (const Domain& d : domains) {
    std::string dom = "domain " + std::to_string(d.id);
    if (!domain_ids.insert(d.id).second) add("duplicate domain id " + std::to_string(d.id));

    check_node(t, d.decision_node, dom + " decision node", r.violations, true);
    check_node(t, d.endpoint_node, dom + " endpoint node", r.violations, true);
    check_node(t, d.collector_node, dom + " collector node", r.violations, true);
    if (!t.has_node(d.decision_node) || !t.has_node(d.endpoint_node) ||
        !t.has_node(d.collector_node)) {
      continue;
    }

    if (d.decision_node == d.endpoint_node) add(dom + ": decision and endpoint coincide");
    if (d.segments.size() < 2) add(dom + ": fewer than two segments leaves nothing to choose");
    if (d.segments.size() > 256) add(dom + ": more than 256 segments, index will not fit a byte");

    if (t.has_node(d.endpoint_node) && t.has_node(d.collector_node) &&
        !t.find_link(d.endpoint_node, d.collector_node)) {
      add(dom + ": collector is not adjacent to the endpoint node");
    }

    for (size_t i = 0; i < d.segments.size(); ++i) {
      const PathSegment& seg = d.segments[i];
      std::string sid = dom + " segment " + std::to_string(i);
      if (seg.index != i) add(sid + ": index " + std::to_string(seg.index) + " is not contiguous");
      if (seg.nodes.size() < 2) {
        add(sid + ": needs at least two nodes");
        continue;
      }
      if (seg.nodes.front() != d.decision_node) add(sid + ": does not start at the decision node");
      if (seg.nodes.back() != d.endpoint_node) add(sid + ": segment endpoint mismatch");
      for (size_t j = 0; j + 1 < seg.nodes.size(); ++j) {
        NodeId a = seg.nodes[j];
        NodeId b = seg.nodes[j + 1];
        if (!t.has_node(a) || !t.has_node(b)) {
          add(sid + ": references a missing node");
          break;
        }
        if (!t.find_link(a, b)) {
          add(sid + ": no link " + t.node(a).name + "->" + t.node(b).name);
        }
      }
      for (size_t j = 1; j + 1 < seg.nodes.size(); ++j) {
        if (t.has_node(seg.nodes[j]) && t.node(seg.nodes[j]).role != NodeRole::Switch) {
          add(sid + ": interior node " + t.node(seg.nodes[j]).name + " is not a switch");
        }
      }
    }
  }
  return r;
}

PocNetwork build_poc_topology(LinkParams params) {
  PocNetwork net;
  Topology& t = net.topology;
  net.source_host = t.add_host("hs", HostSide::Source);
  net.dest_host = t.add_host("hd", HostSide::Destination);
  NodeId s1 = t.add_switch("s1");
  NodeId s2 = t.add_switch("s2");
  NodeId s3 = t.add_switch("s3");
  NodeId s4 = t.add_switch("s4");
  NodeId s5 = t.add_switch("s5");

  t.add_cable(net.source_host, s1, params);
  t.add_cable(s1, s2, params);
  t.add_cable(s2, s3, params);
  t.add_cable(s1, s4, params);
  t.add_cable(s4, s3, params);
  t.add_cable(s3, net.dest_host, params);
  t.add_cable(s3, s5, params);
  // Control return path: collector reaches the decision switch directly.
  t.add_cable(s5, s1, params);

  Domain d;
  d.id = 0;
  d.decision_node = s1;
  d.endpoint_node = s3;
  d.collector_node = s5;
  d.segments.push_back(PathSegment{0, {s1, s2, s3}});
  d.segments.push_back(PathSegment{1, {s1, s4, s3}});
  net.domains.push_back(std::move(d));
  return net;
}

}  // namespace slapath
