#ifndef SLAPATH_TOPOLOGY_HPP
#define SLAPATH_TOPOLOGY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slapath {

using NodeId = uint32_t;

enum class NodeRole : uint8_t { Host, Switch };

// Which side of the traffic a host sits on.
enum class HostSide : uint8_t { Source, Destination };

struct LinkParams {
  double capacity_pps = 10000.0;
  double prop_delay_us = 100.0;
  uint32_t queue_capacity = 64;
};

// Directed. A bidirectional cable is two links.
struct Link {
  NodeId from = 0;
  NodeId to = 0;
  LinkParams params;
};

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::Switch;
  std::string name;
};

class Topology {
 public:
  NodeId add_host(const std::string& name, HostSide side);
  NodeId add_switch(const std::string& name);
  size_t add_link(NodeId from, NodeId to, LinkParams params);
  // Two directed links with identical parameters.
  void add_cable(NodeId a, NodeId b, LinkParams params);

  size_t node_count() const { return nodes_.size(); }
  bool has_node(NodeId id) const { return id < nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<NodeId>& source_hosts() const { return source_hosts_; }
  const std::vector<NodeId>& dest_hosts() const { return dest_hosts_; }

  std::optional<NodeId> find_node(const std::string& name) const;
  std::optional<size_t> find_link(NodeId from, NodeId to) const;
  // Outgoing links of a node, in insertion order.
  std::vector<size_t> links_from(NodeId id) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<NodeId> source_hosts_;
  std::vector<NodeId> dest_hosts_;
  std::map<std::pair<NodeId, NodeId>, size_t> link_index_;
};

// Candidate forwarding walk of a domain. Indexes are 0-based and contiguous
// within the owning domain, and wire headers carry the index in one byte.
struct PathSegment {
  uint32_t index = 0;
  std::vector<NodeId> nodes;  // decision node first, endpoint last
};

struct Domain {
  uint32_t id = 0;
  NodeId decision_node = 0;
  NodeId endpoint_node = 0;
  NodeId collector_node = 0;
  std::vector<PathSegment> segments;
};

struct Violation {
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every structural invariant and reports all violations, not just the
// first. Violations are data; this never throws.
ValidationResult validate_topology(const Topology& t, const std::vector<Domain>& domains);

// Fewest-hops walk from a to b (BFS over directed links; equal-length ties
// resolve to the lowest node ids so routing is deterministic). Empty when b
// is unreachable. Used for every leg outside a domain's learned segments.
std::vector<NodeId> shortest_route(const Topology& t, NodeId a, NodeId b);

// The five-switch, two-host proof-of-concept network: segments s1->s2->s3 and
// s1->s4->s3, collector s5 hanging off the endpoint with a return cable to
// the decision switch for control traffic.
struct PocNetwork {
  Topology topology;
  std::vector<Domain> domains;
  NodeId source_host = 0;
  NodeId dest_host = 0;
};

PocNetwork build_poc_topology(LinkParams params = {});

}  // namespace slapath

#endif  // SLAPATH_TOPOLOGY_HPP
