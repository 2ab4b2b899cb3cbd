#ifndef SLAPATH_PACKET_HPP
#define SLAPATH_PACKET_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "slapath/agent.hpp"
#include "slapath/telemetry.hpp"
#include "slapath/topology.hpp"

namespace slapath {

enum class PacketKind : uint8_t {
  Data,        // domain traffic, carries telemetry
  Probe,       // duplicated data packet on the alternate path
  Background,  // cross traffic, no telemetry
  Control,     // collector -> decision node directive
  Report,      // sink -> collector telemetry clone
};

inline const char* packet_kind_name(PacketKind k) {
  switch (k) {
    case PacketKind::Data: return "data";
    case PacketKind::Probe: return "probe";
    case PacketKind::Background: return "background";
    case PacketKind::Control: return "control";
    case PacketKind::Report: return "report";
  }
  return "?";
}

// The unit moved by the event loop. Routes are explicit node walks resolved
// at injection time; `hop` indexes the node the packet currently sits at.
struct Packet {
  uint64_t id = 0;
  PacketKind kind = PacketKind::Data;
  uint32_t flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<NodeId> route;
  size_t hop = 0;
  uint64_t created_us = 0;
  uint64_t enqueued_us = 0;  // enqueue instant at the current queue
  std::vector<uint8_t> payload;
  std::optional<uint32_t> domain;  // set when a domain's telemetry applies
  std::optional<IntHeader> int_header;
  std::optional<ControlDirective> directive;
  std::optional<TelemetryReport> report;
};

}  // namespace slapath

#endif  // SLAPATH_PACKET_HPP
