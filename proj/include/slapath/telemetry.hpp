#ifndef SLAPATH_TELEMETRY_HPP
#define SLAPATH_TELEMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace slapath {

struct Packet;

// One hop's contribution: occupancy and waiting time sampled at the dequeue
// of the carrying packet.
struct HopRecord {
  uint32_t switch_id = 0;
  uint32_t queue_length = 0;   // packets, including the departing one
  uint32_t dequeue_delay = 0;  // microseconds

  friend bool operator==(const HopRecord&, const HopRecord&) = default;
};

// Telemetry stack carried by a packet between the decision node and the
// sink. hop_count is derived from the record stack, so the wire invariant
// hop_count == records.size() holds by construction.
struct IntHeader {
  static constexpr size_t kMaxHops = 8;
  static constexpr size_t kBaseBytes = 8;
  static constexpr size_t kRecordBytes = 12;

  uint8_t path_index = 0;
  bool is_probe = false;
  uint32_t packet_seq = 0;
  std::vector<HopRecord> records;  // most recent last

  uint8_t hop_count() const { return static_cast<uint8_t>(records.size()); }

  friend bool operator==(const IntHeader&, const IntHeader&) = default;
};

// Appends a record unless the stack is full. Returns false on overflow; the
// header is left unchanged and the caller counts the loss (forwarding is
// never harmed by telemetry overflow).
bool append_hop(IntHeader& h, HopRecord rec);

// The sink-side clone: everything the collector needs, without the packet.
struct TelemetryReport {
  uint32_t domain_id = 0;
  uint8_t path_index = 0;
  bool is_probe = false;
  uint32_t packet_seq = 0;
  std::vector<HopRecord> records;
  uint64_t sink_timestamp_us = 0;

  friend bool operator==(const TelemetryReport&, const TelemetryReport&) = default;
};

struct SegmentMetrics {
  uint64_t queue_total = 0;  // packets
  uint64_t delay_total = 0;  // microseconds
};

enum class AggregateMode : uint8_t { Sum, Max };

// Collapses per-hop records into the segment-level congestion pair. Sum is
// the default (delay is literally additive end-to-end); Max is the
// configurable alternative.
SegmentMetrics aggregate(const TelemetryReport& report, AggregateMode mode = AggregateMode::Sum);

// Wire format, big-endian: hop_count, path_index, flags (bit 0 = probe),
// reserved zero byte, 4-byte packet_seq, then hop_count 12-byte records
// (switch_id, queue_length, dequeue_delay). serialize rejects headers deeper
// than kMaxHops.
std::vector<uint8_t> serialize_header(const IntHeader& h);

struct ParseResult {
  bool ok = false;
  std::string error;
  IntHeader header;
  size_t consumed = 0;  // bytes read on success
};

// Rejects truncated buffers, hop_count > 8, unknown flag bits, and a nonzero
// reserved byte. Trailing bytes beyond the header are the payload and are
// not an error.
ParseResult parse_header(const uint8_t* data, size_t size);
ParseResult parse_header(const std::vector<uint8_t>& bytes);

// Decision-node embedding. Throws std::logic_error if the packet already
// carries a header.
void embed_header(Packet& p, uint8_t path_index, bool is_probe, uint32_t seq);

struct ExtractResult {
  bool had_header = false;
  TelemetryReport report;
};

// Sink-side strip: removes the header from the packet (restoring the
// pre-embedding payload untouched) and returns the cloned report. Packets
// without a header pass through unchanged with had_header = false.
ExtractResult extract_and_clone(Packet& p, uint32_t domain_id, uint64_t sink_timestamp_us);

// One CSV row: domain_id, path_index, is_probe, seq, sink_timestamp, Q, D.
std::string report_csv_line(const TelemetryReport& report,
                            AggregateMode mode = AggregateMode::Sum);

}  // namespace slapath

#endif  // SLAPATH_TELEMETRY_HPP
