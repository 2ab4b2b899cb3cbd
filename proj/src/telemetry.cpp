#include "slapath/telemetry.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "slapath/packet.hpp"

namespace slapath {

bool append_hop(IntHeader& h, HopRecord rec) {
  if (h.records.size() >= IntHeader::kMaxHops) return false;
  h.records.push_back(rec);
  return true;
}

SegmentMetrics aggregate(const TelemetryReport& report, AggregateMode mode) {
  if (report.records.empty()) throw std::invalid_argument("report has no records");
  SegmentMetrics m;
  for (const HopRecord& r : report.records) {
    if (mode == AggregateMode::Sum) {
      m.queue_total += r.queue_length;
      m.delay_total += r.dequeue_delay;
    } else {
      m.queue_total = std::max<uint64_t>(m.queue_total, r.queue_length);
      m.delay_total = std::max<uint64_t>(m.delay_total, r.dequeue_delay);
    }
  }
  return m;
}

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t get_u32(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

}  // namespace

std::vector<uint8_t> serialize_header(const IntHeader& h) {
  if (h.records.size() > IntHeader::kMaxHops) {
    throw std::invalid_argument("header exceeds the hop stack limit");
  }
  std::vector<uint8_t> out;
  out.reserve(IntHeader::kBaseBytes + IntHeader::kRecordBytes * h.records.size());
  out.push_back(h.hop_count());
  out.push_back(h.path_index);
  out.push_back(h.is_probe ? 0x01 : 0x00);
  out.push_back(0x00);  // reserved
  put_u32(out, h.packet_seq);
  for (const HopRecord& r : h.records) {
    put_u32(out, r.switch_id);
    put_u32(out, r.queue_length);
    put_u32(out, r.dequeue_delay);
  }
  return out;
}

ParseResult parse_header(const uint8_t* data, size_t size) {
  ParseResult r;
  if (size < IntHeader::kBaseBytes) {
    r.error = "header truncated";
    return r;
  }
  const uint8_t hop_count = data[0];
  if (hop_count > IntHeader::kMaxHops) {
    r.error = "hop_count exceeds the stack limit";
    return r;
  }
  if (data[2] & ~0x01u) {
    r.error = "unknown flag bits";
    return r;
  }
  if (data[3] != 0) {
    r.error = "nonzero reserved byte";
    return r;
  }
  const size_t need = IntHeader::kBaseBytes + IntHeader::kRecordBytes * hop_count;
  if (size < need) {
    r.error = "record stack truncated";
    return r;
  }
  r.header.path_index = data[1];
  r.header.is_probe = (data[2] & 0x01u) != 0;
  r.header.packet_seq = get_u32(data + 4);
  r.header.records.resize(hop_count);
  for (size_t i = 0; i < hop_count; ++i) {
    const uint8_t* p = data + IntHeader::kBaseBytes + i * IntHeader::kRecordBytes;
    r.header.records[i] = HopRecord{get_u32(p), get_u32(p + 4), get_u32(p + 8)};
  }
  r.consumed = need;
  r.ok = true;
  return r;
}

ParseResult parse_header(const std::vector<uint8_t>& bytes) {
  return parse_header(bytes.data(), bytes.size());
}

void embed_header(Packet& p, uint8_t path_index, bool is_probe, uint32_t seq) {
  if (p.int_header.has_value()) throw std::logic_error("packet already carries a header");
  IntHeader h;
  h.path_index = path_index;
  h.is_probe = is_probe;
  h.packet_seq = seq;
  p.int_header = std::move(h);
}

ExtractResult extract_and_clone(Packet& p, uint32_t domain_id, uint64_t sink_timestamp_us) {
  ExtractResult out;
  if (!p.int_header.has_value()) return out;
  const IntHeader& h = *p.int_header;
  out.had_header = true;
  out.report.domain_id = domain_id;
  out.report.path_index = h.path_index;
  out.report.is_probe = h.is_probe;
  out.report.packet_seq = h.packet_seq;
  out.report.records = h.records;
  out.report.sink_timestamp_us = sink_timestamp_us;
  p.int_header.reset();
  return out;
}

std::string report_csv_line(const TelemetryReport& report, AggregateMode mode) {
  const SegmentMetrics m = aggregate(report, mode);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%u,%u,%d,%u,%llu,%llu,%llu", report.domain_id,
                static_cast<unsigned>(report.path_index), report.is_probe ? 1 : 0,
                report.packet_seq, static_cast<unsigned long long>(report.sink_timestamp_us),
                static_cast<unsigned long long>(m.queue_total),
                static_cast<unsigned long long>(m.delay_total));
  return buf;
}

}  // namespace slapath
