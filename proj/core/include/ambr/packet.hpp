#ifndef AMBR_PACKET_HPP
#define AMBR_PACKET_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ambr/event_queue.hpp"

namespace ambr {

enum class PacketKind {
  // Monitor-based protocol
  Hello,
  HelloReply,
  NewMonitor,
  MonitorAliveRequest,
  MonitorAliveReply,
  RouteQuery,
  RouteReply,
  DestinationUnreachable,
  // Flood-reactive baseline
  Rreq,
  Rrep,
  Rerr,
  // Proactive baseline
  TableUpdate,
  // Payload traffic (all protocols)
  Data,
};

enum class PacketClass { Control, Data };

// Classification is a fixed table, not caller discretion.
PacketClass classify(PacketKind kind);
const char* kind_name(PacketKind kind);

struct NewMonitorPayload {
  Time elected_at = 0.0;  // earlier election wins when two monitors meet
};

// Monitor route query, also used for local repair.
struct QueryPayload {
  std::uint64_t query_id = 0;
  int origin_monitor = -1;
  int source = -1;       // flow source the answer is for
  int destination = -1;
  int depth = 0;         // monitor hops from the origin
  bool repair = false;
  std::vector<int> visited;     // monitors already holding this query
  std::vector<int> relay_path;  // node-level path origin .. current, incl. gateways
  int relay_target = -1;        // final monitor of the current (possibly 2-hop) leg
};

struct ReplyPayload {
  std::uint64_t query_id = 0;
  int origin_monitor = -1;
  int destination = -1;
  std::vector<int> path;   // node-level path origin_monitor .. destination
  std::size_t hop = 0;     // index into the reverse walk
};

struct UnreachablePayload {
  std::uint64_t query_id = 0;
  int source = -1;
  int destination = -1;
  std::vector<int> reverse_path;  // toward the origin monitor
  std::size_t hop = 0;
};

struct DataPayload {
  std::uint64_t packet_id = 0;
  Time created = 0.0;
  int hops_taken = 0;
  bool needs_routing = false;  // handed to a monitor for resolution
  bool repair = false;         // re-handed after a downstream break
  std::vector<int> path;       // source route when known; empty for table-driven
  std::size_t hop = 0;         // position of the current holder in path
};

struct RreqPayload {
  int origin = -1;
  std::uint64_t rreq_id = 0;
  int destination = -1;
  int hops = 0;
  int ttl = 0;
  bool repair = false;
};

struct RrepPayload {
  int origin = -1;       // discovery initiator the reply travels to
  int destination = -1;  // discovered destination
  int hops_from_dst = 0;
};

struct RerrPayload {
  int source = -1;       // flow source being informed
  int destination = -1;  // unreachable destination
  std::uint64_t packet_id = 0;
  Time created = 0.0;    // original data packet timestamp, for the retry copy
};

struct TableEntryWire {
  int destination;
  int hops;
  std::uint64_t seqno;
};

struct TableUpdatePayload {
  std::vector<TableEntryWire> entries;
};

using Payload = std::variant<std::monostate, NewMonitorPayload, QueryPayload, ReplyPayload,
                             UnreachablePayload, DataPayload, RreqPayload, RrepPayload,
                             RerrPayload, TableUpdatePayload>;

struct Packet {
  PacketKind kind = PacketKind::Data;
  int src = -1;   // original source of this packet
  int dst = -1;   // final destination (or -1 for broadcasts)
  int from = -1;  // previous hop; filled by the radio on delivery
  int size_bytes = 32;
  Payload payload;
};

int default_size_bytes(PacketKind kind);

}  // namespace ambr

#endif
