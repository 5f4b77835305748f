#include "ambr/packet.hpp"

#include <stdexcept>

namespace ambr {

PacketClass classify(PacketKind kind) {
  switch (kind) {
    case PacketKind::Hello:
    case PacketKind::HelloReply:
    case PacketKind::NewMonitor:
    case PacketKind::MonitorAliveRequest:
    case PacketKind::MonitorAliveReply:
    case PacketKind::RouteQuery:
    case PacketKind::RouteReply:
    case PacketKind::DestinationUnreachable:
    case PacketKind::Rreq:
    case PacketKind::Rrep:
    case PacketKind::Rerr:
    case PacketKind::TableUpdate:
      return PacketClass::Control;
    case PacketKind::Data:
      return PacketClass::Data;
  }
  throw std::logic_error("classify: unknown packet kind");
}

const char* kind_name(PacketKind kind) {
  switch (kind) {
    case PacketKind::Hello: return "hello";
    case PacketKind::HelloReply: return "hello-reply";
    case PacketKind::NewMonitor: return "new-monitor";
    case PacketKind::MonitorAliveRequest: return "alive-request";
    case PacketKind::MonitorAliveReply: return "alive-reply";
    case PacketKind::RouteQuery: return "route-query";
    case PacketKind::RouteReply: return "route-reply";
    case PacketKind::DestinationUnreachable: return "unreachable";
    case PacketKind::Rreq: return "rreq";
    case PacketKind::Rrep: return "rrep";
    case PacketKind::Rerr: return "rerr";
    case PacketKind::TableUpdate: return "table-update";
    case PacketKind::Data: return "data";
  }
  return "?";
}

int default_size_bytes(PacketKind kind) {
  switch (kind) {
    case PacketKind::RouteQuery:
    case PacketKind::RouteReply:
    case PacketKind::Rreq:
    case PacketKind::Rrep:
    case PacketKind::Rerr:
    case PacketKind::TableUpdate:
      return 64;
    case PacketKind::Data:
      return 512;
    default:
      return 32;
  }
}

}  // namespace ambr
