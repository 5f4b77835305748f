#include "ambr/flood_protocol.hpp"

#include <algorithm>

namespace ambr {

namespace {
constexpr double kRebroadcastJitterMax = 0.010;  // synchronized-broadcast guard
constexpr int kMaxDiscoveryAttempts = 2;
constexpr std::size_t kMaxQueuedPerDst = 50;
constexpr int kHopGuard = 64;

std::uint64_t rreq_key(int origin, std::uint64_t id) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(origin)) << 32) | (id & 0xffffffffu);
}
}  // namespace

FloodReactiveProtocol::FloodReactiveProtocol(SimContext ctx, bool local_repair)
    : Protocol(std::move(ctx)), nodes_(ctx_.cfg.n), local_repair_(local_repair) {}

const FloodReactiveProtocol::Route* FloodReactiveProtocol::live_route(int node, int dst) const {
  auto it = nodes_[node].routes.find(dst);
  if (it == nodes_[node].routes.end()) return nullptr;
  if (it->second.expires < ctx_.kernel.now()) return nullptr;
  return &it->second;
}

void FloodReactiveProtocol::drop_undelivered(const Packet& pkt, int node) {
  ++undelivered_;
  trace(node, pkt.kind, "drop");
}

void FloodReactiveProtocol::send_data(int source, int destination) {
  Packet p;
  p.kind = PacketKind::Data;
  p.src = source;
  p.dst = destination;
  p.size_bytes = ctx_.cfg.data_size;
  DataPayload d;
  d.packet_id = next_packet_id_++;
  d.created = ctx_.kernel.now();
  p.payload = d;
  if (source == destination) {
    ctx_.metrics.record_delivered(0, 0.0);
    return;
  }
  forward_data(source, std::move(p));
}

void FloodReactiveProtocol::forward_data(int node, Packet pkt) {
  auto& d = std::get<DataPayload>(pkt.payload);
  if (pkt.dst == node) {
    if (nodes_[node].delivered_ids.insert(d.packet_id).second)
      ctx_.metrics.record_delivered(d.hops_taken, ctx_.kernel.now() - d.created);
    return;
  }
  if (d.hops_taken >= kHopGuard) {
    drop_undelivered(pkt, node);
    return;
  }
  const Route* r = live_route(node, pkt.dst);
  if (!r) {
    if (node == pkt.src) {
      start_discovery(node, pkt.dst, std::move(pkt), false);
    } else {
      handle_break(node, -1, std::move(pkt));
    }
    return;
  }
  int next = r->next_hop;
  ++d.hops_taken;
  trace(node, PacketKind::Data, "send");
  Packet copy = pkt;
  --d.hops_taken;
  ctx_.radio.unicast(node, next, std::move(copy),
                     [this, node, next, pkt = std::move(pkt)](bool ok) mutable {
                       if (!ok) handle_break(node, next, std::move(pkt));
                     });
}

void FloodReactiveProtocol::start_discovery(int node, int dst, Packet held, bool repair) {
  NodeState& ns = nodes_[node];
  auto it = ns.discovering.find(dst);
  if (it != ns.discovering.end()) {
    if (it->second.held.size() >= kMaxQueuedPerDst) {
      drop_undelivered(it->second.held.front(), node);
      it->second.held.erase(it->second.held.begin());
    }
    it->second.held.push_back(std::move(held));
    return;
  }
  Discovery& disc = ns.discovering[dst];
  disc.held.push_back(std::move(held));
  disc.attempts = 1;
  disc.repair = repair;
  RreqPayload rq;
  rq.origin = node;
  rq.rreq_id = next_rreq_id_++;
  rq.destination = dst;
  rq.hops = 0;
  rq.ttl = repair ? ctx_.cfg.repair_ttl : ctx_.cfg.rreq_ttl;
  rq.repair = repair;
  ns.seen_rreq.insert(rreq_key(node, rq.rreq_id));
  Packet p;
  p.kind = PacketKind::Rreq;
  p.src = node;
  p.dst = dst;
  p.size_bytes = default_size_bytes(PacketKind::Rreq);
  p.payload = rq;
  trace(node, PacketKind::Rreq, "send");
  ctx_.radio.broadcast(node, std::move(p));
  disc.timer = ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.cfg.rreq_timeout,
                                    [this, node, dst] { discovery_timeout(node, dst); });
}

void FloodReactiveProtocol::discovery_timeout(int node, int dst) {
  NodeState& ns = nodes_[node];
  auto it = ns.discovering.find(dst);
  if (it == ns.discovering.end()) return;
  Discovery& disc = it->second;
  if (disc.attempts < kMaxDiscoveryAttempts && !disc.repair) {
    ++disc.attempts;
    RreqPayload rq;
    rq.origin = node;
    rq.rreq_id = next_rreq_id_++;
    rq.destination = dst;
    rq.hops = 0;
    rq.ttl = ctx_.cfg.rreq_ttl;
    ns.seen_rreq.insert(rreq_key(node, rq.rreq_id));
    Packet p;
    p.kind = PacketKind::Rreq;
    p.src = node;
    p.dst = dst;
    p.size_bytes = default_size_bytes(PacketKind::Rreq);
    p.payload = rq;
    trace(node, PacketKind::Rreq, "send");
    ctx_.radio.broadcast(node, std::move(p));
    disc.timer = ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.cfg.rreq_timeout,
                                      [this, node, dst] { discovery_timeout(node, dst); });
    return;
  }
  // Failure: repair floods fall back to RERR, source discoveries drop.
  auto held = std::move(disc.held);
  bool was_repair = disc.repair;
  ns.discovering.erase(it);
  for (auto& pkt : held) {
    if (was_repair)
      send_rerr(node, std::move(pkt));
    else
      drop_undelivered(pkt, node);
  }
}

void FloodReactiveProtocol::handle_break(int holder, int next_hop, Packet pkt) {
  NodeState& ns = nodes_[holder];
  if (next_hop >= 0) {
    for (auto it = ns.routes.begin(); it != ns.routes.end();) {
      if (it->second.next_hop == next_hop)
        it = ns.routes.erase(it);
      else
        ++it;
    }
  }
  if (holder == pkt.src) {
    start_discovery(holder, pkt.dst, std::move(pkt), false);
    return;
  }
  if (local_repair_) {
    trace(holder, PacketKind::Rreq, "repair");
    start_discovery(holder, pkt.dst, std::move(pkt), true);
    return;
  }
  send_rerr(holder, std::move(pkt));
}

void FloodReactiveProtocol::send_rerr(int holder, Packet pkt) {
  const auto& d = std::get<DataPayload>(pkt.payload);
  const Route* back = live_route(holder, pkt.src);
  if (!back) {
    drop_undelivered(pkt, holder);
    return;
  }
  RerrPayload e;
  e.source = pkt.src;
  e.destination = pkt.dst;
  e.packet_id = d.packet_id;
  e.created = d.created;
  Packet p;
  p.kind = PacketKind::Rerr;
  p.src = holder;
  p.dst = pkt.src;
  p.size_bytes = default_size_bytes(PacketKind::Rerr);
  p.payload = e;
  trace(holder, PacketKind::Rerr, "send");
  ctx_.radio.unicast(holder, back->next_hop, std::move(p));
  // The held copy is abandoned; the source retransmits after re-discovery.
}

void FloodReactiveProtocol::on_packet(int node, const Packet& p) {
  NodeState& ns = nodes_[node];
  switch (p.kind) {
    case PacketKind::Rreq: {
      const auto& rq = std::get<RreqPayload>(p.payload);
      if (!ns.seen_rreq.insert(rreq_key(rq.origin, rq.rreq_id)).second) return;
      Time now = ctx_.kernel.now();
      // Reverse route toward the originator, plus the 1-hop route to prev.
      ns.routes[p.from] = {p.from, 1, now + ctx_.cfg.route_timeout};
      if (rq.origin != p.from)
        ns.routes[rq.origin] = {p.from, rq.hops + 1, now + ctx_.cfg.route_timeout};
      if (rq.destination == node) {
        RrepPayload rep;
        rep.origin = rq.origin;
        rep.destination = node;
        rep.hops_from_dst = 0;
        Packet reply;
        reply.kind = PacketKind::Rrep;
        reply.src = node;
        reply.dst = rq.origin;
        reply.size_bytes = default_size_bytes(PacketKind::Rrep);
        reply.payload = rep;
        trace(node, PacketKind::Rrep, "send");
        ctx_.radio.unicast(node, p.from, std::move(reply));
        return;
      }
      if (rq.ttl <= 1) return;
      RreqPayload fwd = rq;
      ++fwd.hops;
      --fwd.ttl;
      Packet rebroadcast;
      rebroadcast.kind = PacketKind::Rreq;
      rebroadcast.src = p.src;
      rebroadcast.dst = p.dst;
      rebroadcast.size_bytes = p.size_bytes;
      rebroadcast.payload = fwd;
      double jitter = ctx_.proto_rng.uniform(0.0, kRebroadcastJitterMax);
      ctx_.kernel.schedule(ctx_.kernel.now() + jitter,
                           [this, node, rebroadcast = std::move(rebroadcast)]() mutable {
                             trace(node, PacketKind::Rreq, "send");
                             ctx_.radio.broadcast(node, std::move(rebroadcast));
                           });
      return;
    }
    case PacketKind::Rrep: {
      const auto& rep = std::get<RrepPayload>(p.payload);
      Time now = ctx_.kernel.now();
      ns.routes[rep.destination] = {p.from, rep.hops_from_dst + 1, now + ctx_.cfg.route_timeout};
      ns.routes[p.from] = {p.from, 1, now + ctx_.cfg.route_timeout};
      if (rep.origin == node) {
        auto it = ns.discovering.find(rep.destination);
        if (it == ns.discovering.end()) return;
        ctx_.kernel.cancel(it->second.timer);
        auto held = std::move(it->second.held);
        ns.discovering.erase(it);
        for (auto& pkt : held) forward_data(node, std::move(pkt));
        return;
      }
      const Route* back = live_route(node, rep.origin);
      if (!back) return;
      RrepPayload fwd = rep;
      ++fwd.hops_from_dst;
      Packet reply;
      reply.kind = PacketKind::Rrep;
      reply.src = p.src;
      reply.dst = p.dst;
      reply.size_bytes = p.size_bytes;
      reply.payload = fwd;
      trace(node, PacketKind::Rrep, "send");
      ctx_.radio.unicast(node, back->next_hop, std::move(reply));
      return;
    }
    case PacketKind::Rerr: {
      const auto& e = std::get<RerrPayload>(p.payload);
      if (e.source == node) {
        ns.routes.erase(e.destination);
        Packet retry;
        retry.kind = PacketKind::Data;
        retry.src = node;
        retry.dst = e.destination;
        retry.size_bytes = ctx_.cfg.data_size;
        DataPayload d;
        d.packet_id = e.packet_id;
        d.created = e.created;
        retry.payload = d;
        forward_data(node, std::move(retry));
        return;
      }
      const Route* back = live_route(node, e.source);
      if (!back) return;
      Packet fwd = p;
      fwd.src = p.src;
      trace(node, PacketKind::Rerr, "send");
      ctx_.radio.unicast(node, back->next_hop, std::move(fwd));
      return;
    }
    case PacketKind::Data:
      forward_data(node, p);
      return;
    default:
      return;
  }
}

// ---------------------------------------------------------------------------

ProactiveProtocol::ProactiveProtocol(SimContext ctx)
    : Protocol(std::move(ctx)), nodes_(ctx_.cfg.n) {}

void ProactiveProtocol::start() {
  // Ticks are round-synchronized: every broadcast of round k fires at
  // k * update_period and is merged at +airtime, before round k+1. Fresh
  // sequence numbers then advance exactly one hop per round, so hop counts
  // settle to shortest paths instead of oscillating when a newer seqno races
  // through a longer path.
  for (int i = 0; i < ctx_.cfg.n; ++i)
    ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.cfg.update_period, [this, i] { update_tick(i); });
}

void ProactiveProtocol::broadcast_table(int node) {
  NodeState& ns = nodes_[node];
  TableUpdatePayload t;
  t.entries.push_back({node, 0, ns.own_seqno});
  for (const auto& [dst, e] : ns.table) t.entries.push_back({dst, e.hops, e.seqno});
  Packet p;
  p.kind = PacketKind::TableUpdate;
  p.src = node;
  p.dst = -1;
  p.size_bytes = 64 + 4 * static_cast<int>(t.entries.size());
  p.payload = std::move(t);
  trace(node, PacketKind::TableUpdate, "send");
  ctx_.radio.broadcast(node, std::move(p));
  ++ns.broadcasts;
  ns.last_broadcast = ctx_.kernel.now();
}

// Damped triggered update: at most one pending at a time, and skipped when a
// broadcast already went out in the last half period.
void ProactiveProtocol::schedule_trigger(int node) {
  NodeState& ns = nodes_[node];
  if (ns.trigger_pending) return;
  ns.trigger_pending = true;
  double u = ctx_.cfg.update_period;
  double delay = 0.5 * u + ctx_.proto_rng.uniform(0.0, 0.25 * u);
  ctx_.kernel.schedule(ctx_.kernel.now() + delay, [this, node] {
    NodeState& s = nodes_[node];
    s.trigger_pending = false;
    if (ctx_.kernel.now() - s.last_broadcast < 0.5 * ctx_.cfg.update_period) return;
    broadcast_table(node);
  });
}

void ProactiveProtocol::update_tick(int node) {
  NodeState& ns = nodes_[node];
  Time now = ctx_.kernel.now();
  for (auto it = ns.table.begin(); it != ns.table.end();) {
    if (now - it->second.updated > ctx_.cfg.entry_timeout)
      it = ns.table.erase(it);
    else
      ++it;
  }
  ns.own_seqno += 2;
  broadcast_table(node);
  ctx_.kernel.schedule(now + ctx_.cfg.update_period, [this, node] { update_tick(node); });
}

void ProactiveProtocol::on_packet(int node, const Packet& p) {
  NodeState& ns = nodes_[node];
  if (p.kind == PacketKind::TableUpdate) {
    Time now = ctx_.kernel.now();
    const auto& t = std::get<TableUpdatePayload>(p.payload);
    bool topology_changed = false;
    for (const auto& e : t.entries) {
      if (e.destination == node) continue;
      int hops = e.hops + 1;
      auto it = ns.table.find(e.destination);
      bool adopt = it == ns.table.end() || e.seqno > it->second.seqno ||
                   (e.seqno == it->second.seqno && hops < it->second.hops);
      if (adopt) {
        // A plain seqno refresh along the same path is not a change worth
        // advertising; new destinations and metric changes are.
        if (it == ns.table.end() || it->second.hops != hops) topology_changed = true;
        ns.table[e.destination] = {p.from, hops, e.seqno, now};
      } else if (it != ns.table.end() && it->second.next_hop == p.from &&
                 e.seqno >= it->second.seqno) {
        it->second.updated = now;
      }
    }
    if (topology_changed) schedule_trigger(node);
    // A fresh route may unblock queued packets.
    for (auto it = ns.pending.begin(); it != ns.pending.end();) {
      if (ns.table.count(it->first)) {
        auto batch = std::move(it->second);
        it = ns.pending.erase(it);
        for (auto& q : batch) forward_data(node, std::move(q.packet));
      } else {
        ++it;
      }
    }
    return;
  }
  if (p.kind == PacketKind::Data) forward_data(node, p);
}

void ProactiveProtocol::send_data(int source, int destination) {
  Packet p;
  p.kind = PacketKind::Data;
  p.src = source;
  p.dst = destination;
  p.size_bytes = ctx_.cfg.data_size;
  DataPayload d;
  d.packet_id = next_packet_id_++;
  d.created = ctx_.kernel.now();
  p.payload = d;
  if (source == destination) {
    ctx_.metrics.record_delivered(0, 0.0);
    return;
  }
  forward_data(source, std::move(p));
}

void ProactiveProtocol::forward_data(int node, Packet pkt) {
  NodeState& ns = nodes_[node];
  auto& d = std::get<DataPayload>(pkt.payload);
  if (pkt.dst == node) {
    if (ns.delivered_ids.insert(d.packet_id).second)
      ctx_.metrics.record_delivered(d.hops_taken, ctx_.kernel.now() - d.created);
    return;
  }
  if (d.hops_taken >= 64) {  // transient DV loop guard
    drop_undelivered(pkt, node);
    return;
  }
  auto it = ns.table.find(pkt.dst);
  if (it == ns.table.end()) {
    if (node == pkt.src) {
      std::uint64_t id = d.packet_id;
      int dst = pkt.dst;
      ns.pending[dst].push_back({std::move(pkt), ctx_.kernel.now()});
      ctx_.kernel.schedule(ctx_.kernel.now() + 2.0 * ctx_.cfg.update_period,
                           [this, node, id, dst] {
                             NodeState& s = nodes_[node];
                             auto pit = s.pending.find(dst);
                             if (pit == s.pending.end()) return;
                             auto& vec = pit->second;
                             for (auto i = vec.begin(); i != vec.end(); ++i) {
                               if (std::get<DataPayload>(i->packet.payload).packet_id == id) {
                                 drop_undelivered(i->packet, node);
                                 vec.erase(i);
                                 break;
                               }
                             }
                             if (vec.empty()) s.pending.erase(pit);
                           });
    } else {
      drop_undelivered(pkt, node);
    }
    return;
  }
  int next = it->second.next_hop;
  ++d.hops_taken;
  trace(node, PacketKind::Data, "send");
  Packet copy = pkt;
  --d.hops_taken;
  ctx_.radio.unicast(node, next, std::move(copy),
                     [this, node, next, pkt = std::move(pkt)](bool ok) mutable {
                       if (!ok) {
                         nodes_[node].table.erase(pkt.dst);
                         schedule_trigger(node);
                         drop_undelivered(pkt, node);
                       }
                     });
}

void ProactiveProtocol::drop_undelivered(const Packet& pkt, int node) {
  ++undelivered_;
  trace(node, pkt.kind, "drop");
}

std::map<int, int> ProactiveProtocol::table_hops(int node) const {
  std::map<int, int> out;
  for (const auto& [dst, e] : nodes_[node].table) out[dst] = e.hops;
  return out;
}

}  // namespace ambr
