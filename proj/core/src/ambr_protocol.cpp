#include "ambr/ambr_protocol.hpp"

#include <algorithm>
#include <cassert>

namespace ambr {

namespace {
constexpr double kHelloDedupWindow = 0.5;
constexpr double kElectionJitter = 0.1;
constexpr int kKeepaliveMissLimit = 3;
constexpr double kDiscoveryBackoff = 20.0;  // after a failed route discovery
constexpr double kServeCacheAge = 5.0;      // max age of a path served to others
constexpr double kRepairHoldoff = 10.0;     // min spacing of repairs per destination

bool path_contains_link(const std::vector<int>& path, int a, int b) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if ((path[i] == a && path[i + 1] == b) || (path[i] == b && path[i + 1] == a)) return true;
  }
  return false;
}
}  // namespace

AmbrProtocol::AmbrProtocol(SimContext ctx)
    : Protocol(std::move(ctx)),
      nodes_(ctx_.cfg.n),
      unreachable_rx_(ctx_.cfg.n, 0) {}

Packet AmbrProtocol::make_packet(PacketKind kind, int src, int dst) const {
  Packet p;
  p.kind = kind;
  p.src = src;
  p.dst = dst;
  p.size_bytes = kind == PacketKind::Data ? ctx_.cfg.data_size : default_size_bytes(kind);
  return p;
}

void AmbrProtocol::send_control(int sender, int target, Packet p,
                                std::function<void(bool)> on_result) {
  trace(sender, p.kind, "send");
  ctx_.radio.unicast(sender, target, std::move(p), std::move(on_result));
}

std::vector<int> AmbrProtocol::current_monitors() const {
  std::vector<int> out;
  for (int i = 0; i < ctx_.cfg.n; ++i)
    if (nodes_[i].role == Role::Monitor) out.push_back(i);
  return out;
}

bool AmbrProtocol::has_cached_route(int node, int dst) const {
  return fresh_cache(nodes_[node], dst);
}

std::vector<int> AmbrProtocol::cached_route(int node, int dst) const {
  auto it = nodes_[node].cache.find(dst);
  return it == nodes_[node].cache.end() ? std::vector<int>{} : it->second.path;
}

bool AmbrProtocol::fresh_cache(const NodeState& ns, int dst) const {
  auto it = ns.cache.find(dst);
  return it != ns.cache.end() && it->second.alive &&
         ctx_.kernel.now() - it->second.learned_at <= ctx_.cfg.cache_ttl;
}

// ---------------------------------------------------------------------------
// startup, hello sessions, election

void AmbrProtocol::start() {
  for (int i = 0; i < ctx_.cfg.n; ++i) {
    double up_jitter = ctx_.proto_rng.uniform(0.0, 0.1);
    ctx_.kernel.schedule(ctx_.kernel.now() + up_jitter, [this, i] { start_hello_session(i); });
    double first_tick = ctx_.cfg.alive_period * ctx_.proto_rng.uniform(0.5, 1.5);
    ctx_.kernel.schedule(ctx_.kernel.now() + first_tick, [this, i] { maintenance_tick(i); });
  }
}

void AmbrProtocol::start_hello_session(int node) {
  NodeState& ns = nodes_[node];
  ns.rearm_pending = false;
  if (ns.hello_active) return;
  if (ns.role == Role::Ordinary && ns.monitor) return;
  ns.hello_active = true;
  ns.hello_tries = 0;
  hello_tick(node);
}

void AmbrProtocol::hello_tick(int node) {
  NodeState& ns = nodes_[node];
  if (!ns.hello_active) return;
  if (ns.role == Role::Ordinary && ns.monitor) {  // affiliated meanwhile
    stop_hello_session(node);
    return;
  }
  if (ns.role == Role::Monitor &&
      static_cast<int>(ns.neighbors.size()) >= ctx_.cfg.monitor_threshold) {
    stop_hello_session(node);  // connectivity rebuilt
    return;
  }
  Packet hello = make_packet(PacketKind::Hello, node, -1);
  trace(node, PacketKind::Hello, "send");
  ctx_.radio.broadcast(node, std::move(hello));
  ++ns.hello_tries;
  if (ns.hello_tries < ctx_.cfg.hello_max_tries) {
    ns.hello_timer = ctx_.kernel.schedule(ctx_.kernel.now() + jittered(ctx_.cfg.hello_retry),
                                          [this, node] { hello_tick(node); });
    return;
  }
  // Session exhausted.
  ns.hello_active = false;
  if (ns.role == Role::Monitor) {
    // Demote only when the membership collapsed entirely.
    if (ns.neighbors.empty()) {
      trace(node, PacketKind::NewMonitor, "demote");
      ns.role = Role::Ordinary;
      ns.monitor.reset();
      ns.members.clear();
      rearm_hello(node);
    }
    return;
  }
  if (!ns.monitor) rearm_hello(node);
}

void AmbrProtocol::rearm_hello(int node) {
  NodeState& ns = nodes_[node];
  if (ns.rearm_pending) return;
  ns.rearm_pending = true;
  ctx_.kernel.schedule(ctx_.kernel.now() + jittered(ctx_.cfg.hello_backoff), [this, node] {
    NodeState& s = nodes_[node];
    s.rearm_pending = false;
    if (s.role == Role::Ordinary && !s.monitor) start_hello_session(node);
  });
}

void AmbrProtocol::stop_hello_session(int node) {
  NodeState& ns = nodes_[node];
  if (!ns.hello_active) return;
  ns.hello_active = false;
  ctx_.kernel.cancel(ns.hello_timer);
}

void AmbrProtocol::note_neighbor(int node, int other) {
  if (other < 0 || other == node) return;
  nodes_[node].neighbors[other] = ctx_.kernel.now();
}

void AmbrProtocol::maybe_elect(int node) {
  NodeState& ns = nodes_[node];
  if (ns.role != Role::Ordinary || ns.monitor || ns.election_pending) return;
  if (static_cast<int>(ns.neighbors.size()) < ctx_.cfg.monitor_threshold) return;
  ns.election_pending = true;
  ns.election_timer =
      ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.proto_rng.uniform(0.0, kElectionJitter),
                           [this, node] {
                             NodeState& s = nodes_[node];
                             s.election_pending = false;
                             if (s.role != Role::Ordinary || s.monitor) return;
                             if (static_cast<int>(s.neighbors.size()) <
                                 ctx_.cfg.monitor_threshold)
                               return;
                             become_monitor(node);
                           });
}

void AmbrProtocol::become_monitor(int node) {
  NodeState& ns = nodes_[node];
  ctx_.checker.check(static_cast<int>(ns.neighbors.size()) >= ctx_.cfg.monitor_threshold,
                     "election below threshold");
  ns.role = Role::Monitor;
  ns.monitor.reset();
  ns.elected_at = ctx_.kernel.now();
  ns.members = ns.neighbors;
  stop_hello_session(node);
  trace(node, PacketKind::NewMonitor, "elect");
  Packet p = make_packet(PacketKind::NewMonitor, node, -1);
  p.payload = NewMonitorPayload{ns.elected_at};
  ctx_.radio.broadcast(node, std::move(p));
  // Flush anything queued while unaffiliated.
  auto pending = std::move(ns.pending);
  ns.pending.clear();
  for (auto& pd : pending) route_data(node, std::move(pd.packet));
}

void AmbrProtocol::abdicate(int node, int to_monitor) {
  NodeState& ns = nodes_[node];
  trace(node, PacketKind::NewMonitor, "demote");
  ns.role = Role::Ordinary;
  ns.members.clear();
  ns.elected_at = -1.0;
  affiliate(node, to_monitor);
}

void AmbrProtocol::affiliate(int node, int monitor) {
  NodeState& ns = nodes_[node];
  ns.monitor = monitor;
  ns.last_monitor_exchange = ctx_.kernel.now();
  ns.keepalive_misses = 0;
  stop_hello_session(node);
  if (ns.election_pending) {
    ctx_.kernel.cancel(ns.election_timer);
    ns.election_pending = false;
  }
  auto pending = std::move(ns.pending);
  ns.pending.clear();
  for (auto& pd : pending) route_data(node, std::move(pd.packet));
}

void AmbrProtocol::deaffiliate(int node) {
  NodeState& ns = nodes_[node];
  ns.monitor.reset();
  ns.keepalive_misses = 0;
  start_hello_session(node);
}

// ---------------------------------------------------------------------------
// periodic maintenance: neighbor expiry, keepalive, monitor pruning

void AmbrProtocol::maintenance_tick(int node) {
  NodeState& ns = nodes_[node];
  Time now = ctx_.kernel.now();

  double expiry = ns.role == Role::Monitor ? ctx_.cfg.member_timeout : ctx_.cfg.neighbor_timeout;
  for (auto it = ns.neighbors.begin(); it != ns.neighbors.end();) {
    if (now - it->second > expiry) {
      ns.members.erase(it->first);
      it = ns.neighbors.erase(it);
    } else {
      ++it;
    }
  }

  if (ns.role == Role::Monitor) {
    if (static_cast<int>(ns.neighbors.size()) < ctx_.cfg.monitor_threshold && !ns.hello_active)
      start_hello_session(node);
  } else if (ns.monitor) {
    if (!ns.neighbors.count(*ns.monitor)) {
      deaffiliate(node);
    } else if (!ns.hello_active && now - ns.last_monitor_exchange >= ctx_.cfg.piggyback_window) {
      int m = *ns.monitor;
      send_control(node, m, make_packet(PacketKind::MonitorAliveRequest, node, m));
      ++ns.keepalive_misses;
      if (ns.keepalive_misses >= kKeepaliveMissLimit) deaffiliate(node);
    }
  } else if (!ns.hello_active && !ns.rearm_pending) {
    start_hello_session(node);
  }

  // Role exclusivity: ordinary+unaffiliated nodes must be in or awaiting a
  // hello session; monitors must not be affiliated.
  if (ns.role == Role::Monitor)
    ctx_.checker.check(!ns.monitor, "monitor holds an affiliation");
  else if (!ns.monitor)
    ctx_.checker.check(ns.hello_active || ns.rearm_pending || ns.election_pending,
                       "unaffiliated node idle without hello session");

  ctx_.kernel.schedule(now + ctx_.cfg.alive_period, [this, node] { maintenance_tick(node); });
}

// ---------------------------------------------------------------------------
// data path

void AmbrProtocol::send_data(int source, int destination) {
  Packet p = make_packet(PacketKind::Data, source, destination);
  DataPayload d;
  d.packet_id = next_packet_id_++;
  d.created = ctx_.kernel.now();
  p.payload = d;
  route_data(source, std::move(p));
}

void AmbrProtocol::deliver_local(int node, const Packet& pkt) {
  const auto& d = std::get<DataPayload>(pkt.payload);
  trace(node, PacketKind::Data, "recv");
  ctx_.metrics.record_delivered(d.hops_taken, ctx_.kernel.now() - d.created);
}

void AmbrProtocol::drop_undelivered(const Packet& pkt, int at_node) {
  ++undelivered_;
  trace(at_node, pkt.kind, "drop");
}

void AmbrProtocol::route_data(int node, Packet pkt) {
  NodeState& ns = nodes_[node];
  auto& d = std::get<DataPayload>(pkt.payload);
  int dst = pkt.dst;
  if (dst == node) {
    deliver_local(node, pkt);
    return;
  }
  if (ns.neighbors.count(dst)) {
    d.path = {node, dst};
    d.hop = 0;
    d.needs_routing = false;
    forward_on_path(node, std::move(pkt));
    return;
  }
  if (fresh_cache(ns, dst)) {
    d.path = ns.cache[dst].path;
    d.hop = 0;
    d.needs_routing = false;
    if (d.path.empty() || d.path.front() != node) {
      // Cached path must start at this node; rebuild defensively.
      ns.cache.erase(dst);
    } else {
      forward_on_path(node, std::move(pkt));
      return;
    }
  }
  if (ns.role == Role::Monitor) {
    monitor_route(node, std::move(pkt));
    return;
  }
  if (ns.monitor) {
    hand_to_monitor(node, std::move(pkt), d.repair);
    return;
  }
  // No affiliation yet: queue until one appears or the queue timeout fires.
  std::uint64_t id = d.packet_id;
  ns.pending.push_back({std::move(pkt), ctx_.kernel.now()});
  ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.cfg.queue_timeout, [this, node, id] {
    NodeState& s = nodes_[node];
    for (auto it = s.pending.begin(); it != s.pending.end(); ++it) {
      if (std::get<DataPayload>(it->packet.payload).packet_id == id) {
        drop_undelivered(it->packet, node);
        s.pending.erase(it);
        return;
      }
    }
  });
}

void AmbrProtocol::hand_to_monitor(int node, Packet pkt, bool repair) {
  NodeState& ns = nodes_[node];
  int m = *ns.monitor;
  auto& d = std::get<DataPayload>(pkt.payload);
  d.needs_routing = true;
  d.repair = repair;
  d.path.clear();
  d.hop = 0;
  ++d.hops_taken;
  trace(node, PacketKind::Data, "send");
  Packet copy = pkt;
  ctx_.radio.unicast(node, m, std::move(copy), [this, node, m, pkt = std::move(pkt)](bool ok) {
    NodeState& s = nodes_[node];
    if (ok) {
      if (s.monitor && *s.monitor == m) {
        s.last_monitor_exchange = ctx_.kernel.now();  // piggybacked liveness
        s.keepalive_misses = 0;
      }
      return;
    }
    if (s.monitor && *s.monitor == m) deaffiliate(node);
    drop_undelivered(pkt, node);
  });
}

void AmbrProtocol::monitor_route(int monitor, Packet pkt) {
  NodeState& ns = nodes_[monitor];
  auto& d = std::get<DataPayload>(pkt.payload);
  int dst = pkt.dst;
  d.needs_routing = false;
  if (ns.neighbors.count(dst)) {
    d.path = {monitor, dst};
    d.hop = 0;
    forward_on_path(monitor, std::move(pkt));
    return;
  }
  if (fresh_cache(ns, dst) && !ns.cache[dst].path.empty() && ns.cache[dst].path.front() == monitor) {
    d.path = ns.cache[dst].path;
    d.hop = 0;
    forward_on_path(monitor, std::move(pkt));
    return;
  }
  route_finder(monitor, pkt.src, dst, d.repair, std::move(pkt));
}

void AmbrProtocol::forward_on_path(int node, Packet pkt) {
  auto& d = std::get<DataPayload>(pkt.payload);
  if (d.hop + 1 >= d.path.size() || d.path[d.hop] != node) {
    drop_undelivered(pkt, node);
    return;
  }
  int next = d.path[d.hop + 1];
  ++d.hop;
  ++d.hops_taken;
  trace(node, PacketKind::Data, "send");
  Packet copy = pkt;
  --d.hop;  // keep the holder's view in the retained packet
  --d.hops_taken;
  std::get<DataPayload>(copy.payload).needs_routing = false;
  ctx_.radio.unicast(node, next, std::move(copy),
                     [this, node, next, pkt = std::move(pkt)](bool ok) mutable {
                       if (!ok) on_route_break(node, next, std::move(pkt));
                     });
}

void AmbrProtocol::on_route_break(int holder, int next_hop, Packet pkt) {
  invalidate_link(holder, holder, next_hop);
  NodeState& ns = nodes_[holder];
  auto& d = std::get<DataPayload>(pkt.payload);
  if (d.repair) {  // one repair per packet, as in AODV local repair
    drop_undelivered(pkt, holder);
    return;
  }
  trace(holder, PacketKind::Data, "repair");
  d.repair = true;
  d.path.clear();
  d.hop = 0;
  if (ns.role == Role::Monitor) {
    route_finder(holder, pkt.src, pkt.dst, true, std::move(pkt));
  } else if (ns.monitor) {
    hand_to_monitor(holder, std::move(pkt), true);
  } else {
    drop_undelivered(pkt, holder);
  }
}

void AmbrProtocol::invalidate_link(int node, int a, int b) {
  for (auto& [dst, entry] : nodes_[node].cache) {
    if (entry.alive && path_contains_link(entry.path, a, b)) entry.alive = false;
  }
}

// ---------------------------------------------------------------------------
// route finder

std::optional<int> AmbrProtocol::gateway_between(int m1, int m2) const {
  Time now = ctx_.kernel.now();
  double best = -1.0;
  std::optional<int> gw;
  for (int g = 0; g < ctx_.cfg.n; ++g) {
    if (g == m1 || g == m2) continue;
    if (!ctx_.radio.in_range(m1, g, now) || !ctx_.radio.in_range(g, m2, now)) continue;
    Vec2 pg = ctx_.mobility.position_at(g, now);
    double span = std::max(dist(ctx_.mobility.position_at(m1, now), pg),
                           dist(pg, ctx_.mobility.position_at(m2, now)));
    if (!gw || span < best) {
      best = span;
      gw = g;
    }
  }
  return gw;
}

std::vector<AmbrProtocol::MonitorAdj> AmbrProtocol::neighbor_monitors(int monitor) const {
  std::vector<MonitorAdj> out;
  Time now = ctx_.kernel.now();
  for (int u : current_monitors()) {
    if (u == monitor) continue;
    if (ctx_.radio.in_range(monitor, u, now)) {
      out.push_back({u, std::nullopt});
    } else if (auto gw = gateway_between(monitor, u)) {
      out.push_back({u, gw});
    }
  }
  return out;
}

void AmbrProtocol::route_finder(int origin, int source, int destination, bool repair,
                                Packet held) {
  NodeState& ns = nodes_[origin];
  const auto& d = std::get<DataPayload>(held.payload);
  // Local repair runs at the packet holder's monitor, never at a plain member
  // (the source's own monitor counts: it may repair for a downstream holder).
  if (repair)
    ctx_.checker.check(ns.role == Role::Monitor, "repair query raised by a non-monitor");
  (void)d;

  if (ctx_.cfg.dl_max == 0) {
    if (origin != source)
      send_control(origin, source, make_packet(PacketKind::DestinationUnreachable, origin, source));
    drop_undelivered(held, origin);
    return;
  }

  // Coalesce onto an already-open discovery for the same destination: the
  // packet waits for that answer instead of spawning a parallel query storm.
  for (auto& [id, open] : ns.open_queries) {
    if (!open.answered && open.destination == destination) {
      open.held.push_back(std::move(held));
      return;
    }
  }
  // Back off after a failed discovery; CBR sources would otherwise re-flood
  // the monitor overlay every query_timeout.
  auto failed = ns.recent_failure.find(destination);
  if (failed != ns.recent_failure.end() &&
      ctx_.kernel.now() - failed->second < kDiscoveryBackoff) {
    drop_undelivered(held, origin);
    return;
  }
  if (repair) {
    // Throttle repairs per destination: a second break this soon after a
    // repair means the answers are stale, so treat it as a failed discovery.
    auto last = ns.recent_repair.find(destination);
    if (last != ns.recent_repair.end() &&
        ctx_.kernel.now() - last->second < kRepairHoldoff) {
      ns.recent_failure[destination] = ctx_.kernel.now();
      drop_undelivered(held, origin);
      return;
    }
    ns.recent_repair[destination] = ctx_.kernel.now();
  }

  std::uint64_t qid = next_query_id_++;
  QueryOrigin& oq = ns.open_queries[qid];
  oq.source = source;
  oq.destination = destination;
  oq.repair = repair;
  oq.held.push_back(std::move(held));
  oq.timer = ctx_.kernel.schedule(ctx_.kernel.now() + ctx_.cfg.query_timeout,
                                  [this, origin, qid] { query_timeout(origin, qid); });
  ++queries_sent_;

  QueryPayload base;
  base.query_id = qid;
  base.origin_monitor = origin;
  base.source = source;
  base.destination = destination;
  base.depth = 1;
  base.repair = repair;
  base.visited = {origin};
  base.relay_path = {origin};
  nodes_[origin].seen_queries.insert(qid);
  forward_query(origin, std::move(base));
}

void AmbrProtocol::forward_query(int from_node, QueryPayload q) {
  // Repairs stay local: they search only the nearby overlay and leave the
  // full-depth rediscovery to the source when they come up empty.
  int depth_limit =
      q.repair ? std::min(ctx_.cfg.dl_max, ctx_.cfg.repair_ttl) : ctx_.cfg.dl_max;
  for (const MonitorAdj& adj : neighbor_monitors(from_node)) {
    if (std::find(q.visited.begin(), q.visited.end(), adj.monitor) != q.visited.end()) continue;
    if (q.depth > depth_limit) {
      if (!q.repair) send_unreachable(from_node, q);
      continue;
    }
    QueryPayload copy = q;
    copy.relay_target = adj.monitor;
    int first_hop = adj.monitor;
    if (adj.gateway) {
      copy.relay_path.push_back(*adj.gateway);
      first_hop = *adj.gateway;
    }
    copy.relay_path.push_back(adj.monitor);
    Packet p = make_packet(PacketKind::RouteQuery, q.origin_monitor, adj.monitor);
    p.payload = std::move(copy);
    send_control(from_node, first_hop, std::move(p));
  }
}

void AmbrProtocol::handle_query(int node, const Packet& p) {
  const auto& q = std::get<QueryPayload>(p.payload);
  note_neighbor(node, p.from);
  ctx_.checker.check(q.depth <= ctx_.cfg.dl_max, "query depth exceeds DL_max");
  if (q.relay_target != node) {
    // Gateway leg: pass the query on to its monitor.
    Packet fwd = p;
    send_control(node, q.relay_target, std::move(fwd));
    return;
  }
  NodeState& ns = nodes_[node];
  if (ns.role != Role::Monitor) return;  // stale adjacency
  ctx_.checker.check(std::count(q.visited.begin(), q.visited.end(), node) == 0,
                     "monitor revisited by its own query");
  if (!ns.seen_queries.insert(q.query_id).second) return;  // processed once only
  trace(node, PacketKind::RouteQuery, "recv");

  if (q.destination == node || ns.neighbors.count(q.destination)) {
    answer_query(node, q);
    return;
  }
  if (fresh_cache(ns, q.destination) &&
      ctx_.kernel.now() - ns.cache[q.destination].learned_at <= kServeCacheAge) {
    // Answer from cache instead of re-flooding the overlay; only recently
    // validated paths are served, anything older is too likely to be stale.
    const auto& suffix = ns.cache[q.destination].path;
    if (!suffix.empty() && suffix.front() == node) {
      ReplyPayload rep;
      rep.query_id = q.query_id;
      rep.origin_monitor = q.origin_monitor;
      rep.destination = q.destination;
      rep.path = q.relay_path;
      rep.path.insert(rep.path.end(), suffix.begin() + 1, suffix.end());
      rep.hop = q.relay_path.size() - 1;
      int next = q.relay_path[rep.hop - 1];
      rep.hop -= 1;
      Packet reply = make_packet(PacketKind::RouteReply, node, q.origin_monitor);
      reply.payload = std::move(rep);
      send_control(node, next, std::move(reply));
      return;
    }
  }
  QueryPayload next = q;
  next.visited.push_back(node);
  next.depth = q.depth + 1;
  forward_query(node, std::move(next));
}

void AmbrProtocol::answer_query(int monitor, const QueryPayload& q) {
  ReplyPayload rep;
  rep.query_id = q.query_id;
  rep.origin_monitor = q.origin_monitor;
  rep.destination = q.destination;
  rep.path = q.relay_path;
  if (q.destination != monitor) rep.path.push_back(q.destination);
  // The answering monitor sits at the end of the relay path.
  rep.hop = q.relay_path.size() - 1;
  if (rep.hop == 0) {
    handle_reply(monitor, [&] {
      Packet p = make_packet(PacketKind::RouteReply, monitor, q.origin_monitor);
      p.payload = rep;
      p.from = monitor;
      return p;
    }());
    return;
  }
  int next = q.relay_path[rep.hop - 1];
  rep.hop -= 1;
  Packet p = make_packet(PacketKind::RouteReply, monitor, q.origin_monitor);
  p.payload = std::move(rep);
  send_control(monitor, next, std::move(p));
}

void AmbrProtocol::handle_reply(int node, const Packet& p) {
  const auto& rep = std::get<ReplyPayload>(p.payload);
  note_neighbor(node, p.from);
  NodeState& ns = nodes_[node];

  if (node != rep.origin_monitor && rep.hop > 0) {
    // Opportunistic caching: this relay now knows its own suffix to the
    // destination, so later queries (and local repairs) resolve here.
    if (rep.hop < rep.path.size() && rep.path[rep.hop] == node)
      ns.cache[rep.destination] = {{rep.path.begin() + rep.hop, rep.path.end()},
                                   ctx_.kernel.now(),
                                   true};
    // Keep walking the reverse path.
    ReplyPayload next = rep;
    int target = rep.path[rep.hop - 1];
    // relay path may include the appended destination; clamp to relay nodes.
    next.hop = rep.hop - 1;
    Packet fwd = make_packet(PacketKind::RouteReply, p.src, p.dst);
    fwd.payload = std::move(next);
    send_control(node, target, std::move(fwd));
    return;
  }

  auto it = ns.open_queries.find(rep.query_id);
  if (it == ns.open_queries.end()) {
    // Source-side install: the origin forwarded us the discovered path.
    if (!rep.path.empty() && rep.path.front() == node)
      ns.cache[rep.destination] = {rep.path, ctx_.kernel.now(), true};
    return;
  }
  QueryOrigin& oq = it->second;
  oq.reply_log.emplace_back(ctx_.kernel.now(), rep.path);
  if (oq.answered) {
    // First-reply-wins: the cache must still hold the earliest reply's path.
    auto cached = ns.cache.find(rep.destination);
    if (cached != ns.cache.end() && cached->second.learned_at == oq.first_reply_time)
      ctx_.checker.check(cached->second.path == oq.reply_log.front().second,
                         "cache does not hold the first-arriving reply");
    return;
  }
  oq.answered = true;
  oq.first_reply_time = ctx_.kernel.now();
  ctx_.kernel.cancel(oq.timer);
  ns.cache[rep.destination] = {rep.path, ctx_.kernel.now(), true};
  ns.recent_failure.erase(rep.destination);
  trace(node, PacketKind::RouteReply, "recv");

  if (oq.source != node) {
    // Populate the source cache too, so D ∈ C(S) can occur later.
    ReplyPayload for_src;
    for_src.query_id = rep.query_id;
    for_src.origin_monitor = oq.source;
    for_src.destination = rep.destination;
    for_src.path.reserve(rep.path.size() + 1);
    for_src.path.push_back(oq.source);
    for (int v : rep.path) for_src.path.push_back(v);
    for_src.hop = 0;
    Packet p2 = make_packet(PacketKind::RouteReply, node, oq.source);
    p2.payload = std::move(for_src);
    send_control(node, oq.source, std::move(p2));
  }

  auto held = std::move(oq.held);
  oq.held.clear();
  for (auto& pkt : held) {
    auto& d = std::get<DataPayload>(pkt.payload);
    d.path = ns.cache[rep.destination].path;
    d.hop = 0;
    d.needs_routing = false;
    forward_on_path(node, std::move(pkt));
  }
}

void AmbrProtocol::send_unreachable(int node, const QueryPayload& q) {
  NodeState& ns = nodes_[node];
  if (!ns.unreachable_sent.insert(q.query_id).second) return;
  UnreachablePayload u;
  u.query_id = q.query_id;
  u.source = q.source;
  u.destination = q.destination;
  u.reverse_path.assign(q.relay_path.rbegin(), q.relay_path.rend());
  if (u.reverse_path.empty() || u.reverse_path.back() != q.source)
    u.reverse_path.push_back(q.source);
  u.hop = 0;
  // Walk starts at this node; first target is the next entry.
  while (!u.reverse_path.empty() && u.reverse_path.front() == node) u.reverse_path.erase(u.reverse_path.begin());
  if (u.reverse_path.empty()) return;
  int next = u.reverse_path.front();
  Packet p = make_packet(PacketKind::DestinationUnreachable, node, q.source);
  p.payload = std::move(u);
  send_control(node, next, std::move(p));
}

void AmbrProtocol::handle_unreachable(int node, const Packet& p) {
  note_neighbor(node, p.from);
  ++unreachable_rx_[node];
  trace(node, PacketKind::DestinationUnreachable, "recv");
  if (!std::holds_alternative<UnreachablePayload>(p.payload)) return;  // terse notify
  const auto& u = std::get<UnreachablePayload>(p.payload);
  if (node == u.source) {
    // The path this flow was using is gone; forget it so the next packet
    // starts a fresh discovery instead of walking into the same break.
    nodes_[node].cache.erase(u.destination);
  }
  if (node == u.source || p.dst == node) {
    if (node != u.source && !u.reverse_path.empty()) {
      // keep forwarding below
    } else {
      return;
    }
  }
  // Forward along the precomputed reverse path.
  auto it = std::find(u.reverse_path.begin(), u.reverse_path.end(), node);
  if (it == u.reverse_path.end() || it + 1 == u.reverse_path.end()) return;
  UnreachablePayload next = u;
  Packet fwd = make_packet(PacketKind::DestinationUnreachable, p.src, p.dst);
  fwd.payload = std::move(next);
  send_control(node, *(it + 1), std::move(fwd));
}

void AmbrProtocol::query_timeout(int origin, std::uint64_t query_id) {
  NodeState& ns = nodes_[origin];
  auto it = ns.open_queries.find(query_id);
  if (it == ns.open_queries.end() || it->second.answered) return;
  QueryOrigin& oq = it->second;
  ns.recent_failure[oq.destination] = ctx_.kernel.now();
  trace(origin, PacketKind::RouteQuery, "drop");
  if (oq.source != origin) {
    Packet p = make_packet(PacketKind::DestinationUnreachable, origin, oq.source);
    UnreachablePayload u;
    u.query_id = query_id;
    u.source = oq.source;
    u.destination = oq.destination;
    p.payload = std::move(u);
    send_control(origin, oq.source, std::move(p));
  }
  for (auto& pkt : oq.held) drop_undelivered(pkt, origin);
  ns.open_queries.erase(it);
}

// ---------------------------------------------------------------------------
// packet dispatch

void AmbrProtocol::on_packet(int node, const Packet& p) {
  NodeState& ns = nodes_[node];
  switch (p.kind) {
    case PacketKind::Hello: {
      note_neighbor(node, p.from);
      Time now = ctx_.kernel.now();
      auto heard = ns.hello_heard.find(p.from);
      if (heard != ns.hello_heard.end() && now - heard->second < kHelloDedupWindow) return;
      ns.hello_heard[p.from] = now;
      send_control(node, p.from, make_packet(PacketKind::HelloReply, node, p.from));
      if (ns.role == Role::Monitor) {
        // Coverage offer: the newcomer must learn a monitor exists so its
        // hello propagation can end at once.
        Packet offer = make_packet(PacketKind::NewMonitor, node, p.from);
        offer.payload = NewMonitorPayload{ns.elected_at};
        send_control(node, p.from, std::move(offer));
      }
      break;
    }
    case PacketKind::HelloReply:
      note_neighbor(node, p.from);
      trace(node, PacketKind::HelloReply, "recv");
      maybe_elect(node);
      break;
    case PacketKind::NewMonitor: {
      note_neighbor(node, p.from);
      Time their_elect = std::get<NewMonitorPayload>(p.payload).elected_at;
      if (ns.role == Role::Monitor) {
        bool they_win = their_elect < ns.elected_at ||
                        (their_elect == ns.elected_at && p.from < node);
        if (they_win) abdicate(node, p.from);
      } else if (!ns.monitor) {
        affiliate(node, p.from);
      }
      break;
    }
    case PacketKind::MonitorAliveRequest:
      note_neighbor(node, p.from);
      ns.members[p.from] = ctx_.kernel.now();
      if (ns.role == Role::Monitor)
        send_control(node, p.from, make_packet(PacketKind::MonitorAliveReply, node, p.from));
      break;
    case PacketKind::MonitorAliveReply:
      note_neighbor(node, p.from);
      if (ns.monitor && *ns.monitor == p.from) {
        ns.last_monitor_exchange = ctx_.kernel.now();
        ns.keepalive_misses = 0;
      }
      break;
    case PacketKind::RouteQuery:
      handle_query(node, p);
      break;
    case PacketKind::RouteReply:
      handle_reply(node, p);
      break;
    case PacketKind::DestinationUnreachable:
      handle_unreachable(node, p);
      break;
    case PacketKind::Data: {
      note_neighbor(node, p.from);
      const auto& d = std::get<DataPayload>(p.payload);
      // Piggybacked liveness in both directions.
      if (ns.monitor && *ns.monitor == p.from) {
        ns.last_monitor_exchange = ctx_.kernel.now();
        ns.keepalive_misses = 0;
      }
      if (ns.role == Role::Monitor) ns.members[p.from] = ctx_.kernel.now();

      Packet pkt = p;
      auto& pd = std::get<DataPayload>(pkt.payload);
      if (pkt.dst == node) {
        deliver_local(node, pkt);
      } else if (pd.needs_routing) {
        if (ns.role == Role::Monitor)
          monitor_route(node, std::move(pkt));
        else
          route_data(node, std::move(pkt));  // stale affiliation; re-decide here
      } else if (!pd.path.empty() && pd.hop < pd.path.size() && pd.path[pd.hop] == node) {
        forward_on_path(node, std::move(pkt));
      } else {
        route_data(node, std::move(pkt));
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace ambr
