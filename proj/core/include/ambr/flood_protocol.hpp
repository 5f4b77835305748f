#ifndef AMBR_FLOOD_PROTOCOL_HPP
#define AMBR_FLOOD_PROTOCOL_HPP

#include <map>
#include <set>
#include <vector>

#include "ambr/protocol.hpp"

namespace ambr {

// Simplified flood-reactive protocol class: RREQ broadcast flood with
// duplicate suppression and a hop TTL, first RREP installs next-hop routes
// along the reverse path, optional TTL-limited local repair before the RERR
// fallback. A behavior class standing in for AODV/DSR, not a faithful port.
class FloodReactiveProtocol : public Protocol {
 public:
  FloodReactiveProtocol(SimContext ctx, bool local_repair);

  void start() override {}
  void on_packet(int node, const Packet& p) override;
  void send_data(int source, int destination) override;
  std::string name() const override {
    return local_repair_ ? "flood-reactive-lr" : "flood-reactive";
  }

  bool has_route(int node, int dst) const;
  std::uint64_t undelivered() const { return undelivered_; }

 private:
  struct Route {
    int next_hop;
    int hops;
    Time expires;
  };
  struct Discovery {
    std::vector<Packet> held;
    int attempts = 0;
    bool repair = false;
    EventQueue::Handle timer = 0;
  };
  struct NodeState {
    std::map<int, Route> routes;
    std::set<std::uint64_t> seen_rreq;
    std::map<int, Discovery> discovering;  // keyed by destination
    std::set<std::uint64_t> delivered_ids;
  };

  void start_discovery(int node, int dst, Packet held, bool repair);
  void discovery_timeout(int node, int dst);
  void forward_data(int node, Packet pkt);
  void handle_break(int holder, int next_hop, Packet pkt);
  void send_rerr(int holder, Packet pkt);
  void drop_undelivered(const Packet& pkt, int node);
  const Route* live_route(int node, int dst) const;

  std::vector<NodeState> nodes_;
  bool local_repair_;
  std::uint64_t next_rreq_id_ = 1;
  std::uint64_t next_packet_id_ = 1;
  std::uint64_t undelivered_ = 0;
};

// Simplified proactive (table-driven) protocol class: every node broadcasts
// its full distance-vector table each update period, plus damped triggered
// broadcasts when the topology view changes; receivers merge by
// sequence-number freshness then shortest hop count. Stands in for DSDV.
class ProactiveProtocol : public Protocol {
 public:
  explicit ProactiveProtocol(SimContext ctx);

  void start() override;
  void on_packet(int node, const Packet& p) override;
  void send_data(int source, int destination) override;
  std::string name() const override { return "proactive"; }

  // hop counts per destination, for shortest-path comparison
  std::map<int, int> table_hops(int node) const;
  std::uint64_t broadcasts_of(int node) const { return nodes_[node].broadcasts; }
  std::uint64_t undelivered() const { return undelivered_; }

 private:
  struct Entry {
    int next_hop;
    int hops;
    std::uint64_t seqno;
    Time updated;
  };
  struct Pending {
    Packet packet;
    Time queued_at;
  };
  struct NodeState {
    std::map<int, Entry> table;
    std::uint64_t own_seqno = 0;
    std::uint64_t broadcasts = 0;
    Time last_broadcast = -1.0e18;
    bool trigger_pending = false;
    std::map<int, std::vector<Pending>> pending;  // per destination
    std::set<std::uint64_t> delivered_ids;
  };

  void update_tick(int node);
  void broadcast_table(int node);
  void schedule_trigger(int node);
  void forward_data(int node, Packet pkt);
  void drop_undelivered(const Packet& pkt, int node);

  std::vector<NodeState> nodes_;
  std::uint64_t next_packet_id_ = 1;
  std::uint64_t undelivered_ = 0;
};

}  // namespace ambr

#endif
