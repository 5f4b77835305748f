#ifndef AMBR_AMBR_PROTOCOL_HPP
#define AMBR_AMBR_PROTOCOL_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ambr/protocol.hpp"

namespace ambr {

// Monitor-based hybrid routing: event-driven hello sessions, threshold
// monitor election, keepalive with piggybacked liveness, per-node route
// caches, and depth-bounded recursive monitor-to-monitor route queries with
// local repair at the packet holder.
class AmbrProtocol : public Protocol {
 public:
  explicit AmbrProtocol(SimContext ctx);

  void start() override;
  void on_packet(int node, const Packet& p) override;
  void send_data(int source, int destination) override;
  std::string name() const override { return "ambr"; }

  // Introspection for tests and invariant checks.
  enum class Role { Ordinary, Monitor };
  Role role_of(int node) const { return nodes_[node].role; }
  std::optional<int> monitor_of(int node) const { return nodes_[node].monitor; }
  std::vector<int> current_monitors() const;
  int neighbor_count(int node) const { return static_cast<int>(nodes_[node].neighbors.size()); }
  bool has_cached_route(int node, int dst) const;
  std::vector<int> cached_route(int node, int dst) const;
  std::uint64_t queries_sent() const { return queries_sent_; }
  std::uint64_t undelivered() const { return undelivered_; }
  std::uint64_t unreachable_rx(int node) const { return unreachable_rx_.at(node); }

  struct MonitorAdj {
    int monitor;
    std::optional<int> gateway;
  };

 private:
  struct CacheEntry {
    std::vector<int> path;  // source-side first, destination last
    Time learned_at = 0.0;
    bool alive = true;
  };

  struct PendingData {
    Packet packet;
    Time queued_at;
  };

  struct QueryOrigin {
    int source;
    int destination;
    bool repair;
    std::vector<Packet> held;           // data packets awaiting the route
    EventQueue::Handle timer = 0;
    bool answered = false;
    Time first_reply_time = -1.0;
    std::vector<std::pair<Time, std::vector<int>>> reply_log;  // for the checker
  };

  struct NodeState {
    Role role = Role::Ordinary;
    std::optional<int> monitor;  // affiliation when Ordinary
    Time elected_at = -1.0;
    std::map<int, Time> neighbors;  // node -> last heard
    std::map<int, Time> members;    // monitor only
    std::map<int, CacheEntry> cache;
    bool hello_active = false;
    bool rearm_pending = false;
    int hello_tries = 0;
    EventQueue::Handle hello_timer = 0;
    bool election_pending = false;
    EventQueue::Handle election_timer = 0;
    Time last_monitor_exchange = -1.0e18;
    int keepalive_misses = 0;
    std::map<int, Time> hello_heard;  // dedup window per sender
    std::deque<PendingData> pending;  // awaiting affiliation
    std::map<std::uint64_t, QueryOrigin> open_queries;   // origin monitor only
    std::map<int, Time> recent_failure;  // destination -> last failed discovery
    std::map<int, Time> recent_repair;   // destination -> last repair query
    std::set<std::uint64_t> seen_queries;
    std::set<std::uint64_t> unreachable_sent;  // one per query per node
  };

  // -- hello session / election -------------------------------------------
  void start_hello_session(int node);
  void hello_tick(int node);
  void stop_hello_session(int node);
  void note_neighbor(int node, int other);
  void maybe_elect(int node);
  void become_monitor(int node);
  void abdicate(int node, int to_monitor);
  void affiliate(int node, int monitor);
  void deaffiliate(int node);

  // -- keepalive / pruning (one periodic maintenance tick per node) -------

  // -- data path -----------------------------------------------------------
  void route_data(int node, Packet pkt);
  void forward_on_path(int node, Packet pkt);
  void deliver_local(int node, const Packet& pkt);
  void hand_to_monitor(int node, Packet pkt, bool repair);
  void monitor_route(int monitor, Packet pkt);
  void on_route_break(int holder, int next_hop, Packet pkt);
  void drop_undelivered(const Packet& pkt, int at_node);

  // -- route finder --------------------------------------------------------
  void route_finder(int origin, int source, int destination, bool repair, Packet held);
  void forward_query(int from_node, QueryPayload q);
  void handle_query(int monitor, const Packet& p);
  void answer_query(int monitor, const QueryPayload& q);
  void handle_reply(int node, const Packet& p);
  void send_unreachable(int node, const QueryPayload& q);
  void handle_unreachable(int node, const Packet& p);
  void query_timeout(int origin, std::uint64_t query_id);

  // -- helpers -------------------------------------------------------------
  std::vector<MonitorAdj> neighbor_monitors(int monitor) const;
  std::optional<int> gateway_between(int m1, int m2) const;
  bool fresh_cache(const NodeState& ns, int dst) const;
  void invalidate_link(int node, int a, int b);
  void send_control(int sender, int target, Packet p,
                    std::function<void(bool)> on_result = {});
  Packet make_packet(PacketKind kind, int src, int dst) const;
  double jittered(double base) { return base * ctx_.proto_rng.uniform(0.9, 1.1); }

  void maintenance_tick(int node);
  void rearm_hello(int node);

  std::vector<NodeState> nodes_;
  std::vector<std::uint64_t> unreachable_rx_;
  std::uint64_t next_query_id_ = 1;
  std::uint64_t next_packet_id_ = 1;
  std::uint64_t queries_sent_ = 0;
  std::uint64_t undelivered_ = 0;
};

}  // namespace ambr

#endif
