#include "graphnav/topomap.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "graphnav/errors.hpp"

namespace graphnav {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Room: return "room";
    case NodeKind::Hallway: return "hallway";
    case NodeKind::OpenSpace: return "open";
  }
  return "?";
}

const char* to_string(BehaviorKind b) {
  switch (b) {
    case BehaviorKind::CorridorFollow: return "cf";
    case BehaviorKind::FindDoor: return "fd";
    case BehaviorKind::TurnLeft: return "tl";
    case BehaviorKind::TurnRight: return "tr";
    case BehaviorKind::Straight: return "s";
  }
  return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "room") return NodeKind::Room;
  if (s == "hallway") return NodeKind::Hallway;
  if (s == "open") return NodeKind::OpenSpace;
  throw ParseError("unknown node kind '" + s + "'");
}

BehaviorKind behavior_from_string(const std::string& s) {
  if (s == "cf") return BehaviorKind::CorridorFollow;
  if (s == "fd") return BehaviorKind::FindDoor;
  if (s == "tl") return BehaviorKind::TurnLeft;
  if (s == "tr") return BehaviorKind::TurnRight;
  if (s == "s") return BehaviorKind::Straight;
  throw ParseError("unknown behavior '" + s + "'");
}

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::I: return "I";
    case Difficulty::II: return "II";
    case Difficulty::III: return "III";
  }
  return "?";
}

TopoMap::TopoMap(std::vector<TopoNode> nodes, std::vector<TopoEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (nodes_.empty()) throw StructureError("empty map");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i].id, i).second)
      throw StructureError("duplicate node id " + std::to_string(nodes_[i].id));
  }
  out_edges_.resize(nodes_.size());
  in_edges_.resize(nodes_.size());

  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const TopoEdge& e = edges_[i];
    if (!edge_index_.emplace(e.id, i).second)
      throw StructureError("duplicate edge id " + std::to_string(e.id));
    auto s = node_index_.find(e.src);
    auto d = node_index_.find(e.dst);
    if (s == node_index_.end())
      throw StructureError("edge " + std::to_string(e.id) + ": unknown src node " +
                           std::to_string(e.src));
    if (d == node_index_.end())
      throw StructureError("edge " + std::to_string(e.id) + ": unknown dst node " +
                           std::to_string(e.dst));
    if (e.src == e.dst)
      throw StructureError("edge " + std::to_string(e.id) + ": self-loop at node " +
                           std::to_string(e.src));
    if (!seen.insert({e.src, e.dst, static_cast<int>(e.behavior)}).second)
      throw StructureError("edge " + std::to_string(e.id) + ": duplicate (src,dst,behavior)");
    out_edges_[s->second].push_back(e.id);
    in_edges_[d->second].push_back(e.id);
  }
  for (auto& v : out_edges_) std::sort(v.begin(), v.end());
  for (auto& v : in_edges_) std::sort(v.begin(), v.end());
}

const TopoNode& TopoMap::node(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw StructureError("unknown node id " + std::to_string(id));
  return nodes_[it->second];
}

const TopoEdge& TopoMap::edge(int id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw StructureError("unknown edge id " + std::to_string(id));
  return edges_[it->second];
}

std::size_t TopoMap::node_order(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw StructureError("unknown node id " + std::to_string(id));
  return it->second;
}

std::size_t TopoMap::edge_order(int id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw StructureError("unknown edge id " + std::to_string(id));
  return it->second;
}

const std::vector<int>& TopoMap::out_edges(int node_id) const {
  return out_edges_[node_order(node_id)];
}

const std::vector<int>& TopoMap::in_edges(int node_id) const {
  return in_edges_[node_order(node_id)];
}

std::vector<int> TopoMap::out_neighbors(int node_id) const {
  std::vector<int> out;
  for (int eid : out_edges(node_id)) out.push_back(edge(eid).dst);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool TopoMap::connects(int src, int dst) const {
  for (int eid : out_edges(src))
    if (edge(eid).dst == dst) return true;
  return false;
}

bool TopoMap::adjacent(int u, int v) const { return connects(u, v) || connects(v, u); }

std::optional<int> TopoMap::find_edge(int src, int dst, BehaviorKind b) const {
  for (int eid : out_edges(src)) {
    const TopoEdge& e = edge(eid);
    if (e.dst == dst && e.behavior == b) return eid;
  }
  return std::nullopt;
}

NavPlan::NavPlan(const TopoMap& map, std::vector<int> nodes, std::vector<int> edges)
    : node_seq(std::move(nodes)), edge_seq(std::move(edges)) {
  if (node_seq.empty()) throw StructureError("plan with empty node sequence");
  if (edge_seq.size() + 1 != node_seq.size())
    throw StructureError("plan edge count does not match node count");
  behavior_seq.reserve(edge_seq.size());
  for (std::size_t i = 0; i < edge_seq.size(); ++i) {
    const TopoEdge& e = map.edge(edge_seq[i]);
    if (e.src != node_seq[i] || e.dst != node_seq[i + 1])
      throw StructureError("plan edge " + std::to_string(e.id) + " does not connect step " +
                           std::to_string(i));
    behavior_seq.push_back(e.behavior);
  }
}

Difficulty difficulty(const NavPlan& plan) {
  if (plan.node_seq.empty()) throw ContractViolation("difficulty of empty plan");
  const std::size_t n = plan.node_seq.size();
  if (n <= 10) return Difficulty::I;
  if (n <= 20) return Difficulty::II;
  return Difficulty::III;
}

namespace {

bool is_room_node(const TopoNode& n) { return n.kind == NodeKind::Room && !n.is_door; }
bool is_door_node(const TopoNode& n) { return n.kind == NodeKind::Room && n.is_door; }

}  // namespace

ValidationReport validate_map(const TopoMap& map) {
  ValidationReport report;
  auto add = [&](int rule, std::string msg) { report.push_back({rule, std::move(msg)}); };

  // Room inventory keyed by instance label.
  std::map<std::string, std::vector<const TopoNode*>> room_nodes, door_nodes;
  std::map<std::string, std::vector<const TopoNode*>> hallway_nodes;
  for (const TopoNode& n : map.nodes()) {
    if (is_room_node(n)) room_nodes[n.room_label].push_back(&n);
    if (is_door_node(n)) door_nodes[n.room_label].push_back(&n);
    if (n.kind == NodeKind::Hallway) hallway_nodes[n.room_label].push_back(&n);
  }

  // Rule 1: exactly one room node per room.
  for (const auto& [label, nodes] : room_nodes)
    if (nodes.size() > 1)
      add(1, "room '" + label + "' has " + std::to_string(nodes.size()) + " room nodes");
  for (const auto& [label, nodes] : door_nodes)
    if (room_nodes.find(label) == room_nodes.end())
      add(1, "room '" + label + "' has door nodes but no room node");

  // Rule 2: every room has at least one door node.
  for (const auto& [label, nodes] : room_nodes)
    if (door_nodes.find(label) == door_nodes.end())
      add(2, "room '" + label + "' has no door node");

  // Rule 3: find-door connects each room node to each of its door nodes.
  for (const auto& [label, rooms] : room_nodes) {
    auto dit = door_nodes.find(label);
    if (dit == door_nodes.end()) continue;
    for (const TopoNode* r : rooms)
      for (const TopoNode* d : dit->second)
        if (!map.find_edge(r->id, d->id, BehaviorKind::FindDoor))
          add(3, "room '" + label + "': no find-door edge from node " + std::to_string(r->id) +
                     " to door " + std::to_string(d->id));
  }
  for (const TopoEdge& e : map.edges()) {
    if (e.behavior != BehaviorKind::FindDoor) continue;
    const TopoNode& s = map.node(e.src);
    const TopoNode& d = map.node(e.dst);
    if (!is_room_node(s) || !is_door_node(d) || s.room_label != d.room_label)
      add(3, "find-door edge " + std::to_string(e.id) +
                 " does not go from a room node to one of its door nodes");
  }

  // Rule 4: corridors carry two opposite-direction chains.
  constexpr double kOppositeTol = deg2rad(30.0);
  for (const auto& [label, nodes] : hallway_nodes) {
    if (nodes.size() < 2) {
      add(4, "corridor '" + label + "' has fewer than two nodes");
      continue;
    }
    for (const TopoNode* n : nodes) {
      if (!n->orientation) continue;  // missing orientation caught elsewhere
      bool has_opposite = false;
      for (const TopoNode* m : nodes) {
        if (m == n || !m->orientation) continue;
        double d = std::abs(angle_diff(*m->orientation, *n->orientation + kPi));
        if (d < kOppositeTol) {
          has_opposite = true;
          break;
        }
      }
      if (!has_opposite)
        add(4, "corridor '" + label + "': node " + std::to_string(n->id) +
                   " has no opposite-direction counterpart");
    }
  }

  // Rules 5 and 6 apply to labels that own a room node.
  auto is_real_room = [&](const std::string& label) {
    return room_nodes.find(label) != room_nodes.end();
  };
  for (const TopoEdge& e : map.edges()) {
    const TopoNode& s = map.node(e.src);
    const TopoNode& d = map.node(e.dst);
    if (s.room_label == d.room_label) continue;
    if (is_real_room(d.room_label) && !is_room_node(d))
      add(5, "edge " + std::to_string(e.id) + " enters room '" + d.room_label +
                 "' but does not terminate at its room node");
    if (is_real_room(s.room_label) && !is_door_node(s))
      add(6, "edge " + std::to_string(e.id) + " exits room '" + s.room_label +
                 "' but does not originate at a door node");
  }
  return report;
}

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

// BFS distance from `start` following edges in the given direction.
std::vector<int> bfs_distances(const TopoMap& map, int start, bool forward) {
  std::vector<int> dist(map.nodes().size(), kUnreached);
  std::deque<int> queue;
  dist[map.node_order(start)] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    int dcur = dist[map.node_order(cur)];
    const auto& eids = forward ? map.out_edges(cur) : map.in_edges(cur);
    for (int eid : eids) {
      const TopoEdge& e = map.edge(eid);
      int nxt = forward ? e.dst : e.src;
      std::size_t oi = map.node_order(nxt);
      if (dist[oi] == kUnreached) {
        dist[oi] = dcur + 1;
        queue.push_back(nxt);
      }
    }
  }
  return dist;
}

}  // namespace

NavPlan shortest_plan(const TopoMap& map, int src, int dst) {
  map.node(src);
  map.node(dst);
  if (src == dst) return NavPlan(map, {src}, {});

  // Distance-to-destination via reverse BFS, then a greedy id-ordered walk
  // yields the lexicographically smallest shortest node sequence.
  std::vector<int> dist = bfs_distances(map, dst, /*forward=*/false);
  if (dist[map.node_order(src)] == kUnreached)
    throw PlanningError("node " + std::to_string(dst) + " unreachable from " +
                        std::to_string(src));

  std::vector<int> node_seq{src};
  std::vector<int> edge_seq;
  int cur = src;
  while (cur != dst) {
    int dcur = dist[map.node_order(cur)];
    int best_node = -1;
    int best_edge = -1;
    for (int eid : map.out_edges(cur)) {
      const TopoEdge& e = map.edge(eid);
      if (dist[map.node_order(e.dst)] != dcur - 1) continue;
      if (best_node == -1 || e.dst < best_node || (e.dst == best_node && eid < best_edge)) {
        best_node = e.dst;
        best_edge = eid;
      }
    }
    node_seq.push_back(best_node);
    edge_seq.push_back(best_edge);
    cur = best_node;
  }
  return NavPlan(map, std::move(node_seq), std::move(edge_seq));
}

std::optional<int> SubGraph::local_node(int parent_id) const {
  for (std::size_t i = 0; i < node_parent_ids.size(); ++i)
    if (node_parent_ids[i] == parent_id) return static_cast<int>(i);
  return std::nullopt;
}

bool SubGraph::contains_parent_edge(int parent_edge_id) const {
  return std::find(edge_parent_ids.begin(), edge_parent_ids.end(), parent_edge_id) !=
         edge_parent_ids.end();
}

SubGraph crop_subgraph(const TopoMap& map, int center, int ahead, int behind) {
  map.node(center);
  std::vector<int> fwd = bfs_distances(map, center, /*forward=*/true);
  std::vector<int> bwd = bfs_distances(map, center, /*forward=*/false);

  std::vector<int> kept;  // parent ids, ascending
  for (const TopoNode& n : map.nodes()) {
    std::size_t oi = map.node_order(n.id);
    if ((fwd[oi] != kUnreached && fwd[oi] <= ahead) ||
        (bwd[oi] != kUnreached && bwd[oi] <= behind))
      kept.push_back(n.id);
  }
  std::sort(kept.begin(), kept.end());

  std::unordered_map<int, int> local_of;
  std::vector<TopoNode> local_nodes;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    local_of[kept[i]] = static_cast<int>(i);
    TopoNode n = map.node(kept[i]);
    n.id = static_cast<int>(i);
    local_nodes.push_back(std::move(n));
  }

  std::vector<int> kept_edges;
  for (const TopoEdge& e : map.edges())
    if (local_of.count(e.src) && local_of.count(e.dst)) kept_edges.push_back(e.id);
  std::sort(kept_edges.begin(), kept_edges.end());

  std::vector<TopoEdge> local_edges;
  for (std::size_t i = 0; i < kept_edges.size(); ++i) {
    const TopoEdge& e = map.edge(kept_edges[i]);
    local_edges.push_back({static_cast<int>(i), local_of[e.src], local_of[e.dst], e.behavior});
  }

  SubGraph sub{TopoMap(std::move(local_nodes), std::move(local_edges)),
               std::move(kept),
               std::move(kept_edges),
               center,
               0};
  sub.center_local_id = *sub.local_node(center);
  return sub;
}

}  // namespace graphnav
