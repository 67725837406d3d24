#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphnav/geometry.hpp"

namespace graphnav {

/// Node categories. Exactly three: they index the node embedding table.
/// Door nodes are Room-kind with the is_door flag set.
enum class NodeKind { Room, Hallway, OpenSpace };

/// Edge behaviors. Exactly five: they index the edge embedding table.
enum class BehaviorKind { CorridorFollow, FindDoor, TurnLeft, TurnRight, Straight };

inline constexpr int kNumNodeKinds = 3;
inline constexpr int kNumBehaviors = 5;

const char* to_string(NodeKind k);       // "room" | "hallway" | "open"
const char* to_string(BehaviorKind b);   // "cf" | "fd" | "tl" | "tr" | "s"
NodeKind node_kind_from_string(const std::string& s);
BehaviorKind behavior_from_string(const std::string& s);

struct TopoNode {
  int id = 0;
  NodeKind kind = NodeKind::Room;
  bool is_door = false;
  Vec2 position;                       // meters, metric world frame
  std::optional<double> orientation;   // radians; absent for room nodes
  std::string room_label;              // instance label, e.g. "office_1"
};

struct TopoEdge {
  int id = 0;
  int src = 0;
  int dst = 0;
  BehaviorKind behavior = BehaviorKind::CorridorFollow;
};

/// Directed behavior-labeled graph anchored in metric coordinates.
/// Immutable after construction; safe to share read-only across workers.
/// Construction checks structure (ids resolve, src != dst, no duplicate
/// (src,dst,behavior) triples, non-empty) and throws StructureError on
/// failure. Design-rule conformance is checked separately by validate_map.
class TopoMap {
 public:
  TopoMap(std::vector<TopoNode> nodes, std::vector<TopoEdge> edges);

  const std::vector<TopoNode>& nodes() const { return nodes_; }
  const std::vector<TopoEdge>& edges() const { return edges_; }

  bool has_node(int id) const { return node_index_.count(id) != 0; }
  bool has_edge(int id) const { return edge_index_.count(id) != 0; }
  const TopoNode& node(int id) const;
  const TopoEdge& edge(int id) const;
  std::size_t node_order(int id) const;  // position in nodes()
  std::size_t edge_order(int id) const;

  /// Edge ids leaving / entering a node, in ascending edge-id order.
  const std::vector<int>& out_edges(int node_id) const;
  const std::vector<int>& in_edges(int node_id) const;

  /// Distinct successor node ids, ascending. Parallel edges count once.
  std::vector<int> out_neighbors(int node_id) const;

  /// True if an edge src -> dst exists with any behavior.
  bool connects(int src, int dst) const;

  /// True if u and v share an edge in either direction.
  bool adjacent(int u, int v) const;

  std::optional<int> find_edge(int src, int dst, BehaviorKind b) const;

 private:
  std::vector<TopoNode> nodes_;
  std::vector<TopoEdge> edges_;
  std::unordered_map<int, std::size_t> node_index_;
  std::unordered_map<int, std::size_t> edge_index_;
  std::vector<std::vector<int>> out_edges_;  // by node order
  std::vector<std::vector<int>> in_edges_;
};

/// Behavior sequence realizing a path through the map. The constructor
/// enforces internal consistency: edge i connects node i to node i+1 and
/// behavior_seq mirrors the edges. Throws StructureError otherwise.
struct NavPlan {
  std::vector<int> node_seq;
  std::vector<int> edge_seq;
  std::vector<BehaviorKind> behavior_seq;

  NavPlan() = default;
  NavPlan(const TopoMap& map, std::vector<int> node_seq, std::vector<int> edge_seq);

  std::size_t num_nodes() const { return node_seq.size(); }
};

enum class Difficulty { I, II, III };
const char* to_string(Difficulty d);

/// Difficulty band from plan node count: <=10 -> I, 11..20 -> II, >20 -> III.
Difficulty difficulty(const NavPlan& plan);

/// One design-rule breach found by validate_map.
struct RuleViolation {
  int rule = 0;  // 1..6
  std::string message;
};
using ValidationReport = std::vector<RuleViolation>;

/// Checks the six map design rules:
///   1. each room has exactly one room node
///   2. each room has at least one door node
///   3. a find-door edge connects each room node to each of its door nodes
///      (and find-door edges appear nowhere else)
///   4. each corridor carries two directed chains with opposite orientations
///   5. edges entering a room terminate at the room node
///   6. edges exiting a room originate at a door node
/// Returns an empty report iff the map conforms.
ValidationReport validate_map(const TopoMap& map);

/// Hop-count shortest path src -> dst with unit edge weights. Ties are broken
/// by the lexicographically smallest node-id sequence; parallel edges by the
/// smallest edge id. Throws PlanningError when dst is unreachable.
NavPlan shortest_plan(const TopoMap& map, int src, int dst);

/// Local crop of a parent map: nodes within `ahead` edges downstream or
/// `behind` edges upstream of the center, plus all edges between kept nodes.
/// Local node/edge ids are dense 0..k-1 ordered by parent id.
struct SubGraph {
  TopoMap graph;
  std::vector<int> node_parent_ids;  // local node id -> parent node id
  std::vector<int> edge_parent_ids;  // local edge id -> parent edge id
  int center_parent_id = 0;
  int center_local_id = 0;

  int parent_node(int local) const { return node_parent_ids.at(static_cast<std::size_t>(local)); }
  int parent_edge(int local) const { return edge_parent_ids.at(static_cast<std::size_t>(local)); }
  std::optional<int> local_node(int parent_id) const;
  bool contains_parent_edge(int parent_edge_id) const;
};

SubGraph crop_subgraph(const TopoMap& map, int center, int ahead = 3, int behind = 2);

/// A sampled navigation problem: shortest plan between two distinct nodes.
struct NavTask {
  std::string map_id;
  int start = 0;
  int goal = 0;
  NavPlan plan;
  Difficulty band = Difficulty::I;
};

// --- Map file I/O (JSON, schema in README) ---------------------------------

struct LoadedMap {
  TopoMap map;
  ValidationReport violations;  // rule breaches are reported, not fatal
};

/// Reads a map file. Throws ParseError (malformed JSON / bad fields) or
/// StructureError (dangling ids, empty map).
LoadedMap read_map(const std::string& path);

/// Writes the canonical form: nodes and edges sorted by id, fixed key order.
/// write(read(f)) is byte-identical for canonical inputs.
void write_map(const std::string& path, const TopoMap& map);

std::string map_to_json_string(const TopoMap& map);
LoadedMap map_from_json_string(const std::string& text);

}  // namespace graphnav
