#include "graphnav/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "graphnav/errors.hpp"

namespace graphnav {

void label_rooms(Trajectory& traj, const WorldModel& world) {
  for (Frame& f : traj.frames) f.labels.room = room_at(world, f.pose.x, f.pose.y).first;
}

namespace {

std::map<std::string, SemClass> class_by_label(const WorldModel& world) {
  std::map<std::string, SemClass> out;
  for (const RoomInfo& r : world.rooms()) out[r.label] = r.sem;
  out["occupied"] = SemClass::Occupied;
  return out;
}

double path_step(const Trajectory& traj, std::size_t a, std::size_t b) {
  return distance({traj.frames[a].pose.x, traj.frames[a].pose.y},
                  {traj.frames[b].pose.x, traj.frames[b].pose.y});
}

// Largest unwrapped heading change relative to the transition frame within
// 2 m of path, scanning forward (dir=+1) or backward (dir=-1) in time.
// Positive means a counter-clockwise (left) rotation in travel order.
double scan_rotation(const Trajectory& traj, std::size_t f, int dir) {
  double best = 0.0;
  double cum_turn = 0.0;
  double cum_len = 0.0;
  int i = static_cast<int>(f);
  const int n = static_cast<int>(traj.frames.size());
  while (true) {
    int j = i + dir;
    if (j < 0 || j >= n) break;
    cum_len += path_step(traj, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    if (cum_len >= kTurnWindow) break;
    double d = dir > 0 ? angle_diff(traj.frames[j].pose.theta, traj.frames[i].pose.theta)
                       : angle_diff(traj.frames[i].pose.theta, traj.frames[j].pose.theta);
    cum_turn += d;
    if (std::abs(cum_turn) > std::abs(best)) best = cum_turn;
    i = j;
  }
  return best;
}

}  // namespace

void detect_behaviors(Trajectory& traj, const WorldModel& world) {
  if (traj.frames.empty()) return;
  std::map<std::string, SemClass> classes = class_by_label(world);
  auto sem = [&](const std::string& label) {
    auto it = classes.find(label);
    if (it == classes.end()) throw QueryError("unknown room label '" + label + "'");
    return it->second;
  };

  // (a)-(c): room transitions become turn / straight / corridor-follow tags
  // over the +-2 m window; later transitions overwrite earlier ones.
  for (std::size_t f = 1; f < traj.frames.size(); ++f) {
    const std::string& before = traj.frames[f - 1].labels.room;
    const std::string& after = traj.frames[f].labels.room;
    if (before == after) continue;

    double fwd = scan_rotation(traj, f, +1);
    double bwd = scan_rotation(traj, f, -1);
    double decisive = std::abs(fwd) >= std::abs(bwd) ? fwd : bwd;

    BehaviorKind behavior;
    if (std::abs(decisive) > deg2rad(kTurnAngleDeg)) {
      behavior = decisive > 0 ? BehaviorKind::TurnLeft : BehaviorKind::TurnRight;
    } else if (is_enclosed_room(sem(after))) {
      behavior = BehaviorKind::Straight;
    } else {
      behavior = BehaviorKind::CorridorFollow;
    }

    auto tag = [&](std::size_t i) {
      const std::string& room = traj.frames[i].labels.room;
      if (room == before || room == after) traj.frames[i].labels.behavior = behavior;
    };
    tag(f);
    double cum = 0.0;
    for (std::size_t i = f; i + 1 < traj.frames.size(); ++i) {
      cum += path_step(traj, i, i + 1);
      if (cum >= kTurnWindow) break;
      tag(i + 1);
    }
    cum = 0.0;
    for (std::size_t i = f; i > 0; --i) {
      cum += path_step(traj, i, i - 1);
      if (cum >= kTurnWindow) break;
      tag(i - 1);
    }
  }

  // (d) Find-door: start of the trajectory up to the first transition from an
  // enclosed room into a hallway.
  for (std::size_t f = 1; f < traj.frames.size(); ++f) {
    if (is_enclosed_room(sem(traj.frames[f - 1].labels.room)) &&
        sem(traj.frames[f].labels.room) == SemClass::Hallway) {
      for (std::size_t i = 0; i < f; ++i)
        traj.frames[i].labels.behavior = BehaviorKind::FindDoor;
      break;
    }
  }

  // (e) Remaining untagged frames in traversal space follow the corridor.
  for (Frame& frame : traj.frames) {
    if (frame.labels.behavior) continue;
    SemClass c = sem(frame.labels.room);
    if (c == SemClass::Hallway || c == SemClass::Open)
      frame.labels.behavior = BehaviorKind::CorridorFollow;
  }
}

namespace {

// Chord bearings of the node's incident edges, as directions of travel
// through the node.
bool orientation_matches(const TopoMap& map, const TopoNode& n, double heading) {
  if (n.kind == NodeKind::Room && !n.is_door) return true;  // any direction
  const double tol = deg2rad(kOrientationMatchDeg);
  for (int eid : map.out_edges(n.id)) {
    const TopoNode& w = map.node(map.edge(eid).dst);
    if (std::abs(angle_diff(bearing(n.position, w.position), heading)) <= tol) return true;
  }
  for (int eid : map.in_edges(n.id)) {
    const TopoNode& u = map.node(map.edge(eid).src);
    if (std::abs(angle_diff(bearing(u.position, n.position), heading)) <= tol) return true;
  }
  return false;
}

std::set<std::string> real_room_labels(const TopoMap& map) {
  std::set<std::string> labels;
  for (const TopoNode& n : map.nodes())
    if (n.kind == NodeKind::Room && !n.is_door) labels.insert(n.room_label);
  return labels;
}

// Nearest node matching orientation and (inside a room) the room label.
std::optional<int> nearest_candidate(const TopoMap& map, const std::set<std::string>& rooms,
                                     const RobotState& pose, const std::string& room_label) {
  bool inside_room = rooms.count(room_label) != 0;
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::max();
  for (const TopoNode& n : map.nodes()) {
    if (inside_room && n.room_label != room_label) continue;
    double d = distance(n.position, {pose.x, pose.y});
    if (d >= best_d) continue;
    if (!orientation_matches(map, n, pose.theta)) continue;
    best_d = d;
    best = n.id;
  }
  return best;
}

// Continuity state shared by the offline labeler and the online locator.
struct NodeTracker {
  std::optional<int> prev;
  int rejected_streak = 0;

  std::optional<int> advance(const TopoMap& map, const std::set<std::string>& rooms,
                             const RobotState& pose, const std::string& room_label) {
    std::optional<int> cand = nearest_candidate(map, rooms, pose, room_label);
    if (!cand) return std::nullopt;
    bool ok = !prev || *cand == *prev || map.adjacent(*prev, *cand) ||
              rejected_streak >= kRelocalizeAfter;
    if (!ok) {
      ++rejected_streak;
      return std::nullopt;
    }
    rejected_streak = 0;
    prev = cand;
    return cand;
  }
};

}  // namespace

void localize_nodes(Trajectory& traj, const TopoMap& map) {
  std::set<std::string> rooms = real_room_labels(map);
  NodeTracker tracker;
  for (Frame& f : traj.frames)
    f.labels.node = tracker.advance(map, rooms, f.pose, f.labels.room);
}

std::vector<EdgeDiagnostic> localize_edges(Trajectory& traj, const TopoMap& map) {
  std::vector<EdgeDiagnostic> diagnostics;

  // Indices of labeled frames, in order; runs are maximal equal-node spans
  // of this subsequence.
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < traj.frames.size(); ++i)
    if (traj.frames[i].labels.node) labeled.push_back(i);

  std::size_t run_start = 0;
  for (std::size_t k = 0; k < labeled.size(); ++k) {
    bool run_ends = k + 1 == labeled.size() ||
                    *traj.frames[labeled[k + 1]].labels.node !=
                        *traj.frames[labeled[k]].labels.node;
    if (!run_ends) continue;
    if (k + 1 < labeled.size()) {
      int from = *traj.frames[labeled[k]].labels.node;
      int to = *traj.frames[labeled[k + 1]].labels.node;
      std::optional<int> edge;
      for (int eid : map.out_edges(from)) {
        if (map.edge(eid).dst == to) {
          edge = eid;
          break;  // out_edges are id-ordered: lowest id wins
        }
      }
      if (edge) {
        for (std::size_t j = run_start; j <= k; ++j)
          traj.frames[labeled[j]].labels.edge = edge;
      } else {
        diagnostics.push_back({static_cast<int>(labeled[k]), from, to});
      }
    }
    run_start = k + 1;
  }
  return diagnostics;
}

std::vector<EdgeDiagnostic> annotate_trajectory(Trajectory& traj, const WorldModel& world,
                                                const TopoMap& map) {
  label_rooms(traj, world);
  detect_behaviors(traj, world);
  localize_nodes(traj, map);
  return localize_edges(traj, map);
}

AnnotationSummary summarize_annotation(const Trajectory& traj) {
  AnnotationSummary s;
  s.frames = traj.frames.size();
  for (const Frame& f : traj.frames) {
    if (f.labels.behavior) {
      ++s.behavior_tagged;
      ++s.behavior_counts[static_cast<int>(*f.labels.behavior)];
    }
    if (f.labels.node) ++s.node_tagged;
    if (f.labels.edge) ++s.edge_tagged;
  }
  return s;
}

GtLocator::GtLocator(const TopoMap& map, const WorldModel& world, std::optional<NavPlan> plan)
    : map_(map), world_(world), plan_(std::move(plan)), rooms_(real_room_labels(map)) {}

GtLocator::Output GtLocator::feed(const RobotState& pose) {
  std::string room = room_at(world_, pose.x, pose.y).first;
  NodeTracker tracker{prev_node_, rejected_streak_};
  std::optional<int> node = tracker.advance(map_, rooms_, pose, room);
  prev_node_ = tracker.prev;
  rejected_streak_ = tracker.rejected_streak;

  Output out;
  out.node = node;  // this frame's tag; equals the offline labeling exactly
  if (!plan_ || !prev_node_) return out;

  // Plan lookup tracks the last known node, so GTL keeps a behavior during
  // unlabeled gaps.
  const NavPlan& plan = *plan_;
  auto it = std::find(plan.node_seq.begin(), plan.node_seq.end(), *prev_node_);
  if (it == plan.node_seq.end()) {
    out.off_plan = true;
    return out;
  }
  std::size_t idx = static_cast<std::size_t>(it - plan.node_seq.begin());
  if (idx + 1 == plan.node_seq.size()) {
    out.arrived = true;
    return out;
  }
  out.edge = plan.edge_seq[idx];
  out.behavior_on_plan = plan.behavior_seq[idx];
  return out;
}

}  // namespace graphnav
