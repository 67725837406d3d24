#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphnav/trajectory.hpp"

namespace graphnav {

inline constexpr double kTurnAngleDeg = 40.0;      // strictly-greater threshold
inline constexpr double kTurnWindow = 2.0;         // m of path around a transition
inline constexpr double kOrientationMatchDeg = 36.0;
// After this many consecutive continuity rejections the tracker re-anchors on
// the current candidate; otherwise a single spurious match could orphan the
// rest of a trajectory.
inline constexpr int kRelocalizeAfter = 10;

/// Fills every frame's room label from the world raster. Total: frames on
/// occupied cells (which live rollouts never produce) get the sentinel label.
void label_rooms(Trajectory& traj, const WorldModel& world);

/// Tags frames with behaviors from room-transition heuristics:
/// turns (heading change > 40 degrees within 2 m of travel, larger of the
/// forward/backward scans decides), straight (into an enclosed room),
/// find-door (start to the first room-to-hallway transition), and corridor
/// follow (remaining frames in hallways/open spaces). Rooms must be labeled.
void detect_behaviors(Trajectory& traj, const WorldModel& world);

/// Tags frames with the nearest map node that matches the robot's heading
/// (an incident edge chord within 36 degrees; room nodes match any heading),
/// lies in the robot's room when inside one, and is the previous node or a
/// direct neighbor of it. Frames failing the continuity check stay unlabeled
/// until a valid successor appears.
void localize_nodes(Trajectory& traj, const TopoMap& map);

struct EdgeDiagnostic {
  int frame = 0;
  int from_node = 0;
  int to_node = 0;
};

/// Tags each maximal node-run with the edge to the next run's node. Runs
/// whose node pair has no connecting edge stay untagged and are reported.
std::vector<EdgeDiagnostic> localize_edges(Trajectory& traj, const TopoMap& map);

/// rooms -> behaviors -> nodes -> edges, in order.
std::vector<EdgeDiagnostic> annotate_trajectory(Trajectory& traj, const WorldModel& world,
                                                const TopoMap& map);

struct AnnotationSummary {
  std::size_t frames = 0;
  std::size_t behavior_counts[kNumBehaviors] = {};
  std::size_t behavior_tagged = 0;
  std::size_t node_tagged = 0;
  std::size_t edge_tagged = 0;
  double unlabeled_node_fraction() const {
    return frames == 0 ? 0.0 : 1.0 - static_cast<double>(node_tagged) / frames;
  }
};

AnnotationSummary summarize_annotation(const Trajectory& traj);

/// The annotation heuristics run online: node localization over past frames
/// only, plus the plan lookup used by the ground-truth-location baseline.
class GtLocator {
 public:
  struct Output {
    std::optional<int> node;
    std::optional<int> edge;  // plan edge whose source is the current node
    std::optional<BehaviorKind> behavior_on_plan;
    bool off_plan = false;
    bool arrived = false;
  };

  GtLocator(const TopoMap& map, const WorldModel& world, std::optional<NavPlan> plan);

  /// Output.node carries this frame's tag (empty during continuity gaps, like
  /// the offline labeler); plan fields follow the last known node.
  Output feed(const RobotState& pose);
  std::optional<int> current_node() const { return prev_node_; }

 private:
  const TopoMap& map_;
  const WorldModel& world_;
  std::optional<NavPlan> plan_;
  std::set<std::string> rooms_;
  std::optional<int> prev_node_;
  int rejected_streak_ = 0;
};

}  // namespace graphnav
