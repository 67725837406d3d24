#pragma once

#include <memory>
#include <vector>

#include "graphnav/rng.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

inline constexpr double kAstarInflation = kFootprintRadius + 0.05;
inline constexpr double kPursuitLookahead = 0.5;
inline constexpr double kGoalTolerance = 0.3;       // m, collector arrival check
inline constexpr double kTrajectoryTimeout = 120.0; // s

/// Occupancy grid dilated by the robot footprint plus margin; planning on it
/// keeps A* paths collision-free for the disc robot. Also carries a chamfer
/// clearance field so the planner can prefer wall-distant routes (the tracker
/// cuts corners slightly, so paths hug the middle of doorways). Built once
/// per world.
class InflatedGrid {
 public:
  explicit InflatedGrid(const WorldModel& world);
  bool blocked(int cx, int cy) const {
    return cx < 0 || cy < 0 || cx >= w_ || cy >= h_ ||
           cells_[static_cast<std::size_t>(cy) * w_ + cx] != 0;
  }
  /// Approximate distance (m) from the cell to the nearest inflated obstacle.
  double clearance(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= w_ || cy >= h_) return 0.0;
    return clearance_[static_cast<std::size_t>(cy) * w_ + cx];
  }
  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_, h_;
  std::vector<std::uint8_t> cells_;
  std::vector<float> clearance_;
};

/// 8-connected grid A* between metric points; returns cell-center waypoints
/// including snapped endpoints. Throws PlanningError if no path exists.
std::vector<Vec2> grid_astar(const WorldModel& world, const InflatedGrid& grid, Vec2 start,
                             Vec2 goal);

/// Metric path realizing a plan: A* segments concatenated through every plan
/// node position, so the rollout traverses the plan's nodes in order.
std::vector<Vec2> plan_metric_path(const WorldModel& world, const InflatedGrid& grid,
                                   const TopoMap& map, const NavPlan& plan);

/// Pure-pursuit command toward the point kPursuitLookahead ahead of the
/// closest path point: v_p = 0.5 max(0, cos a), v_theta proportional to the
/// heading error a, both within caps. Throws on an empty path.
VelocityCmd oracle_velocity(const WorldModel& world, const RobotState& state,
                            const std::vector<Vec2>& metric_path);

/// Stateful tracker for closed-loop following: progress along the path is
/// monotone, which keeps self-crossing paths (loops) unambiguous.
class PursuitTracker {
 public:
  explicit PursuitTracker(std::vector<Vec2> path);
  VelocityCmd command(const RobotState& state);
  double remaining_distance(const RobotState& state) const;
  const std::vector<Vec2>& path() const { return path_; }

 private:
  std::vector<Vec2> path_;
  std::vector<double> arclen_;
  std::size_t progress_ = 0;  // index of the segment last matched
};

/// Rolls the scripted expert through a task at 5 Hz, recording one frame per
/// tick. cmd_expert is the pre-noise command; the simulator executes the
/// noisy command when noise is enabled. Terminates at the goal, on collision,
/// or at the 120 s timeout.
Trajectory collect_trajectory(const WorldModel& world, const TopoMap& map, const NavTask& task,
                              Rng& rng, bool noise);

}  // namespace graphnav
