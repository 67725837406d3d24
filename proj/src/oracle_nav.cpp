#include "graphnav/oracle_nav.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "graphnav/errors.hpp"

namespace graphnav {

namespace {
constexpr double kPursuitGain = 3.0;  // rad/s per rad of heading error
}  // namespace

const char* to_string(TrajOutcome o) {
  switch (o) {
    case TrajOutcome::ReachedGoal: return "goal";
    case TrajOutcome::Collision: return "collision";
    case TrajOutcome::Timeout: return "timeout";
  }
  return "?";
}

TrajOutcome traj_outcome_from_string(const std::string& s) {
  if (s == "goal") return TrajOutcome::ReachedGoal;
  if (s == "collision") return TrajOutcome::Collision;
  if (s == "timeout") return TrajOutcome::Timeout;
  throw ParseError("unknown trajectory outcome '" + s + "'");
}

InflatedGrid::InflatedGrid(const WorldModel& world)
    : w_(world.width()), h_(world.height()), cells_(static_cast<std::size_t>(w_) * h_, 0) {
  const int r = static_cast<int>(std::ceil(kAstarInflation / kGridResolution));
  // Offsets whose cell centers fall within the inflation radius.
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (std::sqrt(dx * dx + dy * dy) * kGridResolution <= kAstarInflation + 1e-9)
        offsets.emplace_back(dx, dy);
  for (int cy = 0; cy < h_; ++cy) {
    for (int cx = 0; cx < w_; ++cx) {
      if (!world.occupied(cx, cy)) continue;
      for (auto [dx, dy] : offsets) {
        int nx = cx + dx, ny = cy + dy;
        if (nx >= 0 && ny >= 0 && nx < w_ && ny < h_)
          cells_[static_cast<std::size_t>(ny) * w_ + nx] = 1;
      }
    }
  }

  // Two-pass chamfer transform for clearance to the nearest blocked cell.
  const float kBig = 1e9f;
  const float kD1 = static_cast<float>(kGridResolution);
  const float kD2 = static_cast<float>(kGridResolution * std::sqrt(2.0));
  clearance_.assign(cells_.size(), kBig);
  auto at = [&](int x, int y) -> float& {
    return clearance_[static_cast<std::size_t>(y) * w_ + x];
  };
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x)
      if (cells_[static_cast<std::size_t>(y) * w_ + x]) at(x, y) = 0.0f;
  for (int y = 0; y < h_; ++y) {
    for (int x = 0; x < w_; ++x) {
      float& c = at(x, y);
      if (x > 0) c = std::min(c, at(x - 1, y) + kD1);
      if (y > 0) c = std::min(c, at(x, y - 1) + kD1);
      if (x > 0 && y > 0) c = std::min(c, at(x - 1, y - 1) + kD2);
      if (x + 1 < w_ && y > 0) c = std::min(c, at(x + 1, y - 1) + kD2);
    }
  }
  for (int y = h_ - 1; y >= 0; --y) {
    for (int x = w_ - 1; x >= 0; --x) {
      float& c = at(x, y);
      if (x + 1 < w_) c = std::min(c, at(x + 1, y) + kD1);
      if (y + 1 < h_) c = std::min(c, at(x, y + 1) + kD1);
      if (x + 1 < w_ && y + 1 < h_) c = std::min(c, at(x + 1, y + 1) + kD2);
      if (x > 0 && y + 1 < h_) c = std::min(c, at(x - 1, y + 1) + kD2);
    }
  }
}

namespace {

struct CellRef {
  double f;
  int idx;
  bool operator>(const CellRef& o) const { return f > o.f; }
};

Vec2 cell_center(int cx, int cy) {
  return {(cx + 0.5) * kGridResolution, (cy + 0.5) * kGridResolution};
}

// Nearest unblocked cell to a metric point, searched in rings.
std::pair<int, int> snap_free(const InflatedGrid& grid, const WorldModel& world, Vec2 p) {
  int cx = world.cell_x(p.x), cy = world.cell_y(p.y);
  if (!grid.blocked(cx, cy)) return {cx, cy};
  for (int r = 1; r <= 10; ++r) {
    std::pair<int, int> best{-1, -1};
    double best_d = 1e18;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        if (grid.blocked(cx + dx, cy + dy)) continue;
        double d = distance(cell_center(cx + dx, cy + dy), p);
        if (d < best_d) best_d = d, best = {cx + dx, cy + dy};
      }
    }
    if (best.first >= 0) return best;
  }
  throw PlanningError("no free planning cell near (" + std::to_string(p.x) + ", " +
                      std::to_string(p.y) + ")");
}

}  // namespace

std::vector<Vec2> grid_astar(const WorldModel& world, const InflatedGrid& grid, Vec2 start,
                             Vec2 goal) {
  auto [sx, sy] = snap_free(grid, world, start);
  auto [gx, gy] = snap_free(grid, world, goal);
  const int W = grid.width(), H = grid.height();
  const int start_idx = sy * W + sx, goal_idx = gy * W + gx;

  std::vector<double> g(static_cast<std::size_t>(W) * H, 1e18);
  std::vector<int> parent(static_cast<std::size_t>(W) * H, -1);
  std::priority_queue<CellRef, std::vector<CellRef>, std::greater<>> open;

  auto heuristic = [&](int idx) {
    int dx = std::abs(idx % W - gx), dy = std::abs(idx / W - gy);
    // Octile distance in cells.
    return (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy)) * kGridResolution;
  };

  g[start_idx] = 0.0;
  open.push({heuristic(start_idx), start_idx});
  const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    auto [f, idx] = open.top();
    open.pop();
    if (idx == goal_idx) break;
    if (f > g[idx] + heuristic(idx) + 1e-12) continue;  // stale entry
    int cx = idx % W, cy = idx / W;
    for (int k = 0; k < 8; ++k) {
      int nx = cx + dx8[k], ny = cy + dy8[k];
      if (grid.blocked(nx, ny)) continue;
      // No corner cutting: diagonal moves need both orthogonals free.
      if (k >= 4 && (grid.blocked(cx + dx8[k], cy) || grid.blocked(cx, cy + dy8[k]))) continue;
      // Wall-proximity surcharge keeps routes centered through doorways.
      constexpr double kComfort = 0.40;
      double hug = std::max(0.0, (kComfort - grid.clearance(nx, ny)) / kComfort);
      double cost = (k >= 4 ? std::sqrt(2.0) : 1.0) * kGridResolution * (1.0 + 3.0 * hug);
      int nidx = ny * W + nx;
      if (g[idx] + cost < g[nidx] - 1e-15) {
        g[nidx] = g[idx] + cost;
        parent[nidx] = idx;
        open.push({g[nidx] + heuristic(nidx), nidx});
      }
    }
  }
  if (g[goal_idx] >= 1e18)
    throw PlanningError("A*: no path between (" + std::to_string(start.x) + ", " +
                        std::to_string(start.y) + ") and (" + std::to_string(goal.x) + ", " +
                        std::to_string(goal.y) + ")");

  std::vector<Vec2> path;
  for (int idx = goal_idx; idx != -1; idx = parent[idx]) path.push_back(cell_center(idx % W, idx / W));
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Vec2> plan_metric_path(const WorldModel& world, const InflatedGrid& grid,
                                   const TopoMap& map, const NavPlan& plan) {
  std::vector<Vec2> path;
  for (std::size_t i = 0; i + 1 < plan.node_seq.size(); ++i) {
    Vec2 a = map.node(plan.node_seq[i]).position;
    Vec2 b = map.node(plan.node_seq[i + 1]).position;
    std::vector<Vec2> seg = grid_astar(world, grid, a, b);
    if (!path.empty() && !seg.empty()) path.pop_back();  // join at the shared node
    path.insert(path.end(), seg.begin(), seg.end());
  }
  if (path.empty())  // single-node plan: stand at the node
    path.push_back(map.node(plan.node_seq.front()).position);
  return path;
}

namespace {

VelocityCmd pursuit_command(const RobotState& state, const std::vector<Vec2>& path,
                            std::size_t closest_seg) {
  // Walk kPursuitLookahead meters of arc length from the projection point.
  Vec2 pos{state.x, state.y};
  double remaining = kPursuitLookahead;
  Vec2 target = path.back();
  Vec2 cursor = pos;
  for (std::size_t i = closest_seg; i + 1 < path.size(); ++i) {
    Vec2 a = (i == closest_seg) ? cursor : path[i];
    double seg_len = distance(a, path[i + 1]);
    if (seg_len >= remaining) {
      target = a + (path[i + 1] - a) * (remaining / std::max(seg_len, 1e-12));
      remaining = 0.0;
      break;
    }
    remaining -= seg_len;
  }

  double alpha = angle_diff(bearing(pos, target), state.theta);
  if (distance(pos, target) < 1e-6) alpha = 0.0;
  double v_p = kMaxLinearVel * std::max(0.0, std::cos(alpha));
  double v_theta = clamp(kPursuitGain * alpha, -kMaxAngularVel, kMaxAngularVel);
  return {v_p, v_theta};
}

std::size_t closest_segment(const std::vector<Vec2>& path, Vec2 pos, std::size_t from,
                            std::size_t to) {
  std::size_t best = from;
  double best_d = 1e18;
  for (std::size_t i = from; i < to && i + 1 <= path.size() - 1; ++i) {
    Vec2 a = path[i], b = path[i + 1];
    Vec2 ab = b - a;
    double len2 = std::max(ab.dot(ab), 1e-12);
    double t = clamp((pos - a).dot(ab) / len2, 0.0, 1.0);
    Vec2 proj = a + ab * t;
    double d = distance(pos, proj);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

VelocityCmd oracle_velocity(const WorldModel& /*world*/, const RobotState& state,
                            const std::vector<Vec2>& metric_path) {
  if (metric_path.empty()) throw PlanningError("oracle_velocity: empty metric path");
  if (metric_path.size() == 1) {
    double alpha = angle_diff(bearing({state.x, state.y}, metric_path[0]), state.theta);
    if (distance({state.x, state.y}, metric_path[0]) < 0.05) return {0.0, 0.0};
    return {kMaxLinearVel * std::max(0.0, std::cos(alpha)),
            clamp(kPursuitGain * alpha, -kMaxAngularVel, kMaxAngularVel)};
  }
  std::size_t seg = closest_segment(metric_path, {state.x, state.y}, 0, metric_path.size() - 1);
  return pursuit_command(state, metric_path, seg);
}

PursuitTracker::PursuitTracker(std::vector<Vec2> path) : path_(std::move(path)) {
  if (path_.empty()) throw PlanningError("PursuitTracker: empty metric path");
  arclen_.resize(path_.size(), 0.0);
  for (std::size_t i = 1; i < path_.size(); ++i)
    arclen_[i] = arclen_[i - 1] + distance(path_[i - 1], path_[i]);
}

VelocityCmd PursuitTracker::command(const RobotState& state) {
  if (path_.size() == 1) {
    Vec2 target = path_[0];
    if (distance({state.x, state.y}, target) < 0.05) return {0.0, 0.0};
    double alpha = angle_diff(bearing({state.x, state.y}, target), state.theta);
    return {kMaxLinearVel * std::max(0.0, std::cos(alpha)),
            clamp(kPursuitGain * alpha, -kMaxAngularVel, kMaxAngularVel)};
  }
  // Search a window ahead of the last progress point; never move backward.
  std::size_t hi = std::min(path_.size() - 1, progress_ + 60);
  std::size_t seg = closest_segment(path_, {state.x, state.y}, progress_, hi);
  progress_ = std::max(progress_, seg);
  return pursuit_command(state, path_, progress_);
}

double PursuitTracker::remaining_distance(const RobotState& state) const {
  double to_end = arclen_.back() - arclen_[std::min(progress_, arclen_.size() - 1)];
  return std::max(to_end, distance({state.x, state.y}, path_.back()));
}

Trajectory collect_trajectory(const WorldModel& world, const TopoMap& map, const NavTask& task,
                              Rng& rng, bool noise) {
  InflatedGrid grid(world);
  std::vector<Vec2> path = plan_metric_path(world, grid, map, task.plan);
  PursuitTracker tracker(path);

  Trajectory traj;
  traj.task = task;
  traj.map_id = task.map_id;
  traj.world_id = task.map_id;
  traj.outcome = TrajOutcome::Timeout;

  const TopoNode& start = map.node(task.start);
  RobotState state{start.position.x, start.position.y, 0.0, 0.0};
  // Face along the initial path direction (room nodes carry no orientation).
  if (start.orientation) {
    state.theta = *start.orientation;
  } else {
    double probe = std::min(0.4, 0.9 * distance(path.front(), path.back()));
    Vec2 ahead = path.back();
    for (std::size_t i = 1; i < path.size(); ++i) {
      if (distance(path[0], path[i]) >= probe) {
        ahead = path[i];
        break;
      }
    }
    state.theta = bearing(start.position, ahead);
  }

  NoiseState z;
  Vec2 goal_pos = map.node(task.goal).position;
  const int max_frames = static_cast<int>(kTrajectoryTimeout / kControlDt);

  for (int i = 0; i < max_frames; ++i) {
    Frame frame;
    frame.t = i * kControlDt;
    frame.pose = state;
    frame.scan = raycast_scan(world, state);

    if (distance({state.x, state.y}, goal_pos) < kGoalTolerance) {
      frame.cmd_expert = {0.0, 0.0};
      frame.cmd_executed = {0.0, 0.0};
      traj.frames.push_back(frame);
      traj.outcome = TrajOutcome::ReachedGoal;
      break;
    }

    VelocityCmd expert = tracker.command(state);
    VelocityCmd executed = expert;
    if (noise) {
      auto [nz, noisy] = inject_noise(z, expert, rng);
      z = nz;
      executed = noisy;
    }
    frame.cmd_expert = expert;
    frame.cmd_executed = executed;
    traj.frames.push_back(frame);

    StepResult r = step(world, state, executed);
    if (std::holds_alternative<CollisionEvent>(r)) {
      traj.outcome = TrajOutcome::Collision;
      break;
    }
    state = std::get<RobotState>(r);
  }
  return traj;
}

}  // namespace graphnav
