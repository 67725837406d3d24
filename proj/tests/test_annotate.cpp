#include <doctest.h>

#include <cmath>

#include "graphnav/annotate.hpp"
#include "graphnav/errors.hpp"
#include "graphnav/fixtures.hpp"
#include "graphnav/oracle_nav.hpp"

using namespace graphnav;

namespace {

// Rectangular-region test world: a ring wall plus labeled rects.
struct RegionSpec {
  double x0, y0, x1, y1;
  std::string label;
  SemClass cls;
};

WorldModel region_world(double ex, double ey, const std::vector<RegionSpec>& regions) {
  int w = static_cast<int>(std::round(ex / kGridResolution));
  int h = static_cast<int>(std::round(ey / kGridResolution));
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * h, 1);
  std::vector<std::uint16_t> ids(static_cast<std::size_t>(w) * h, 0);
  std::vector<RoomInfo> rooms;
  for (const RegionSpec& r : regions) rooms.push_back({r.label, r.cls});
  for (int cy = 0; cy < h; ++cy) {
    for (int cx = 0; cx < w; ++cx) {
      double px = (cx + 0.5) * kGridResolution;
      double py = (cy + 0.5) * kGridResolution;
      for (std::size_t k = 0; k < regions.size(); ++k) {
        const RegionSpec& r = regions[k];
        if (px >= r.x0 && px < r.x1 && py >= r.y0 && py < r.y1) {
          occ[static_cast<std::size_t>(cy) * w + cx] = 0;
          ids[static_cast<std::size_t>(cy) * w + cx] = static_cast<std::uint16_t>(k);
        }
      }
    }
  }
  return WorldModel(w, h, std::move(occ), std::move(ids), std::move(rooms));
}

Trajectory poses_to_traj(const std::vector<RobotState>& poses) {
  Trajectory traj;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    Frame f;
    f.t = i * kControlDt;
    f.pose = poses[i];
    f.pose.time = f.t;
    traj.frames.push_back(f);
  }
  return traj;
}

// Straight march along +x at fixed heading, step meters apart.
void march(std::vector<RobotState>& poses, double& x, double y, double theta, double dist,
           double step = 0.1) {
  int n = static_cast<int>(std::round(dist / step));
  for (int i = 0; i < n; ++i) {
    x += step;
    poses.push_back({x, y, theta, 0.0});
  }
}

}  // namespace

TEST_CASE("detect_behaviors: turn threshold is strictly greater than 40 degrees") {
  WorldModel world = region_world(12, 4, {{0.5, 0.5, 6.0, 3.5, "office_1", SemClass::Office},
                                          {6.0, 0.5, 11.5, 3.5, "hallway_0", SemClass::Hallway}});

  auto build = [&](double turn_rad) {
    std::vector<RobotState> poses;
    double x = 4.0;
    poses.push_back({x, 2.0, 0.0, 0.0});
    march(poses, x, 2.0, 0.0, 1.9);            // approach inside the office
    march(poses, x, 2.0, 0.0, 0.2);            // cross into the hallway
    poses.push_back({x + 0.1, 2.0, turn_rad, 0.0});  // single-step rotation
    double x2 = x + 0.1;
    march(poses, x2, 2.0, turn_rad, 1.0);      // keep going within the window
    Trajectory traj = poses_to_traj(poses);
    label_rooms(traj, world);
    detect_behaviors(traj, world);
    return traj;
  };

  // Exactly 40 degrees: not a turn; destination is a hallway so the
  // transition window reads corridor-follow.
  Trajectory at40 = build(deg2rad(40.0));
  bool any_turn = false;
  for (const Frame& f : at40.frames)
    if (f.labels.behavior == BehaviorKind::TurnLeft ||
        f.labels.behavior == BehaviorKind::TurnRight)
      any_turn = true;
  CHECK(!any_turn);

  // 45 degrees counter-clockwise within 1.5 m: a left turn near the door.
  Trajectory at45 = build(deg2rad(45.0));
  int turn_left = 0;
  for (const Frame& f : at45.frames)
    if (f.labels.behavior == BehaviorKind::TurnLeft) ++turn_left;
  CHECK(turn_left > 0);

  // Clockwise rotation tags a right turn instead.
  Trajectory right = build(-deg2rad(45.0));
  int turn_right = 0;
  for (const Frame& f : right.frames) {
    CHECK(f.labels.behavior != BehaviorKind::TurnLeft);
    if (f.labels.behavior == BehaviorKind::TurnRight) ++turn_right;
  }
  CHECK(turn_right > 0);
}

TEST_CASE("detect_behaviors: straight into a room, corridor-follow elsewhere") {
  WorldModel world = region_world(12, 4, {{0.5, 0.5, 6.0, 3.5, "hallway_0", SemClass::Hallway},
                                          {6.0, 0.5, 11.5, 3.5, "office_1", SemClass::Office}});
  std::vector<RobotState> poses;
  double x = 3.5;
  poses.push_back({x, 2.0, 0.0, 0.0});
  march(poses, x, 2.0, 0.0, 5.0);  // straight crossing, heading change 0
  Trajectory traj = poses_to_traj(poses);
  label_rooms(traj, world);
  detect_behaviors(traj, world);

  // Frames near the crossing carry straight; far-side hallway frames fall
  // back to corridor-follow; deep-office frames beyond the window stay bare.
  bool any_straight = false;
  for (const Frame& f : traj.frames) {
    if (f.labels.behavior == BehaviorKind::Straight) any_straight = true;
    if (f.labels.room == "hallway_0" && !f.labels.behavior) FAIL("untagged hallway frame");
  }
  CHECK(any_straight);
  CHECK(traj.frames.front().labels.behavior == BehaviorKind::CorridorFollow);
  CHECK(!traj.frames.back().labels.behavior.has_value());
}

TEST_CASE("detect_behaviors: find-door spans start to the room-hallway transition") {
  WorldModel world = region_world(12, 4, {{0.5, 0.5, 6.0, 3.5, "office_1", SemClass::Office},
                                          {6.0, 0.5, 11.5, 3.5, "hallway_0", SemClass::Hallway}});
  std::vector<RobotState> poses;
  double x = 2.0;
  poses.push_back({x, 2.0, 0.0, 0.0});
  march(poses, x, 2.0, 0.0, 3.9);  // inside the office
  march(poses, x, 2.0, 0.0, 4.0);  // into the hallway, no turning
  Trajectory traj = poses_to_traj(poses);
  label_rooms(traj, world);
  detect_behaviors(traj, world);

  // The room rasters decide the exact transition frame.
  std::size_t transition_at = 0;
  while (transition_at < traj.frames.size() &&
         traj.frames[transition_at].labels.room == "office_1")
    ++transition_at;
  REQUIRE(transition_at > 10);
  REQUIRE(transition_at + 10 < traj.frames.size());

  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    if (i < transition_at)
      CHECK(traj.frames[i].labels.behavior == BehaviorKind::FindDoor);
    else
      CHECK(traj.frames[i].labels.behavior == BehaviorKind::CorridorFollow);
  }
}

TEST_CASE("localize_nodes honors the 36-degree orientation rule") {
  // Chain n0 -> n1 -> n2 along +x, plus a diagonal node d with a 45-degree
  // out-edge. All in one hallway region.
  std::vector<TopoNode> nodes{
      {0, NodeKind::Hallway, false, {1.0, 0.0}, 0.0, "hallway_0"},
      {1, NodeKind::Hallway, false, {2.0, 0.0}, 0.0, "hallway_0"},
      {2, NodeKind::Hallway, false, {3.0, 0.0}, 0.0, "hallway_0"},
      {3, NodeKind::Hallway, false, {1.4, 0.3}, deg2rad(45.0), "hallway_0"},
      {4, NodeKind::Hallway, false, {2.4, 1.3}, deg2rad(45.0), "hallway_0"},
  };
  std::vector<TopoEdge> edges{
      {0, 0, 1, BehaviorKind::CorridorFollow},
      {1, 1, 2, BehaviorKind::CorridorFollow},
      {2, 3, 4, BehaviorKind::CorridorFollow},  // bearing 45 degrees
  };
  TopoMap map(nodes, edges);

  // Heading 30 degrees: within 36 of the chain's 0-degree edges; nearest
  // eligible node is n0.
  Trajectory t1 = poses_to_traj({{1.05, 0.1, deg2rad(30.0), 0.0}});
  t1.frames[0].labels.room = "hallway_0";
  localize_nodes(t1, map);
  CHECK(t1.frames[0].labels.node == 0);

  // Heading 40 degrees: chain nodes are ineligible (40 > 36), so the
  // next-nearest candidate with a 45-degree edge wins.
  Trajectory t2 = poses_to_traj({{1.05, 0.1, deg2rad(40.0), 0.0}});
  t2.frames[0].labels.room = "hallway_0";
  localize_nodes(t2, map);
  CHECK(t2.frames[0].labels.node == 3);
}

TEST_CASE("localize_nodes enforces same-room and neighbor continuity") {
  // office room node + door node + two hallway nodes.
  std::vector<TopoNode> nodes{
      {0, NodeKind::Room, false, {1.0, 1.0}, std::nullopt, "office_1"},
      {1, NodeKind::Room, true, {1.0, 2.0}, deg2rad(90.0), "office_1"},
      {2, NodeKind::Hallway, false, {1.6, 2.6}, 0.0, "hallway_0"},
      {3, NodeKind::Hallway, false, {2.8, 2.6}, 0.0, "hallway_0"},
      {4, NodeKind::Hallway, false, {4.0, 2.6}, 0.0, "hallway_0"},
  };
  std::vector<TopoEdge> edges{
      {0, 0, 1, BehaviorKind::FindDoor},
      {1, 1, 2, BehaviorKind::TurnRight},
      {2, 2, 3, BehaviorKind::CorridorFollow},
      {3, 3, 4, BehaviorKind::CorridorFollow},
  };
  TopoMap map(nodes, edges);

  // Inside the office the door node (nearer) wins only if it matches the
  // heading; a sideways heading falls back to the room node (any heading).
  Trajectory t = poses_to_traj({{1.0, 1.9, 0.0, 0.0}});
  t.frames[0].labels.room = "office_1";
  localize_nodes(t, map);
  CHECK(t.frames[0].labels.node == 0);  // door faces +y, heading is +x

  Trajectory t2 = poses_to_traj({{1.0, 1.9, deg2rad(90.0), 0.0}});
  t2.frames[0].labels.room = "office_1";
  localize_nodes(t2, map);
  CHECK(t2.frames[0].labels.node == 1);

  // Teleport three nodes ahead: rejected until continuity resumes.
  Trajectory t3 = poses_to_traj({
      {1.0, 1.0, 0.0, 0.0},          // room node 0
      {4.0, 2.6, 0.0, 0.0},          // node 4: not a neighbor of 0 -> gap
      {4.1, 2.6, 0.0, 0.0},          // still node 4 -> gap persists
      {1.1, 2.05, deg2rad(90.0), 0.0},  // door node 1: neighbor of 0 -> resume
      {1.7, 2.6, 0.0, 0.0},          // node 2
  });
  t3.frames[0].labels.room = "office_1";
  t3.frames[1].labels.room = "hallway_0";
  t3.frames[2].labels.room = "hallway_0";
  t3.frames[3].labels.room = "office_1";
  t3.frames[4].labels.room = "hallway_0";
  localize_nodes(t3, map);
  CHECK(t3.frames[0].labels.node == 0);
  CHECK(!t3.frames[1].labels.node.has_value());
  CHECK(!t3.frames[2].labels.node.has_value());
  CHECK(t3.frames[3].labels.node == 1);
  CHECK(t3.frames[4].labels.node == 2);
}

TEST_CASE("localize_edges labels runs with the connecting edge") {
  std::vector<TopoNode> nodes{
      {0, NodeKind::Hallway, false, {0.0, 0.0}, 0.0, "hallway_0"},
      {1, NodeKind::Hallway, false, {1.0, 0.0}, 0.0, "hallway_0"},
      {2, NodeKind::Hallway, false, {2.0, 0.0}, 0.0, "hallway_0"},
      {3, NodeKind::Hallway, false, {0.0, 1.0}, 0.0, "hallway_0"},
  };
  std::vector<TopoEdge> edges{{0, 0, 1, BehaviorKind::CorridorFollow},
                              {1, 1, 2, BehaviorKind::CorridorFollow}};
  TopoMap map(nodes, edges);

  // [A, A, A, B] -> first three frames carry edge A->B, terminal run bare.
  Trajectory t = poses_to_traj(std::vector<RobotState>(4));
  t.frames[0].labels.node = 0;
  t.frames[1].labels.node = 0;
  t.frames[2].labels.node = 0;
  t.frames[3].labels.node = 1;
  auto diags = localize_edges(t, map);
  CHECK(diags.empty());
  CHECK(t.frames[0].labels.edge == 0);
  CHECK(t.frames[1].labels.edge == 0);
  CHECK(t.frames[2].labels.edge == 0);
  CHECK(!t.frames[3].labels.edge.has_value());

  // Single-node trajectory: no edges.
  Trajectory single = poses_to_traj(std::vector<RobotState>(3));
  for (Frame& f : single.frames) f.labels.node = 2;
  CHECK(localize_edges(single, map).empty());
  for (const Frame& f : single.frames) CHECK(!f.labels.edge.has_value());

  // [A, A, C] with no A->C edge: diagnostic, frames stay untagged.
  Trajectory bad = poses_to_traj(std::vector<RobotState>(3));
  bad.frames[0].labels.node = 0;
  bad.frames[1].labels.node = 0;
  bad.frames[2].labels.node = 3;
  auto bad_diags = localize_edges(bad, map);
  REQUIRE(bad_diags.size() == 1);
  CHECK(bad_diags[0].from_node == 0);
  CHECK(bad_diags[0].to_node == 3);
  CHECK(!bad.frames[0].labels.edge.has_value());

  // Edge labels imply the node is the edge source.
  for (const Frame& f : t.frames)
    if (f.labels.edge) CHECK(map.edge(*f.labels.edge).src == *f.labels.node);
}

TEST_CASE("online gt_locate matches offline annotation frame by frame") {
  Fixture fx = gen_fixture_world(FixtureKind::Corridor, 11);
  std::vector<int> rooms;
  for (const TopoNode& n : fx.map.nodes())
    if (n.kind == NodeKind::Room && !n.is_door) rooms.push_back(n.id);

  NavTask task;
  task.map_id = fx.id;
  task.start = rooms[0];
  task.goal = rooms[3];
  task.plan = shortest_plan(fx.map, task.start, task.goal);
  Rng rng(2);
  Trajectory traj = collect_trajectory(fx.world, fx.map, task, rng, true);
  REQUIRE(traj.outcome == TrajOutcome::ReachedGoal);

  Trajectory offline = traj;
  annotate_trajectory(offline, fx.world, fx.map);

  GtLocator locator(fx.map, fx.world, task.plan);
  bool saw_arrival = false;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    GtLocator::Output out = locator.feed(traj.frames[i].pose);
    CHECK(out.node == offline.frames[i].labels.node);
    if (out.arrived) saw_arrival = true;
    if (out.behavior_on_plan) {
      // The plan edge from the current node exists and starts there.
      CHECK(fx.map.edge(*out.edge).src == *locator.current_node());
    }
  }
  CHECK(saw_arrival);

  // First frame localizes to the task start node.
  GtLocator fresh(fx.map, fx.world, task.plan);
  CHECK(fresh.feed(traj.frames[0].pose).node == task.start);
}

TEST_CASE("gt_locate raises the off-plan flag in rooms outside the plan") {
  Fixture fx = gen_fixture_world(FixtureKind::Corridor, 11);
  std::vector<int> rooms;
  for (const TopoNode& n : fx.map.nodes())
    if (n.kind == NodeKind::Room && !n.is_door) rooms.push_back(n.id);
  NavTask task;
  task.start = rooms[0];
  task.goal = rooms[1];
  task.plan = shortest_plan(fx.map, task.start, task.goal);

  // Drive toward a third room that is not on the plan.
  REQUIRE(rooms.size() >= 3);
  int other = -1;
  for (int r : rooms)
    if (std::find(task.plan.node_seq.begin(), task.plan.node_seq.end(), r) ==
        task.plan.node_seq.end())
      other = r;
  REQUIRE(other >= 0);

  NavTask detour;
  detour.start = task.start;
  detour.goal = other;
  detour.plan = shortest_plan(fx.map, detour.start, detour.goal);
  Rng rng(3);
  Trajectory traj = collect_trajectory(fx.world, fx.map, detour, rng, false);
  REQUIRE(traj.outcome == TrajOutcome::ReachedGoal);

  GtLocator locator(fx.map, fx.world, task.plan);  // plan says rooms[1]
  bool flagged = false;
  for (const Frame& f : traj.frames)
    if (locator.feed(f.pose).off_plan) flagged = true;
  CHECK(flagged);
}

TEST_CASE("annotation gate: oracle trajectories get dense node labels") {
  std::size_t frames = 0, tagged = 0, rooms_labeled = 0;
  std::vector<Fixture> fixtures;
  for (std::uint64_t seed : {31, 32}) {
    fixtures.push_back(gen_fixture_world(FixtureKind::Corridor, seed));
    fixtures.push_back(gen_fixture_world(FixtureKind::Loop, seed));
    fixtures.push_back(gen_fixture_world(FixtureKind::Tee, seed));
  }
  std::uint64_t seed = 40;
  for (Fixture& fx : fixtures) {
    ++seed;
    std::vector<int> rooms;
    for (const TopoNode& n : fx.map.nodes())
      if (n.kind == NodeKind::Room && !n.is_door) rooms.push_back(n.id);
    for (std::size_t a = 0; a < rooms.size(); ++a) {
      for (std::size_t b = 0; b < rooms.size(); ++b) {
        if (a == b) continue;
        NavTask task;
        task.map_id = fx.id;
        task.start = rooms[a];
        task.goal = rooms[b];
        task.plan = shortest_plan(fx.map, task.start, task.goal);
        Rng rng(seed * 100 + a * 10 + b);
        Trajectory traj = collect_trajectory(fx.world, fx.map, task, rng, true);
        annotate_trajectory(traj, fx.world, fx.map);
        AnnotationSummary s = summarize_annotation(traj);
        frames += s.frames;
        tagged += s.node_tagged;
        for (const Frame& f : traj.frames)
          if (!f.labels.room.empty()) ++rooms_labeled;
      }
    }
  }
  CHECK(rooms_labeled == frames);  // room labeling is total
  CHECK(static_cast<double>(tagged) / frames >= 0.95);

  // Determinism: annotating twice gives identical labels.
  Fixture fx = gen_fixture_world(FixtureKind::Corridor, 31);
  std::vector<int> rooms;
  for (const TopoNode& n : fx.map.nodes())
    if (n.kind == NodeKind::Room && !n.is_door) rooms.push_back(n.id);
  NavTask task;
  task.start = rooms[0];
  task.goal = rooms[2];
  task.plan = shortest_plan(fx.map, task.start, task.goal);
  Rng rng(9);
  Trajectory traj = collect_trajectory(fx.world, fx.map, task, rng, true);
  Trajectory t1 = traj, t2 = traj;
  annotate_trajectory(t1, fx.world, fx.map);
  annotate_trajectory(t2, fx.world, fx.map);
  for (std::size_t i = 0; i < t1.frames.size(); ++i) {
    CHECK(t1.frames[i].labels.node == t2.frames[i].labels.node);
    CHECK(t1.frames[i].labels.behavior == t2.frames[i].labels.behavior);
    CHECK(t1.frames[i].labels.edge == t2.frames[i].labels.edge);
  }
}
