#include "graphnav/evalsuite.hpp"

#include <algorithm>

#include "graphnav/errors.hpp"
#include "graphnav/gln.hpp"

namespace graphnav {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::GraphNav: return "graphnav";
    case Variant::GraphNavPF: return "graphnavpf";
    case Variant::Gtl: return "gtl";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "graphnav") return Variant::GraphNav;
  if (s == "graphnavpf") return Variant::GraphNavPF;
  if (s == "gtl") return Variant::Gtl;
  throw ParseError("unknown variant '" + s + "'");
}

const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::Success: return "success";
    case RunOutcome::Collision: return "collision";
    case RunOutcome::Deviation: return "deviation";
    case RunOutcome::Timeout: return "timeout";
  }
  return "?";
}

RunOutcome run_outcome_from_string(const std::string& s) {
  if (s == "success") return RunOutcome::Success;
  if (s == "collision") return RunOutcome::Collision;
  if (s == "deviation") return RunOutcome::Deviation;
  if (s == "timeout") return RunOutcome::Timeout;
  throw ParseError("unknown run outcome '" + s + "'");
}

std::vector<NavTask> sample_tasks(const TopoMap& map, const std::string& map_id, int n,
                                  Rng& rng, std::size_t min_nodes, bool room_starts) {
  // Enumerate the eligible pairs, then take a shuffled prefix: tasks are
  // uniform over eligible pairs and never repeat.
  std::vector<std::pair<int, int>> pairs;
  for (const TopoNode& a : map.nodes()) {
    if (room_starts && !(a.kind == NodeKind::Room && !a.is_door)) continue;
    for (const TopoNode& b : map.nodes()) {
      if (a.id == b.id) continue;
      pairs.emplace_back(a.id, b.id);
    }
  }

  std::vector<NavTask> eligible;
  for (auto [s, g] : pairs) {
    try {
      NavPlan plan = shortest_plan(map, s, g);
      if (plan.node_seq.size() < min_nodes) continue;
      NavTask task;
      task.map_id = map_id;
      task.start = s;
      task.goal = g;
      task.band = difficulty(plan);
      task.plan = std::move(plan);
      eligible.push_back(std::move(task));
    } catch (const PlanningError&) {
      continue;  // unreachable pair
    }
  }
  if (static_cast<int>(eligible.size()) < n)
    throw QueryError("sample_tasks: only " + std::to_string(eligible.size()) +
                     " reachable pairs, " + std::to_string(n) + " requested");

  for (std::size_t i = eligible.size(); i-- > 1;)
    std::swap(eligible[i], eligible[rng.uniform_int(i + 1)]);
  eligible.resize(static_cast<std::size_t>(n));
  return eligible;
}

RunRecord run_navigation(const WorldModel& world, const TopoMap& map, const NavTask& task,
                         const RunOptions& options) {
  const bool learned = options.variant != Variant::Gtl;
  if (learned && options.gln == nullptr)
    throw ContractViolation("run_navigation: variant requires a localizer checkpoint");
  if (!options.oracle_policies && options.policies == nullptr)
    throw ContractViolation("run_navigation: learned policies requested but missing");

  RunRecord record;
  record.task = task;
  record.variant = options.variant;
  record.oracle_policies = options.oracle_policies;
  record.outcome = RunOutcome::Timeout;

  // The oracle controller (and the start heading) follow the expert's metric
  // path through the plan's nodes.
  std::optional<InflatedGrid> own_grid;
  const InflatedGrid* grid = options.grid;
  if (grid == nullptr) {
    own_grid.emplace(world);
    grid = &*own_grid;
  }
  std::vector<Vec2> metric_path = plan_metric_path(world, *grid, map, task.plan);
  PursuitTracker tracker(metric_path);

  const TopoNode& start = map.node(task.start);
  RobotState state{start.position.x, start.position.y, 0.0, 0.0};
  if (start.orientation) {
    state.theta = *start.orientation;
  } else {
    double probe = std::min(0.4, 0.9 * distance(metric_path.front(), metric_path.back()));
    Vec2 ahead = metric_path.back();
    for (std::size_t i = 1; i < metric_path.size(); ++i) {
      if (distance(metric_path[0], metric_path[i]) >= probe) {
        ahead = metric_path[i];
        break;
      }
    }
    state.theta = bearing(start.position, ahead);
  }

  GtLocator gt(map, world, task.plan);
  ScanStack stack;
  PlanCursor cursor{task.plan, 0};
  Belief belief = options.variant == Variant::GraphNavPF ? delta_belief(map, task.start)
                                                        : Belief{};
  int last_pred = task.start;
  std::size_t prefix = 0;  // index into node_seq of the last confirmed node
  int deviation_streak = 0;
  const int max_frames = static_cast<int>(kTrajectoryTimeout / kControlDt);

  for (int i = 0; i < max_frames; ++i) {
    stack.push(raycast_scan(world, state));
    GtLocator::Output gt_out = gt.feed(state);

    if (gt_out.node && prefix + 1 < task.plan.node_seq.size() &&
        *gt_out.node == task.plan.node_seq[prefix + 1])
      ++prefix;

    // Localization estimate for behavior selection. The first tick uses the
    // provided ground-truth start location in every variant.
    int loc = task.start;
    if (i > 0) {
      switch (options.variant) {
        case Variant::GraphNav: {
          LocEstimate est =
              predict_edge(*options.gln, map, last_pred, stack, options.crop_ahead,
                           options.crop_behind);
          loc = est.node_id;
          last_pred = loc;
          break;
        }
        case Variant::GraphNavPF: {
          LocEstimate est =
              predict_edge(*options.gln, map, last_pred, stack, options.crop_ahead,
                           options.crop_behind);
          belief = predict(belief, map);
          BeliefUpdate upd = update(belief, node_likelihood(est, map));
          belief = upd.belief;
          loc = map_estimate(belief, map);
          last_pred = loc;
          break;
        }
        case Variant::Gtl:
          loc = gt.current_node().value_or(last_pred);
          last_pred = loc;
          break;
      }
    }

    Selection sel = select_behavior(cursor, loc);
    BehaviorKind behavior =
        sel.arrived ? cursor.plan.behavior_seq[cursor.last_valid_index] : sel.behavior;
    VelocityCmd cmd = options.oracle_policies
                          ? tracker.command(state)
                          : policy_forward(*options.policies, behavior, stack);

    RunFrameLog log;
    log.t = i * kControlDt;
    log.pose = state;
    log.selected = behavior;
    log.predicted_node = loc;
    log.gt_node = gt_out.node;
    log.gt_behavior = gt_out.behavior_on_plan;
    log.gt_off_plan = gt_out.off_plan;
    log.cmd = cmd;
    record.frames.push_back(log);

    // Success is decided by the ground-truth localizer, never the prediction.
    if (gt_out.arrived) {
      record.outcome = RunOutcome::Success;
      prefix = task.plan.node_seq.size() - 1;
      break;
    }

    if (gt_out.node) {
      deviation_streak = gt_out.off_plan ? deviation_streak + 1 : 0;
      if (deviation_streak > kDeviationFrames) {
        record.outcome = RunOutcome::Deviation;
        break;
      }
    }

    StepResult step_result = step(world, state, cmd);
    if (std::holds_alternative<CollisionEvent>(step_result)) {
      record.outcome = RunOutcome::Collision;
      break;
    }
    state = std::get<RobotState>(step_result);
  }

  record.nodes_reached = static_cast<int>(prefix) + 1;
  return record;
}

EvalReport compute_metrics(const std::vector<RunRecord>& records) {
  if (records.empty()) throw QueryError("compute_metrics: no run records");
  EvalReport report;
  for (const RunRecord& record : records) {
    ++report.runs;
    bool success = record.outcome == RunOutcome::Success;
    if (success) ++report.successes;
    double pc = record.plan_completion();
    report.pc_sum += pc;

    DifficultyCell& cell = report.difficulty[static_cast<int>(record.task.band)];
    ++cell.runs;
    if (success) ++cell.successes;
    cell.pc_sum += pc;

    // A plan edge is attempted once its source was reached in order, and
    // succeeds once its target was also reached.
    const NavPlan& plan = record.task.plan;
    for (std::size_t e = 0; e < plan.edge_seq.size(); ++e) {
      if (record.nodes_reached <= static_cast<int>(e)) break;
      BehaviorCell& bc = report.behavior[static_cast<int>(plan.behavior_seq[e])];
      ++bc.attempts;
      if (record.nodes_reached > static_cast<int>(e) + 1) ++bc.successes;
    }

    for (const RunFrameLog& frame : record.frames) {
      if (!frame.gt_behavior) continue;
      PredictionCell& pc_cell = report.prediction[static_cast<int>(*frame.gt_behavior)];
      ++pc_cell.frames;
      if (frame.selected == *frame.gt_behavior) ++pc_cell.correct;
    }
  }
  return report;
}

}  // namespace graphnav
