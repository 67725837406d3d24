#pragma once

#include <array>
#include <optional>

#include "graphnav/annotate.hpp"
#include "graphnav/behaviors.hpp"
#include "graphnav/oracle_nav.hpp"
#include "graphnav/pfilter.hpp"

namespace graphnav {

inline constexpr int kDeviationFrames = 25;  // 5 s of off-plan ground truth

enum class Variant { GraphNav, GraphNavPF, Gtl };
const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

enum class RunOutcome { Success, Collision, Deviation, Timeout };
const char* to_string(RunOutcome o);
RunOutcome run_outcome_from_string(const std::string& s);

struct RunFrameLog {
  double t = 0.0;
  RobotState pose;
  BehaviorKind selected = BehaviorKind::CorridorFollow;
  int predicted_node = -1;
  std::optional<int> gt_node;
  std::optional<BehaviorKind> gt_behavior;
  bool gt_off_plan = false;
  VelocityCmd cmd;
};

struct RunRecord {
  NavTask task;
  Variant variant = Variant::Gtl;
  bool oracle_policies = false;
  RunOutcome outcome = RunOutcome::Timeout;
  int nodes_reached = 0;  // longest in-order plan prefix the GT localizer saw
  std::vector<RunFrameLog> frames;

  double plan_completion() const {
    return static_cast<double>(nodes_reached) / static_cast<double>(task.plan.node_seq.size());
  }
};

/// Uniformly sampled distinct reachable (start, goal) pairs with plans of at
/// least `min_nodes` nodes. Throws QueryError when fewer than n such pairs
/// exist. `room_starts` restricts starts to room nodes (the shape of the
/// training data collection).
std::vector<NavTask> sample_tasks(const TopoMap& map, const std::string& map_id, int n,
                                  Rng& rng, std::size_t min_nodes = 2,
                                  bool room_starts = false);

struct RunOptions {
  Variant variant = Variant::Gtl;
  bool oracle_policies = false;
  const GnnParams* gln = nullptr;          // GraphNav / GraphNavPF
  const PolicyParams* policies = nullptr;  // required unless oracle_policies
  const InflatedGrid* grid = nullptr;      // reused across runs when provided
  int crop_ahead = 3;
  int crop_behind = 2;
};

/// Closed navigation loop at 5 Hz: localize (per variant), select a behavior
/// from the plan, command the robot, step the world. Terminates on
/// ground-truth arrival (Success), collision, 5 s of off-plan ground truth
/// (Deviation), or the 120 s timeout. The first localization is seeded with
/// the ground-truth start node.
RunRecord run_navigation(const WorldModel& world, const TopoMap& map, const NavTask& task,
                         const RunOptions& options);

struct BehaviorCell {
  int attempts = 0;
  int successes = 0;
};

struct PredictionCell {
  std::size_t frames = 0;
  std::size_t correct = 0;
};

struct DifficultyCell {
  int runs = 0;
  int successes = 0;
  double pc_sum = 0.0;
};

struct EvalReport {
  std::array<BehaviorCell, kNumBehaviors> behavior{};
  std::array<PredictionCell, kNumBehaviors> prediction{};
  std::array<DifficultyCell, 3> difficulty{};
  int runs = 0;
  int successes = 0;
  double pc_sum = 0.0;

  double success_rate() const { return runs ? static_cast<double>(successes) / runs : 0.0; }
  double mean_completion() const { return runs ? pc_sum / runs : 0.0; }
};

/// Success rates, plan completion, per-behavior attempt accounting (a plan
/// edge is attempted once its source node was reached, successful once its
/// target was reached), and behavior prediction accuracy against the online
/// ground-truth lookup.
EvalReport compute_metrics(const std::vector<RunRecord>& records);

// --- Run record I/O ----------------------------------------------------------

void save_run_records(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> load_run_records(const std::string& path, const TopoMap& map);

/// Writes report.txt (the tabular layout), report.json, and per-run SVG
/// overlays of the driven path on the world.
void render_report(const WorldModel& world, const TopoMap& map,
                   const std::vector<RunRecord>& records, const std::string& out_dir,
                   int svg_limit = 24);

}  // namespace graphnav
