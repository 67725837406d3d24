#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphnav/topomap.hpp"
#include "graphnav/worldsim.hpp"

namespace graphnav {

/// Per-frame annotation written by the labeling pipeline. If `edge` is set
/// then `node` is set and equals the edge's source.
struct AnnotationLabels {
  std::optional<BehaviorKind> behavior;
  std::optional<int> node;
  std::optional<int> edge;
  std::string room;
};

struct Frame {
  double t = 0.0;            // seconds, strictly increasing at 0.2 s steps
  RobotState pose;
  ScanObs scan;
  VelocityCmd cmd_expert;    // pre-noise controller output (training target)
  VelocityCmd cmd_executed;  // command actually applied in simulation
  AnnotationLabels labels;
};

enum class TrajOutcome { ReachedGoal, Collision, Timeout };
const char* to_string(TrajOutcome o);
TrajOutcome traj_outcome_from_string(const std::string& s);

struct Trajectory {
  std::vector<Frame> frames;
  NavTask task;
  std::string world_id;
  std::string map_id;
  TrajOutcome outcome = TrajOutcome::Timeout;
};

// --- Trajectory dataset I/O --------------------------------------------------
// One newline-delimited JSON record per frame plus a sidecar manifest holding
// the task, seeds, and world/map ids.

void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path, const TopoMap& map);

/// Writes manifest.json plus trajectories/NNNN.jsonl under `dir`.
void save_dataset(const std::string& dir, const std::vector<Trajectory>& trajs,
                  std::uint64_t master_seed);
std::vector<Trajectory> load_dataset(const std::string& dir, const TopoMap& map);

}  // namespace graphnav
