#pragma once

#include <array>

#include "graphnav/gln.hpp"

namespace graphnav {

/// One visuo-motor policy per behavior: a frame-stack MLP from the normalized
/// scan window to (v_p, v_theta).
struct PolicyParams {
  std::array<MlpParams, kNumBehaviors> nets;

  const MlpParams& net(BehaviorKind b) const { return nets[static_cast<int>(b)]; }
  MlpParams& net(BehaviorKind b) { return nets[static_cast<int>(b)]; }
};

struct PolicyConfig {
  int stack_depth = kScanStackDepth;
  std::vector<int> hidden{128, 128};
};

/// Policy output clamped into the command envelope: v_p in [0, 0.5] (the
/// expert never reverses), v_theta in [-1.5, 1.5].
VelocityCmd policy_forward(const PolicyParams& p, BehaviorKind behavior,
                           const ScanStack& stack);

/// Mean squared error over the two velocity components.
double bc_loss(const VelocityCmd& pred, const VelocityCmd& target);

struct BehaviorTrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  int min_frames = 50;  // smaller slices train anyway, with a warning flag
};

struct BehaviorTrainResult {
  MlpParams net;
  std::vector<double> loss_curve;  // mean training loss per epoch
  std::size_t frames = 0;
  bool sparse_warning = false;
};

/// Behavioral cloning on the frames tagged with `kind`: inputs are scan
/// stacks, targets the pre-noise expert commands. Throws QueryError when the
/// dataset contains no such frames.
BehaviorTrainResult train_behavior(BehaviorKind kind, const std::vector<Trajectory>& dataset,
                                   const PolicyConfig& pc, const BehaviorTrainConfig& tc);

/// Plan-following state: the last plan position confirmed by localization.
struct PlanCursor {
  NavPlan plan;
  std::size_t last_valid_index = 0;
};

struct Selection {
  bool arrived = false;
  BehaviorKind behavior = BehaviorKind::CorridorFollow;
};

/// Behavior lookup for a localization estimate. At the plan's final node the
/// selection signals arrival; off-plan estimates re-issue the behavior at the
/// last valid position. The cursor index never decreases.
Selection select_behavior(PlanCursor& cursor, int loc_node);

}  // namespace graphnav
