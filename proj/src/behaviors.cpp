#include "graphnav/behaviors.hpp"

#include <algorithm>

#include "graphnav/errors.hpp"

namespace graphnav {

VelocityCmd policy_forward(const PolicyParams& p, BehaviorKind behavior,
                           const ScanStack& stack) {
  Vec raw = mlp_forward(p.net(behavior), stack.flatten());
  return {clamp(raw[0], 0.0, kMaxLinearVel), clamp(raw[1], -kMaxAngularVel, kMaxAngularVel)};
}

double bc_loss(const VelocityCmd& pred, const VelocityCmd& target) {
  double dp = pred.v_p - target.v_p;
  double dt = pred.v_theta - target.v_theta;
  return (dp * dp + dt * dt) / 2.0;
}

BehaviorTrainResult train_behavior(BehaviorKind kind, const std::vector<Trajectory>& dataset,
                                   const PolicyConfig& pc, const BehaviorTrainConfig& tc) {
  // Slice: frames tagged with this behavior; targets are pre-noise commands.
  std::vector<Vec> inputs;
  std::vector<VelocityCmd> targets;
  for (const Trajectory& traj : dataset) {
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
      if (traj.frames[i].labels.behavior != kind) continue;
      inputs.push_back(stack_at_frame(traj, i, pc.stack_depth).flatten());
      targets.push_back(traj.frames[i].cmd_expert);
    }
  }
  if (inputs.empty())
    throw QueryError(std::string("train_behavior: no frames tagged '") + to_string(kind) + "'");

  BehaviorTrainResult result;
  result.frames = inputs.size();
  result.sparse_warning = static_cast<int>(inputs.size()) < tc.min_frames;

  Rng rng = derive_stream(tc.seed, std::string("train-behavior/") + to_string(kind));
  std::vector<int> dims{pc.stack_depth * kScanRays};
  dims.insert(dims.end(), pc.hidden.begin(), pc.hidden.end());
  dims.push_back(2);
  result.net = make_mlp(dims, rng);

  AdamState adam;
  AdamHyper hyp;
  hyp.lr = tc.lr;
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    for (std::size_t i = order.size(); i-- > 1;)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);

    double epoch_loss = 0.0;
    for (std::size_t at = 0; at < order.size(); at += tc.batch_size) {
      std::size_t hi = std::min(order.size(), at + tc.batch_size);
      MlpParams grad = zeros_like(result.net);
      double scale = 1.0 / static_cast<double>(hi - at);
      for (std::size_t j = at; j < hi; ++j) {
        const Vec& x = inputs[order[j]];
        const VelocityCmd& t = targets[order[j]];
        MlpTape tape;
        Vec y = mlp_forward_taped(result.net, x, tape);
        epoch_loss += bc_loss({y[0], y[1]}, t);
        Vec dy{(y[0] - t.v_p) * scale, (y[1] - t.v_theta) * scale};
        mlp_backward(result.net, tape, dy, grad);
      }
      adam_step(result.net, grad, adam, hyp);
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(inputs.size()));
  }
  return result;
}

Selection select_behavior(PlanCursor& cursor, int loc_node) {
  const NavPlan& plan = cursor.plan;
  if (plan.node_seq.empty()) throw ContractViolation("select_behavior: empty plan");

  if (loc_node == plan.node_seq.back()) return {true, BehaviorKind::CorridorFollow};

  // Prefer the first match at or past the cursor; the cursor never moves
  // backward, so revisiting an earlier plan node re-issues its behavior
  // without rewinding progress.
  std::size_t match = plan.node_seq.size();
  for (std::size_t i = cursor.last_valid_index; i + 1 < plan.node_seq.size(); ++i) {
    if (plan.node_seq[i] == loc_node) {
      match = i;
      break;
    }
  }
  if (match == plan.node_seq.size()) {
    for (std::size_t i = 0; i < cursor.last_valid_index; ++i) {
      if (plan.node_seq[i] == loc_node) {
        return {false, plan.behavior_seq[i]};
      }
    }
    // Off plan entirely: keep the behavior from the last valid position.
    return {false, plan.behavior_seq[cursor.last_valid_index]};
  }
  cursor.last_valid_index = match;
  return {false, plan.behavior_seq[match]};
}

}  // namespace graphnav
