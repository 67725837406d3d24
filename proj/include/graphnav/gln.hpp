#pragma once

#include <deque>

#include "graphnav/gnn.hpp"
#include "graphnav/topomap.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

/// Depth-scan history window feeding the observation encoder.
inline constexpr int kScanStackDepth = 5;

/// The C most recent scans, most recent last. Until C scans have arrived the
/// earliest one is repeated to fill the window.
class ScanStack {
 public:
  explicit ScanStack(int depth = kScanStackDepth) : depth_(depth) {}

  void push(const ScanObs& scan) {
    scans_.push_back(scan);
    if (static_cast<int>(scans_.size()) > depth_) scans_.pop_front();
  }
  void reset() { scans_.clear(); }
  bool empty() const { return scans_.empty(); }
  int depth() const { return depth_; }

  /// Flattened window, oldest first, ranges normalized to [0, 1].
  Vec flatten() const;

 private:
  int depth_;
  std::deque<ScanObs> scans_;
};

/// Observation encoding: the normalized scan stack through the encoder MLP.
/// The result serves as the graph's global feature.
Vec encode_observation(const MlpParams& encoder, const ScanStack& stack);

/// Localization estimate in parent-map terms.
struct LocEstimate {
  int edge_id = 0;  // argmax edge (ties broken toward the lowest parent id)
  int node_id = 0;  // its source node
  std::vector<std::pair<int, double>> probs;  // parent edge id -> probability
};

/// Initial graph tensors for a subgraph: node features from the kind table,
/// edge features from the behavior table, indices local, global feature u.
GraphTensors build_tensors(const SubGraph& sub, const GnnParams& p, Vec u);

/// Classification instance for a subgraph with a known true edge (parent id).
GnnExample subgraph_example(const SubGraph& sub, Vec obs, int true_parent_edge);

/// One localization step: crop around the last estimate, encode the scans,
/// score the subgraph's edges, and return the argmax edge with the full
/// distribution mapped back to parent ids. Throws QueryError when the crop
/// has no edges.
LocEstimate predict_edge(const GnnParams& p, const TopoMap& map, int last_node,
                         const ScanStack& stack, int ahead = 3, int behind = 2);

/// Scan stack for frame `index` of a trajectory (scans of the preceding
/// frames, padded at the episode start).
ScanStack stack_at_frame(const Trajectory& traj, std::size_t index,
                         int depth = kScanStackDepth);

/// Training examples from an annotated trajectory: every edge-labeled frame
/// yields `samples_per_frame` instances whose crop center is the true edge's
/// source with probability `own_source_prob`, otherwise a node within two
/// hops of it, resampled until the crop contains the true edge.
std::vector<GnnExample> make_training_examples(const Trajectory& traj, const TopoMap& map,
                                               Rng& rng, int samples_per_frame = 1,
                                               double own_source_prob = 0.5);

/// Evaluation convention: crop centered at the true source, no augmentation.
std::vector<GnnExample> make_eval_examples(const Trajectory& traj, const TopoMap& map);

struct GlnTrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct GlnEpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct GlnTrainResult {
  GnnParams params;
  std::vector<GlnEpochStats> curve;
};

/// Shuffled mini-batch Adam on the edge-classification loss. Deterministic
/// for a fixed (seed, worker count).
GlnTrainResult train_gln(const GnnConfig& config, const std::vector<GnnExample>& train,
                         const std::vector<GnnExample>& val, const GlnTrainConfig& tc);

/// Fraction of examples whose argmax edge equals the true edge. Throws
/// QueryError on an empty dataset.
double eval_localization_accuracy(const GnnParams& p, const std::vector<GnnExample>& examples);

}  // namespace graphnav
