#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graphnav/rng.hpp"

namespace graphnav {

using Vec = std::vector<double>;

/// Row-major dense matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

/// Fully connected net: rectifier hidden activations, linear final layer.
struct MlpLayer {
  Mat W;  // out x in
  Vec b;
};

struct MlpParams {
  std::vector<MlpLayer> layers;

  int in_dim() const { return layers.empty() ? 0 : layers.front().W.cols; }
  int out_dim() const { return layers.empty() ? 0 : layers.back().W.rows; }
};

/// dims = {in, hidden..., out}; weights and biases uniform(-1/sqrt(fan_in), +).
MlpParams make_mlp(const std::vector<int>& dims, Rng& rng);

Vec mlp_forward(const MlpParams& p, const Vec& x);

/// Per-layer inputs recorded during the forward pass, for backprop.
struct MlpTape {
  std::vector<Vec> inputs;
};

Vec mlp_forward_taped(const MlpParams& p, const Vec& x, MlpTape& tape);

/// Accumulates parameter gradients into `grad` (same shapes as p) and returns
/// dloss/dx.
Vec mlp_backward(const MlpParams& p, const MlpTape& tape, const Vec& dy, MlpParams& grad);

MlpParams zeros_like(const MlpParams& p);

// --- Graph network ----------------------------------------------------------

/// The tuple G = (u, V, E): a global feature, per-node features, and per-edge
/// features with source/target node indices. Edge k runs src[k] -> dst[k].
struct GraphTensors {
  Vec u;
  std::vector<Vec> nodes;
  std::vector<Vec> edges;
  std::vector<int> src;
  std::vector<int> dst;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Update functions of one GN block. Input widths follow the concatenation
/// arithmetic: phi_e sees [e; v_dst; v_src; u], phi_v sees [ebar; v; u],
/// phi_u sees [esum; vsum; u].
struct GnBlockParams {
  MlpParams phi_e, phi_v, phi_u;
};

/// One full GN block pass: edge update, incoming-edge sum aggregation, node
/// update, global sums, global update. Nodes with no incoming edges aggregate
/// the zero vector.
GraphTensors gn_block_forward(const GnBlockParams& p, const GraphTensors& g);

// --- Localizer model --------------------------------------------------------

struct GnnConfig {
  int embed_dim = 32;    // node/edge embedding width (D)
  int global_dim = 32;   // encoder output width (D_u)
  int obs_dim = 320;     // encoder input (flattened scan stack)
  std::vector<int> encoder_hidden{64, 64, 64};
  std::vector<int> phi_hidden{64, 64, 64};
  int block1_dim = 32;      // width of block1's edge/node/global outputs
  int block2_aux_dim = 8;   // width of block2's unused node/global outputs

  bool operator==(const GnnConfig&) const = default;
};

/// Embedding tables, observation encoder, and two GN blocks; the second
/// block's edge update emits the per-edge logit.
struct GnnParams {
  GnnConfig config;
  Mat node_embed;  // kNumNodeKinds x D
  Mat edge_embed;  // kNumBehaviors x D
  MlpParams encoder;
  GnBlockParams block1, block2;
};

GnnParams init_gnn_params(const GnnConfig& config, Rng& rng);

/// Gradients are parameter-shaped.
using GradientSet = GnnParams;
GradientSet zeros_like(const GnnParams& p);

/// One localization classification instance: the subgraph structure (node
/// kinds, edge behaviors, local indices), the raw observation vector, and the
/// local index of the true edge.
struct GnnExample {
  std::vector<int> node_kinds;
  std::vector<int> edge_behaviors;
  std::vector<int> src;
  std::vector<int> dst;
  Vec obs;
  int true_edge = 0;
};

/// Initial tensors from the embedding tables plus a precomputed global u.
GraphTensors embed_graph(const GnnParams& p, const GnnExample& ex, Vec u);

/// Unnormalized per-edge scores: two GN blocks over the embedded graph, edge
/// order preserved.
Vec edge_logits(const GnnParams& p, const GraphTensors& g0);

Vec softmax(const Vec& logits);

/// Cross-entropy -log softmax(logits)[truth], computed with max subtraction.
/// Throws QueryError on an empty logit vector.
double softmax_ce_loss(const Vec& logits, int truth);

/// Mean loss over the batch and exact reverse-mode gradients for every
/// parameter (embedding tables and encoder included). Per-example gradients
/// may be computed on `workers` threads; partial sums combine in a fixed
/// chunk order, so results are bit-stable for a given worker count.
std::pair<double, GradientSet> loss_and_gradients(const GnnParams& p,
                                                  const std::vector<GnnExample>& batch,
                                                  int workers = 1);

// --- Adam -------------------------------------------------------------------

struct AdamHyper {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates, flattened across all tensors.
struct AdamState {
  Vec m, v;
  std::int64_t t = 0;
};

void adam_step(GnnParams& p, const GradientSet& g, AdamState& st, const AdamHyper& hyp = {});
void adam_step(MlpParams& p, const MlpParams& g, AdamState& st, const AdamHyper& hyp = {});

// --- Checkpoints ------------------------------------------------------------

void save_gnn_checkpoint(const std::string& path, const GnnParams& p);
GnnParams load_gnn_checkpoint(const std::string& path);

void save_mlp_checkpoint(const std::string& path, const MlpParams& p,
                         const std::string& role);
MlpParams load_mlp_checkpoint(const std::string& path, const std::string& expected_role);

}  // namespace graphnav
