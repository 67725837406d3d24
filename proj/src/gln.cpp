#include "graphnav/gln.hpp"

#include <algorithm>
#include <cmath>

#include "graphnav/errors.hpp"

namespace graphnav {

Vec ScanStack::flatten() const {
  if (scans_.empty()) throw ContractViolation("ScanStack::flatten on an empty stack");
  Vec out;
  out.reserve(static_cast<std::size_t>(depth_) * kScanRays);
  int pad = depth_ - static_cast<int>(scans_.size());
  for (int i = 0; i < pad; ++i)
    for (double r : scans_.front().ranges) out.push_back(r / kScanMaxRange);
  for (const ScanObs& scan : scans_)
    for (double r : scan.ranges) out.push_back(r / kScanMaxRange);
  return out;
}

Vec encode_observation(const MlpParams& encoder, const ScanStack& stack) {
  return mlp_forward(encoder, stack.flatten());
}

GraphTensors build_tensors(const SubGraph& sub, const GnnParams& p, Vec u) {
  GnnExample ex;
  for (const TopoNode& n : sub.graph.nodes()) ex.node_kinds.push_back(static_cast<int>(n.kind));
  for (const TopoEdge& e : sub.graph.edges()) {
    ex.edge_behaviors.push_back(static_cast<int>(e.behavior));
    ex.src.push_back(e.src);
    ex.dst.push_back(e.dst);
  }
  return embed_graph(p, ex, std::move(u));
}

GnnExample subgraph_example(const SubGraph& sub, Vec obs, int true_parent_edge) {
  GnnExample ex;
  for (const TopoNode& n : sub.graph.nodes()) ex.node_kinds.push_back(static_cast<int>(n.kind));
  for (const TopoEdge& e : sub.graph.edges()) {
    ex.edge_behaviors.push_back(static_cast<int>(e.behavior));
    ex.src.push_back(e.src);
    ex.dst.push_back(e.dst);
  }
  ex.obs = std::move(obs);
  bool found = false;
  for (std::size_t k = 0; k < sub.edge_parent_ids.size(); ++k) {
    if (sub.edge_parent_ids[k] == true_parent_edge) {
      ex.true_edge = static_cast<int>(k);
      found = true;
      break;
    }
  }
  if (!found) throw ContractViolation("subgraph_example: true edge not inside the crop");
  return ex;
}

LocEstimate predict_edge(const GnnParams& p, const TopoMap& map, int last_node,
                         const ScanStack& stack, int ahead, int behind) {
  SubGraph sub = crop_subgraph(map, last_node, ahead, behind);
  if (sub.graph.edges().empty())
    throw QueryError("predict_edge: crop around node " + std::to_string(last_node) +
                     " has no edges");
  Vec u = encode_observation(p.encoder, stack);
  Vec logits = edge_logits(p, build_tensors(sub, p, std::move(u)));
  Vec prob = softmax(logits);

  LocEstimate est;
  int best = 0;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    est.probs.emplace_back(sub.edge_parent_ids[k], prob[k]);
    if (prob[k] > prob[best]) best = static_cast<int>(k);  // ties keep lowest parent id
  }
  est.edge_id = sub.edge_parent_ids[best];
  est.node_id = map.edge(est.edge_id).src;
  return est;
}

ScanStack stack_at_frame(const Trajectory& traj, std::size_t index, int depth) {
  ScanStack stack(depth);
  std::size_t first = index + 1 >= static_cast<std::size_t>(depth) ? index + 1 - depth : 0;
  for (std::size_t i = first; i <= index; ++i) stack.push(traj.frames[i].scan);
  return stack;
}

namespace {

// Nodes within two undirected hops, the source excluded.
std::vector<int> two_hop_neighbors(const TopoMap& map, int source) {
  std::vector<int> hop1 = map.out_neighbors(source);
  for (int eid : map.in_edges(source)) hop1.push_back(map.edge(eid).src);
  std::sort(hop1.begin(), hop1.end());
  hop1.erase(std::unique(hop1.begin(), hop1.end()), hop1.end());

  std::vector<int> result = hop1;
  for (int n : hop1) {
    std::vector<int> hop2 = map.out_neighbors(n);
    for (int eid : map.in_edges(n)) hop2.push_back(map.edge(eid).src);
    result.insert(result.end(), hop2.begin(), hop2.end());
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  result.erase(std::remove(result.begin(), result.end(), source), result.end());
  return result;
}

}  // namespace

std::vector<GnnExample> make_training_examples(const Trajectory& traj, const TopoMap& map,
                                               Rng& rng, int samples_per_frame,
                                               double own_source_prob) {
  std::vector<GnnExample> out;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    if (!traj.frames[i].labels.edge) continue;
    int true_edge = *traj.frames[i].labels.edge;
    int source = map.edge(true_edge).src;
    Vec obs = stack_at_frame(traj, i).flatten();
    std::vector<int> nearby = two_hop_neighbors(map, source);

    for (int s = 0; s < samples_per_frame; ++s) {
      int center = source;
      // Crop-center augmentation: sample until the crop keeps the true edge.
      for (int attempt = 0; attempt < 20; ++attempt) {
        if (rng.uniform() < own_source_prob || nearby.empty()) {
          center = source;
        } else {
          center = nearby[rng.uniform_int(nearby.size())];
        }
        if (crop_subgraph(map, center).contains_parent_edge(true_edge)) break;
        center = source;
      }
      out.push_back(subgraph_example(crop_subgraph(map, center), obs, true_edge));
    }
  }
  return out;
}

std::vector<GnnExample> make_eval_examples(const Trajectory& traj, const TopoMap& map) {
  std::vector<GnnExample> out;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    if (!traj.frames[i].labels.edge) continue;
    int true_edge = *traj.frames[i].labels.edge;
    SubGraph sub = crop_subgraph(map, map.edge(true_edge).src);
    out.push_back(subgraph_example(sub, stack_at_frame(traj, i).flatten(), true_edge));
  }
  return out;
}

namespace {

std::pair<double, double> dataset_loss_accuracy(const GnnParams& p,
                                                const std::vector<GnnExample>& set) {
  if (set.empty()) return {0.0, 0.0};
  double loss = 0.0;
  std::size_t correct = 0;
  for (const GnnExample& ex : set) {
    Vec u = mlp_forward(p.encoder, ex.obs);
    Vec logits = edge_logits(p, embed_graph(p, ex, std::move(u)));
    loss += softmax_ce_loss(logits, ex.true_edge);
    int best = 0;
    for (std::size_t k = 1; k < logits.size(); ++k)
      if (logits[k] > logits[best]) best = static_cast<int>(k);
    if (best == ex.true_edge) ++correct;
  }
  return {loss / set.size(), static_cast<double>(correct) / set.size()};
}

}  // namespace

GlnTrainResult train_gln(const GnnConfig& config, const std::vector<GnnExample>& train,
                         const std::vector<GnnExample>& val, const GlnTrainConfig& tc) {
  if (train.empty()) throw QueryError("train_gln: empty training set");
  Rng rng = derive_stream(tc.seed, "train-gln");
  GlnTrainResult result{init_gnn_params(config, rng), {}};
  AdamState adam;
  AdamHyper hyp;
  hyp.lr = tc.lr;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream.
    for (std::size_t i = order.size(); i-- > 1;)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);

    for (std::size_t at = 0; at < order.size(); at += tc.batch_size) {
      std::vector<GnnExample> batch;
      for (std::size_t j = at; j < std::min(order.size(), at + tc.batch_size); ++j)
        batch.push_back(train[order[j]]);
      auto [loss, grad] = loss_and_gradients(result.params, batch, tc.workers);
      (void)loss;
      adam_step(result.params, grad, adam, hyp);
    }

    GlnEpochStats stats;
    std::tie(stats.train_loss, stats.train_accuracy) =
        dataset_loss_accuracy(result.params, train);
    std::tie(stats.val_loss, stats.val_accuracy) = dataset_loss_accuracy(result.params, val);
    result.curve.push_back(stats);
  }
  return result;
}

double eval_localization_accuracy(const GnnParams& p, const std::vector<GnnExample>& examples) {
  if (examples.empty()) throw QueryError("eval_localization_accuracy: empty dataset");
  return dataset_loss_accuracy(p, examples).second;
}

}  // namespace graphnav
