#include "graphnav/pfilter.hpp"

#include "graphnav/errors.hpp"

namespace graphnav {

Belief uniform_belief(const TopoMap& map) {
  return Belief(map.nodes().size(), 1.0 / static_cast<double>(map.nodes().size()));
}

Belief delta_belief(const TopoMap& map, int node_id) {
  Belief b(map.nodes().size(), 0.0);
  b[map.node_order(node_id)] = 1.0;
  return b;
}

Belief predict(const Belief& b, const TopoMap& map) {
  const std::size_t n = map.nodes().size();
  if (b.size() != n) throw ContractViolation("predict: belief size does not match map");
  Belief out(n, 0.0);
  for (const TopoNode& node : map.nodes()) {
    std::size_t i = map.node_order(node.id);
    double mass = b[i];
    if (mass == 0.0) continue;
    std::vector<int> next = map.out_neighbors(node.id);
    if (next.empty()) {
      out[i] += mass;  // sinks keep their mass
      continue;
    }
    out[i] += kSelfTransitionProb * mass;
    double share = (1.0 - kSelfTransitionProb) * mass / static_cast<double>(next.size());
    for (int w : next) out[map.node_order(w)] += share;
  }
  return out;
}

Belief node_likelihood(const LocEstimate& est, const TopoMap& map) {
  Belief score(map.nodes().size(), 0.0);
  for (const auto& [edge_id, prob] : est.probs)
    score[map.node_order(map.edge(edge_id).src)] += prob;
  for (double& s : score) s = std::max(s, kLikelihoodFloor);
  return score;
}

BeliefUpdate update(const Belief& b, const Belief& likelihood) {
  if (b.size() != likelihood.size())
    throw ContractViolation("update: likelihood size does not match belief");
  Belief posterior(b.size());
  double total = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    posterior[i] = b[i] * likelihood[i];
    total += posterior[i];
  }
  if (total < 1e-15) return {b, true};
  for (double& v : posterior) v /= total;
  return {std::move(posterior), false};
}

int map_estimate(const Belief& b, const TopoMap& map) {
  if (b.size() != map.nodes().size())
    throw ContractViolation("map_estimate: belief size does not match map");
  int best_id = 0;
  double best = -1.0;
  bool first = true;
  for (const TopoNode& node : map.nodes()) {
    double v = b[map.node_order(node.id)];
    if (first || v > best || (v == best && node.id < best_id)) {
      best = v;
      best_id = node.id;
      first = false;
    }
  }
  return best_id;
}

}  // namespace graphnav
