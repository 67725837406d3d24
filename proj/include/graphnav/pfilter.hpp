#pragma once

#include "graphnav/gln.hpp"
#include "graphnav/topomap.hpp"

namespace graphnav {

/// Probability distribution over all map nodes, in map node order.
using Belief = std::vector<double>;

inline constexpr double kLikelihoodFloor = 1e-6;
inline constexpr double kSelfTransitionProb = 0.8;

Belief uniform_belief(const TopoMap& map);
Belief delta_belief(const TopoMap& map, int node_id);

/// Motion step: mass stays put with probability 0.8 and spreads equally over
/// the node's distinct out-neighbors otherwise. A node without out-neighbors
/// keeps its full mass. Preserves total probability exactly (columns of the
/// implied transition matrix sum to one).
Belief predict(const Belief& b, const TopoMap& map);

/// Per-node measurement score: the summed probability of the node's outgoing
/// edges in the localization estimate, floored at kLikelihoodFloor so a
/// confident-but-wrong network cannot zero out the posterior.
Belief node_likelihood(const LocEstimate& est, const TopoMap& map);

struct BeliefUpdate {
  Belief belief;
  bool degenerate = false;  // total mass vanished; prior returned unchanged
};

/// Measurement step: pointwise product with the likelihood, renormalized.
BeliefUpdate update(const Belief& b, const Belief& likelihood);

/// Most probable node; exact ties resolve to the lowest node id.
int map_estimate(const Belief& b, const TopoMap& map);

}  // namespace graphnav
