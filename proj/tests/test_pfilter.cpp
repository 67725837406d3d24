#include <doctest.h>

#include <cmath>

#include "graphnav/fixtures.hpp"
#include "graphnav/pfilter.hpp"

using namespace graphnav;

namespace {

TopoNode hall_node(int id, double x, double y) {
  return {id, NodeKind::Hallway, false, {x, y}, 0.0, "hallway_0"};
}

// Dense transition matrix of the declared motion model, column-stochastic:
// T[v][w] = P(next = v | current = w).
std::vector<std::vector<double>> transition_matrix(const TopoMap& map) {
  const std::size_t n = map.nodes().size();
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  for (const TopoNode& node : map.nodes()) {
    std::size_t w = map.node_order(node.id);
    std::vector<int> next = map.out_neighbors(node.id);
    if (next.empty()) {
      T[w][w] = 1.0;
      continue;
    }
    T[w][w] = 0.8;
    for (int v : next) T[map.node_order(v)][w] += 0.2 / next.size();
  }
  return T;
}

// Forward-algorithm oracle: b' proportional to emission .* (T b).
Belief hmm_forward_step(const std::vector<std::vector<double>>& T, const Belief& b,
                        const Belief& emission) {
  const std::size_t n = b.size();
  Belief pred(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w) pred[v] += T[v][w] * b[w];
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    pred[v] *= emission[v];
    total += pred[v];
  }
  for (double& x : pred) x /= total;
  return pred;
}

}  // namespace

TEST_CASE("predict spreads 0.8/0.2 mass and respects sinks") {
  // A with out-neighbors {B, C}; D is a sink.
  std::vector<TopoNode> nodes{hall_node(0, 0, 0), hall_node(1, 1, 0), hall_node(2, 2, 0),
                              hall_node(3, 3, 0)};
  std::vector<TopoEdge> edges{{0, 0, 1, BehaviorKind::CorridorFollow},
                              {1, 0, 2, BehaviorKind::TurnLeft},
                              {2, 1, 3, BehaviorKind::CorridorFollow}};
  TopoMap map(nodes, edges);

  Belief delta = delta_belief(map, 0);
  Belief after = predict(delta, map);
  CHECK(after[map.node_order(0)] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(after[map.node_order(1)] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(after[map.node_order(2)] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(after[map.node_order(3)] == 0.0);

  // Sink keeps its full mass.
  Belief sink = predict(delta_belief(map, 3), map);
  CHECK(sink[map.node_order(3)] == 1.0);

  // Parallel edges to one node count once.
  std::vector<TopoEdge> dup{{0, 0, 1, BehaviorKind::CorridorFollow},
                            {1, 0, 1, BehaviorKind::TurnLeft}};
  TopoMap map2({hall_node(0, 0, 0), hall_node(1, 1, 0)}, dup);
  Belief spread = predict(delta_belief(map2, 0), map2);
  CHECK(spread[map2.node_order(1)] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("predict preserves mass and keeps a cycle uniform") {
  // Directed 5-cycle is vertex-transitive: uniform stays uniform.
  std::vector<TopoNode> nodes;
  std::vector<TopoEdge> edges;
  for (int i = 0; i < 5; ++i) nodes.push_back(hall_node(i, i, 0));
  for (int i = 0; i < 5; ++i) edges.push_back({i, i, (i + 1) % 5, BehaviorKind::CorridorFollow});
  TopoMap cycle(nodes, edges);

  Belief u = uniform_belief(cycle);
  Belief after = predict(u, cycle);
  for (double v : after) CHECK(v == doctest::Approx(0.2).epsilon(1e-14));

  Fixture fx = gen_fixture_world(FixtureKind::Tee, 3);
  Rng rng(5);
  Belief b = uniform_belief(fx.map);
  for (int step = 0; step < 10; ++step) {
    // Random-ish belief evolution keeps total mass at one.
    b = predict(b, fx.map);
    double total = 0.0;
    for (double v : b) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("node_likelihood aggregates outgoing edge probability with a floor") {
  std::vector<TopoNode> nodes{hall_node(0, 0, 0), hall_node(1, 1, 0), hall_node(2, 2, 0)};
  std::vector<TopoEdge> edges{{0, 0, 1, BehaviorKind::CorridorFollow},
                              {1, 0, 2, BehaviorKind::TurnLeft},
                              {2, 1, 2, BehaviorKind::CorridorFollow}};
  TopoMap map(nodes, edges);

  LocEstimate est;
  est.probs = {{0, 0.2}, {1, 0.3}, {2, 0.5}};
  est.edge_id = 2;
  est.node_id = 1;
  Belief like = node_likelihood(est, map);
  CHECK(like[map.node_order(0)] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(like[map.node_order(1)] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(like[map.node_order(2)] == kLikelihoodFloor);  // no outgoing crop edges

  // Scores over crop sources sum to one before flooring.
  double source_mass = like[map.node_order(0)] + like[map.node_order(1)];
  CHECK(source_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update applies Bayes rule and flags degeneracy") {
  std::vector<TopoNode> nodes{hall_node(0, 0, 0), hall_node(1, 1, 0)};
  std::vector<TopoEdge> edges{{0, 0, 1, BehaviorKind::CorridorFollow}};
  TopoMap map(nodes, edges);

  BeliefUpdate r = update({0.5, 0.5}, {0.9, 0.1});
  CHECK(!r.degenerate);
  CHECK(r.belief[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(r.belief[1] == doctest::Approx(0.1).epsilon(1e-15));

  // Uniform likelihood leaves the prior unchanged.
  BeliefUpdate u = update({0.3, 0.7}, {0.25, 0.25});
  CHECK(u.belief[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(u.belief[1] == doctest::Approx(0.7).epsilon(1e-15));

  // All-zero likelihood: prior returned, degeneracy flagged.
  BeliefUpdate d = update({0.3, 0.7}, {0.0, 0.0});
  CHECK(d.degenerate);
  CHECK(d.belief[0] == 0.3);
}

TEST_CASE("map_estimate takes the argmax with lowest-id ties") {
  std::vector<TopoNode> nodes{hall_node(3, 0, 0), hall_node(1, 1, 0), hall_node(2, 2, 0)};
  std::vector<TopoEdge> edges{{0, 3, 1, BehaviorKind::CorridorFollow},
                              {1, 1, 2, BehaviorKind::CorridorFollow}};
  TopoMap map(nodes, edges);

  CHECK(map_estimate(delta_belief(map, 2), map) == 2);

  Belief tie(3, 0.0);
  tie[map.node_order(3)] = 0.5;
  tie[map.node_order(2)] = 0.5;
  CHECK(map_estimate(tie, map) == 2);  // lower id wins the tie
}

TEST_CASE("predict/update equals the dense HMM forward oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    // Random directed graph on up to 20 nodes.
    int n = 2 + static_cast<int>(rng.uniform_int(19));
    std::vector<TopoNode> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(hall_node(i, i, 0));
    std::vector<TopoEdge> edges;
    int m = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(2 * n)));
    int eid = 0;
    for (int k = 0; k < m; ++k) {
      int s = static_cast<int>(rng.uniform_int(n));
      int d = static_cast<int>(rng.uniform_int(n));
      if (s == d) continue;
      BehaviorKind b = static_cast<BehaviorKind>(rng.uniform_int(kNumBehaviors));
      bool dup = false;
      for (const TopoEdge& e : edges)
        if (e.src == s && e.dst == d && e.behavior == b) dup = true;
      if (!dup) edges.push_back({eid++, s, d, b});
    }
    if (edges.empty()) edges.push_back({0, 0, 1, BehaviorKind::CorridorFollow});
    TopoMap map(nodes, edges);
    auto T = transition_matrix(map);

    Belief filter = uniform_belief(map);
    Belief oracle = filter;
    for (int step = 0; step < 3; ++step) {
      // Synthetic emission vector with the likelihood floor applied.
      Belief emission(map.nodes().size());
      for (double& e : emission) e = std::max(rng.uniform(0.0, 1.0), kLikelihoodFloor);

      Belief predicted = predict(filter, map);
      BeliefUpdate upd = update(predicted, emission);
      REQUIRE(!upd.degenerate);
      filter = upd.belief;
      oracle = hmm_forward_step(T, oracle, emission);

      for (std::size_t i = 0; i < filter.size(); ++i)
        CHECK(std::abs(filter[i] - oracle[i]) <= 1e-12);
    }
  }
}
