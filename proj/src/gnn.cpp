#include "graphnav/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "graphnav/errors.hpp"
#include "graphnav/topomap.hpp"

namespace graphnav {

MlpParams make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw ContractViolation("make_mlp: need at least in and out dims");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    MlpLayer layer;
    layer.W = Mat(dims[l + 1], dims[l]);
    layer.b.assign(static_cast<std::size_t>(dims[l + 1]), 0.0);
    double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    for (double& w : layer.W.a) w = rng.uniform(-bound, bound);
    for (double& b : layer.b) b = rng.uniform(-bound, bound);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

namespace {

void affine(const MlpLayer& layer, const Vec& x, Vec& out) {
  const int rows = layer.W.rows, cols = layer.W.cols;
  out.assign(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* w = &layer.W.a[static_cast<std::size_t>(r) * cols];
    double acc = layer.b[r];
    for (int c = 0; c < cols; ++c) acc += w[c] * x[c];
    out[r] = acc;
  }
}

}  // namespace

Vec mlp_forward(const MlpParams& p, const Vec& x) {
  if (static_cast<int>(x.size()) != p.in_dim())
    throw ContractViolation("mlp_forward: input dim " + std::to_string(x.size()) +
                            " != " + std::to_string(p.in_dim()));
  Vec cur = x, next;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    affine(p.layers[l], cur, next);
    if (l + 1 < p.layers.size())
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    cur.swap(next);
  }
  return cur;
}

Vec mlp_forward_taped(const MlpParams& p, const Vec& x, MlpTape& tape) {
  if (static_cast<int>(x.size()) != p.in_dim())
    throw ContractViolation("mlp_forward_taped: input dim mismatch");
  tape.inputs.clear();
  Vec cur = x, next;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    tape.inputs.push_back(cur);
    affine(p.layers[l], cur, next);
    if (l + 1 < p.layers.size())
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    cur.swap(next);
  }
  return cur;
}

Vec mlp_backward(const MlpParams& p, const MlpTape& tape, const Vec& dy, MlpParams& grad) {
  Vec delta = dy;
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    const MlpLayer& layer = p.layers[l];
    const Vec& input = tape.inputs[l];
    const int rows = layer.W.rows, cols = layer.W.cols;

    MlpLayer& glayer = grad.layers[l];
    for (int r = 0; r < rows; ++r) {
      double d = delta[r];
      glayer.b[r] += d;
      double* gw = &glayer.W.a[static_cast<std::size_t>(r) * cols];
      for (int c = 0; c < cols; ++c) gw[c] += d * input[c];
    }

    Vec dx(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r) {
      double d = delta[r];
      const double* w = &layer.W.a[static_cast<std::size_t>(r) * cols];
      for (int c = 0; c < cols; ++c) dx[c] += d * w[c];
    }
    // The layer below ends in a rectifier (subgradient 0 at the kink).
    if (l > 0) {
      for (int c = 0; c < cols; ++c)
        if (input[c] <= 0.0) dx[c] = 0.0;
    }
    delta.swap(dx);
  }
  return delta;
}

MlpParams zeros_like(const MlpParams& p) {
  MlpParams z;
  for (const MlpLayer& l : p.layers) {
    MlpLayer zl;
    zl.W = Mat(l.W.rows, l.W.cols);
    zl.b.assign(l.b.size(), 0.0);
    z.layers.push_back(std::move(zl));
  }
  return z;
}

namespace {

Vec concat3(const Vec& a, const Vec& b, const Vec& c) {
  Vec out;
  out.reserve(a.size() + b.size() + c.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

Vec concat4(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  Vec out;
  out.reserve(a.size() + b.size() + c.size() + d.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

void add_into(Vec& acc, const Vec& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

}  // namespace

GraphTensors gn_block_forward(const GnBlockParams& p, const GraphTensors& g) {
  const int n = g.num_nodes();
  const int m = g.num_edges();
  for (int k = 0; k < m; ++k)
    if (g.src[k] < 0 || g.src[k] >= n || g.dst[k] < 0 || g.dst[k] >= n)
      throw ContractViolation("gn_block_forward: edge index out of range");

  GraphTensors out;
  out.src = g.src;
  out.dst = g.dst;

  // Edge update: e'_k = phi_e([e_k; v_dst; v_src; u]).
  out.edges.resize(m);
  for (int k = 0; k < m; ++k)
    out.edges[k] = mlp_forward(p.phi_e, concat4(g.edges[k], g.nodes[g.dst[k]],
                                                g.nodes[g.src[k]], g.u));

  // Incoming-edge aggregation (empty sum is the zero vector), node update.
  const int de = p.phi_e.out_dim();
  std::vector<Vec> ebar(n, Vec(static_cast<std::size_t>(de), 0.0));
  for (int k = 0; k < m; ++k) add_into(ebar[g.dst[k]], out.edges[k]);
  out.nodes.resize(n);
  for (int i = 0; i < n; ++i)
    out.nodes[i] = mlp_forward(p.phi_v, concat3(ebar[i], g.nodes[i], g.u));

  // Global update from summed updated edges and nodes.
  Vec esum(static_cast<std::size_t>(de), 0.0);
  for (int k = 0; k < m; ++k) add_into(esum, out.edges[k]);
  Vec vsum(static_cast<std::size_t>(p.phi_v.out_dim()), 0.0);
  for (int i = 0; i < n; ++i) add_into(vsum, out.nodes[i]);
  out.u = mlp_forward(p.phi_u, concat3(esum, vsum, g.u));
  return out;
}

GnnParams init_gnn_params(const GnnConfig& c, Rng& rng) {
  GnnParams p;
  p.config = c;
  p.node_embed = Mat(kNumNodeKinds, c.embed_dim);
  p.edge_embed = Mat(kNumBehaviors, c.embed_dim);
  double bound = 1.0 / std::sqrt(static_cast<double>(c.embed_dim));
  for (double& w : p.node_embed.a) w = rng.uniform(-bound, bound);
  for (double& w : p.edge_embed.a) w = rng.uniform(-bound, bound);

  auto dims = [](int in, const std::vector<int>& hidden, int out) {
    std::vector<int> d{in};
    d.insert(d.end(), hidden.begin(), hidden.end());
    d.push_back(out);
    return d;
  };
  p.encoder = make_mlp(dims(c.obs_dim, c.encoder_hidden, c.global_dim), rng);

  const int D = c.embed_dim, Du = c.global_dim, D1 = c.block1_dim;
  p.block1.phi_e = make_mlp(dims(3 * D + Du, c.phi_hidden, D1), rng);
  p.block1.phi_v = make_mlp(dims(D1 + D + Du, c.phi_hidden, D1), rng);
  p.block1.phi_u = make_mlp(dims(2 * D1 + Du, c.phi_hidden, D1), rng);
  p.block2.phi_e = make_mlp(dims(4 * D1, c.phi_hidden, 1), rng);
  p.block2.phi_v = make_mlp(dims(1 + 2 * D1, c.phi_hidden, c.block2_aux_dim), rng);
  p.block2.phi_u = make_mlp(dims(1 + c.block2_aux_dim + D1, c.phi_hidden, c.block2_aux_dim),
                            rng);
  return p;
}

GradientSet zeros_like(const GnnParams& p) {
  GradientSet z;
  z.config = p.config;
  z.node_embed = Mat(p.node_embed.rows, p.node_embed.cols);
  z.edge_embed = Mat(p.edge_embed.rows, p.edge_embed.cols);
  z.encoder = zeros_like(p.encoder);
  z.block1 = {zeros_like(p.block1.phi_e), zeros_like(p.block1.phi_v),
              zeros_like(p.block1.phi_u)};
  z.block2 = {zeros_like(p.block2.phi_e), zeros_like(p.block2.phi_v),
              zeros_like(p.block2.phi_u)};
  return z;
}

GraphTensors embed_graph(const GnnParams& p, const GnnExample& ex, Vec u) {
  GraphTensors g;
  g.u = std::move(u);
  g.src = ex.src;
  g.dst = ex.dst;
  const int D = p.config.embed_dim;
  g.nodes.reserve(ex.node_kinds.size());
  for (int kind : ex.node_kinds) {
    const double* row = &p.node_embed.a[static_cast<std::size_t>(kind) * D];
    g.nodes.emplace_back(row, row + D);
  }
  g.edges.reserve(ex.edge_behaviors.size());
  for (int b : ex.edge_behaviors) {
    const double* row = &p.edge_embed.a[static_cast<std::size_t>(b) * D];
    g.edges.emplace_back(row, row + D);
  }
  return g;
}

Vec edge_logits(const GnnParams& p, const GraphTensors& g0) {
  GraphTensors g1 = gn_block_forward(p.block1, g0);
  GraphTensors g2 = gn_block_forward(p.block2, g1);
  Vec logits(g2.edges.size());
  for (std::size_t k = 0; k < g2.edges.size(); ++k) logits[k] = g2.edges[k][0];
  return logits;
}

Vec softmax(const Vec& logits) {
  if (logits.empty()) throw QueryError("softmax of empty logit vector");
  double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double softmax_ce_loss(const Vec& logits, int truth) {
  if (logits.empty()) throw QueryError("softmax_ce_loss: ground-truth edge absent (no logits)");
  if (truth < 0 || truth >= static_cast<int>(logits.size()))
    throw ContractViolation("softmax_ce_loss: truth index out of range");
  double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - mx);
  return std::log(total) - (logits[truth] - mx);
}

namespace {

// Forward with tapes and exact reverse pass for one example. Block 2's node
// and global updates never reach the loss, so they are skipped; their
// parameter gradients are exactly zero.
double example_loss_and_grad(const GnnParams& p, const GnnExample& ex, double scale,
                             GradientSet& grad) {
  const int n = static_cast<int>(ex.node_kinds.size());
  const int m = static_cast<int>(ex.edge_behaviors.size());
  const int D = p.config.embed_dim;
  const int D1 = p.config.block1_dim;

  // Forward.
  MlpTape enc_tape;
  Vec u0 = mlp_forward_taped(p.encoder, ex.obs, enc_tape);
  GraphTensors g0 = embed_graph(p, ex, u0);

  std::vector<MlpTape> e1_tapes(m);
  std::vector<Vec> e1(m);
  for (int k = 0; k < m; ++k)
    e1[k] = mlp_forward_taped(p.block1.phi_e,
                              concat4(g0.edges[k], g0.nodes[ex.dst[k]], g0.nodes[ex.src[k]], u0),
                              e1_tapes[k]);

  std::vector<Vec> ebar(n, Vec(static_cast<std::size_t>(D1), 0.0));
  for (int k = 0; k < m; ++k) add_into(ebar[ex.dst[k]], e1[k]);

  std::vector<MlpTape> v1_tapes(n);
  std::vector<Vec> v1(n);
  for (int i = 0; i < n; ++i)
    v1[i] = mlp_forward_taped(p.block1.phi_v, concat3(ebar[i], g0.nodes[i], u0), v1_tapes[i]);

  Vec esum(static_cast<std::size_t>(D1), 0.0);
  for (int k = 0; k < m; ++k) add_into(esum, e1[k]);
  Vec vsum(static_cast<std::size_t>(D1), 0.0);
  for (int i = 0; i < n; ++i) add_into(vsum, v1[i]);

  MlpTape u1_tape;
  Vec u1 = mlp_forward_taped(p.block1.phi_u, concat3(esum, vsum, u0), u1_tape);

  std::vector<MlpTape> logit_tapes(m);
  Vec logits(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    logits[k] = mlp_forward_taped(
        p.block2.phi_e, concat4(e1[k], v1[ex.dst[k]], v1[ex.src[k]], u1), logit_tapes[k])[0];

  double loss = softmax_ce_loss(logits, ex.true_edge);

  // Backward. dloss/dlogit = softmax - onehot, scaled by the batch weight.
  Vec prob = softmax(logits);
  std::vector<Vec> de1(m, Vec(static_cast<std::size_t>(D1), 0.0));
  std::vector<Vec> dv1(n, Vec(static_cast<std::size_t>(D1), 0.0));
  Vec du1(u1.size(), 0.0);
  for (int k = 0; k < m; ++k) {
    double dlogit = (prob[k] - (k == ex.true_edge ? 1.0 : 0.0)) * scale;
    Vec din = mlp_backward(p.block2.phi_e, logit_tapes[k], {dlogit}, grad.block2.phi_e);
    for (int j = 0; j < D1; ++j) {
      de1[k][j] += din[j];
      dv1[ex.dst[k]][j] += din[D1 + j];
      dv1[ex.src[k]][j] += din[2 * D1 + j];
      du1[j] += din[3 * D1 + j];
    }
  }

  Vec du0(u0.size(), 0.0);
  std::vector<Vec> dv0(n, Vec(static_cast<std::size_t>(D), 0.0));

  // Global update of block 1.
  {
    Vec din = mlp_backward(p.block1.phi_u, u1_tape, du1, grad.block1.phi_u);
    // din = [d esum; d vsum; d u0]
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < D1; ++j) de1[k][j] += din[j];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < D1; ++j) dv1[i][j] += din[D1 + j];
    for (std::size_t j = 0; j < du0.size(); ++j) du0[j] += din[2 * D1 + j];
  }

  // Node updates of block 1.
  std::vector<Vec> debar(n, Vec(static_cast<std::size_t>(D1), 0.0));
  for (int i = 0; i < n; ++i) {
    Vec din = mlp_backward(p.block1.phi_v, v1_tapes[i], dv1[i], grad.block1.phi_v);
    // din = [d ebar_i; d v0_i; d u0]
    for (int j = 0; j < D1; ++j) debar[i][j] += din[j];
    for (int j = 0; j < D; ++j) dv0[i][j] += din[D1 + j];
    for (std::size_t j = 0; j < du0.size(); ++j) du0[j] += din[D1 + D + j];
  }

  // Edge updates of block 1; the incoming aggregation routes debar by target.
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < D1; ++j) de1[k][j] += debar[ex.dst[k]][j];
    Vec din = mlp_backward(p.block1.phi_e, e1_tapes[k], de1[k], grad.block1.phi_e);
    // din = [d e0_k; d v0_dst; d v0_src; d u0]
    double* erow = &grad.edge_embed.a[static_cast<std::size_t>(ex.edge_behaviors[k]) * D];
    for (int j = 0; j < D; ++j) erow[j] += din[j];
    for (int j = 0; j < D; ++j) dv0[ex.dst[k]][j] += din[D + j];
    for (int j = 0; j < D; ++j) dv0[ex.src[k]][j] += din[2 * D + j];
    for (std::size_t j = 0; j < du0.size(); ++j) du0[j] += din[3 * D + j];
  }

  // Embedding tables and encoder.
  for (int i = 0; i < n; ++i) {
    double* nrow = &grad.node_embed.a[static_cast<std::size_t>(ex.node_kinds[i]) * D];
    for (int j = 0; j < D; ++j) nrow[j] += dv0[i][j];
  }
  mlp_backward(p.encoder, enc_tape, du0, grad.encoder);

  return loss;
}

void accumulate(GradientSet& into, const GradientSet& from);

template <class F>
void visit_tensor_pairs(MlpParams& a, const MlpParams& b, F&& f) {
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    f(a.layers[l].W.a, b.layers[l].W.a);
    f(a.layers[l].b, b.layers[l].b);
  }
}

template <class F>
void visit_tensor_pairs(GnnParams& a, const GnnParams& b, F&& f) {
  f(a.node_embed.a, b.node_embed.a);
  f(a.edge_embed.a, b.edge_embed.a);
  visit_tensor_pairs(a.encoder, b.encoder, f);
  visit_tensor_pairs(a.block1.phi_e, b.block1.phi_e, f);
  visit_tensor_pairs(a.block1.phi_v, b.block1.phi_v, f);
  visit_tensor_pairs(a.block1.phi_u, b.block1.phi_u, f);
  visit_tensor_pairs(a.block2.phi_e, b.block2.phi_e, f);
  visit_tensor_pairs(a.block2.phi_v, b.block2.phi_v, f);
  visit_tensor_pairs(a.block2.phi_u, b.block2.phi_u, f);
}

void accumulate(GradientSet& into, const GradientSet& from) {
  visit_tensor_pairs(into, from, [](Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  });
}

}  // namespace

std::pair<double, GradientSet> loss_and_gradients(const GnnParams& p,
                                                  const std::vector<GnnExample>& batch,
                                                  int workers) {
  if (batch.empty()) throw ContractViolation("loss_and_gradients: empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());

  workers = std::max(1, std::min<int>(workers, static_cast<int>(batch.size())));
  if (workers == 1) {
    GradientSet grad = zeros_like(p);
    double total = 0.0;
    for (const GnnExample& ex : batch) total += example_loss_and_grad(p, ex, scale, grad);
    return {total * scale, grad};
  }

  // Contiguous chunks; partial results combine in chunk order so the outcome
  // is deterministic for a fixed worker count.
  std::vector<std::future<std::pair<double, GradientSet>>> futures;
  const std::size_t chunk = (batch.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(batch.size(), lo + chunk);
    if (lo >= hi) break;
    futures.push_back(std::async(std::launch::async, [&, lo, hi] {
      GradientSet grad = zeros_like(p);
      double total = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        total += example_loss_and_grad(p, batch[i], scale, grad);
      return std::make_pair(total, grad);
    }));
  }
  double total = 0.0;
  GradientSet grad = zeros_like(p);
  for (auto& f : futures) {
    auto [t, g] = f.get();
    total += t;
    accumulate(grad, g);
  }
  return {total * scale, grad};
}

namespace {

void adam_update(Vec& param, const Vec& grad, Vec& m, Vec& v, std::size_t offset,
                 std::int64_t t, const AdamHyper& h) {
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    double g = grad[i];
    m[offset + i] = h.beta1 * m[offset + i] + (1.0 - h.beta1) * g;
    v[offset + i] = h.beta2 * v[offset + i] + (1.0 - h.beta2) * g * g;
    double mhat = m[offset + i] / bc1;
    double vhat = v[offset + i] / bc2;
    param[i] -= h.lr * mhat / (std::sqrt(vhat) + h.eps);
  }
}

template <class Params>
void adam_step_impl(Params& p, const Params& g, AdamState& st, const AdamHyper& h) {
  std::size_t total = 0;
  visit_tensor_pairs(p, g, [&](Vec& a, const Vec&) { total += a.size(); });
  if (st.m.size() != total) {
    st.m.assign(total, 0.0);
    st.v.assign(total, 0.0);
    st.t = 0;
  }
  ++st.t;
  std::size_t offset = 0;
  visit_tensor_pairs(p, g, [&](Vec& a, const Vec& b) {
    adam_update(a, b, st.m, st.v, offset, st.t, h);
    offset += a.size();
  });
}

}  // namespace

void adam_step(GnnParams& p, const GradientSet& g, AdamState& st, const AdamHyper& hyp) {
  adam_step_impl(p, g, st, hyp);
}

void adam_step(MlpParams& p, const MlpParams& g, AdamState& st, const AdamHyper& hyp) {
  adam_step_impl(p, g, st, hyp);
}

}  // namespace graphnav
