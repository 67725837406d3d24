#include <fstream>

#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/gnn.hpp"

namespace graphnav {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kCheckpointVersion = 1;

ordered_json mat_to_json(const Mat& m) {
  ordered_json j;
  j["shape"] = {m.rows, m.cols};
  j["data"] = m.a;
  return j;
}

Mat mat_from_json(const ordered_json& j, const std::string& name) {
  Mat m;
  m.rows = j.at("shape")[0].get<int>();
  m.cols = j.at("shape")[1].get<int>();
  m.a = j.at("data").get<Vec>();
  if (m.a.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw StructureError("checkpoint tensor '" + name + "': data size does not match shape");
  return m;
}

ordered_json mlp_to_json(const MlpParams& p) {
  ordered_json layers = ordered_json::array();
  for (const MlpLayer& l : p.layers) {
    ordered_json jl;
    jl["W"] = mat_to_json(l.W);
    jl["b"] = l.b;
    layers.push_back(jl);
  }
  ordered_json j;
  j["layers"] = layers;
  return j;
}

MlpParams mlp_from_json(const ordered_json& j, const std::string& name) {
  MlpParams p;
  for (const auto& jl : j.at("layers")) {
    MlpLayer l;
    l.W = mat_from_json(jl.at("W"), name + ".W");
    l.b = jl.at("b").get<Vec>();
    if (l.b.size() != static_cast<std::size_t>(l.W.rows))
      throw StructureError("checkpoint tensor '" + name + "': bias size mismatch");
    if (!p.layers.empty() && p.layers.back().W.rows != l.W.cols)
      throw StructureError("checkpoint tensor '" + name + "': layer dims do not chain");
    p.layers.push_back(std::move(l));
  }
  return p;
}

ordered_json config_to_json(const GnnConfig& c) {
  ordered_json j;
  j["embed_dim"] = c.embed_dim;
  j["global_dim"] = c.global_dim;
  j["obs_dim"] = c.obs_dim;
  j["encoder_hidden"] = c.encoder_hidden;
  j["phi_hidden"] = c.phi_hidden;
  j["block1_dim"] = c.block1_dim;
  j["block2_aux_dim"] = c.block2_aux_dim;
  return j;
}

GnnConfig config_from_json(const ordered_json& j) {
  GnnConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.global_dim = j.at("global_dim").get<int>();
  c.obs_dim = j.at("obs_dim").get<int>();
  c.encoder_hidden = j.at("encoder_hidden").get<std::vector<int>>();
  c.phi_hidden = j.at("phi_hidden").get<std::vector<int>>();
  c.block1_dim = j.at("block1_dim").get<int>();
  c.block2_aux_dim = j.at("block2_aux_dim").get<int>();
  return c;
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  try {
    ordered_json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint '" + path + "'");
  out << j.dump() << "\n";
}

}  // namespace

void save_gnn_checkpoint(const std::string& path, const GnnParams& p) {
  ordered_json j;
  j["format"] = "graphnav-checkpoint";
  j["version"] = kCheckpointVersion;
  j["role"] = "gln";
  j["config"] = config_to_json(p.config);
  j["node_embed"] = mat_to_json(p.node_embed);
  j["edge_embed"] = mat_to_json(p.edge_embed);
  j["encoder"] = mlp_to_json(p.encoder);
  j["block1_phi_e"] = mlp_to_json(p.block1.phi_e);
  j["block1_phi_v"] = mlp_to_json(p.block1.phi_v);
  j["block1_phi_u"] = mlp_to_json(p.block1.phi_u);
  j["block2_phi_e"] = mlp_to_json(p.block2.phi_e);
  j["block2_phi_v"] = mlp_to_json(p.block2.phi_v);
  j["block2_phi_u"] = mlp_to_json(p.block2.phi_u);
  write_json_file(path, j);
}

GnnParams load_gnn_checkpoint(const std::string& path) {
  ordered_json j = read_json_file(path);
  try {
    if (j.at("role").get<std::string>() != "gln")
      throw StructureError(path + ": not a localizer checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw StructureError(path + ": unsupported checkpoint version");
    GnnParams p;
    p.config = config_from_json(j.at("config"));
    p.node_embed = mat_from_json(j.at("node_embed"), "node_embed");
    p.edge_embed = mat_from_json(j.at("edge_embed"), "edge_embed");
    p.encoder = mlp_from_json(j.at("encoder"), "encoder");
    p.block1.phi_e = mlp_from_json(j.at("block1_phi_e"), "block1_phi_e");
    p.block1.phi_v = mlp_from_json(j.at("block1_phi_v"), "block1_phi_v");
    p.block1.phi_u = mlp_from_json(j.at("block1_phi_u"), "block1_phi_u");
    p.block2.phi_e = mlp_from_json(j.at("block2_phi_e"), "block2_phi_e");
    p.block2.phi_v = mlp_from_json(j.at("block2_phi_v"), "block2_phi_v");
    p.block2.phi_u = mlp_from_json(j.at("block2_phi_u"), "block2_phi_u");

    // Shape congruence with the declared configuration.
    GnnConfig c = p.config;
    if (p.node_embed.cols != c.embed_dim || p.edge_embed.cols != c.embed_dim ||
        p.encoder.in_dim() != c.obs_dim || p.encoder.out_dim() != c.global_dim ||
        p.block1.phi_e.in_dim() != 3 * c.embed_dim + c.global_dim ||
        p.block1.phi_e.out_dim() != c.block1_dim || p.block2.phi_e.out_dim() != 1)
      throw StructureError(path + ": tensor shapes do not match the checkpoint config");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_mlp_checkpoint(const std::string& path, const MlpParams& p,
                         const std::string& role) {
  ordered_json j;
  j["format"] = "graphnav-checkpoint";
  j["version"] = kCheckpointVersion;
  j["role"] = role;
  j["net"] = mlp_to_json(p);
  write_json_file(path, j);
}

MlpParams load_mlp_checkpoint(const std::string& path, const std::string& expected_role) {
  ordered_json j = read_json_file(path);
  try {
    if (j.at("role").get<std::string>() != expected_role)
      throw StructureError(path + ": checkpoint role '" + j.at("role").get<std::string>() +
                           "' does not match expected '" + expected_role + "'");
    return mlp_from_json(j.at("net"), expected_role);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace graphnav
