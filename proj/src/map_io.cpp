#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/topomap.hpp"

namespace graphnav {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json node_to_json(const TopoNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = to_string(n.kind);
  j["is_door"] = n.is_door;
  j["x"] = n.position.x;
  j["y"] = n.position.y;
  if (n.orientation)
    j["theta"] = *n.orientation;
  else
    j["theta"] = nullptr;
  j["room"] = n.room_label;
  return j;
}

ordered_json edge_to_json(const TopoEdge& e) {
  ordered_json j;
  j["id"] = e.id;
  j["src"] = e.src;
  j["dst"] = e.dst;
  j["behavior"] = to_string(e.behavior);
  return j;
}

}  // namespace

std::string map_to_json_string(const TopoMap& map) {
  std::vector<TopoNode> nodes = map.nodes();
  std::vector<TopoEdge> edges = map.edges();
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (const TopoNode& n : nodes) j["nodes"].push_back(node_to_json(n));
  j["edges"] = ordered_json::array();
  for (const TopoEdge& e : edges) j["edges"].push_back(edge_to_json(e));
  return j.dump(2) + "\n";
}

LoadedMap map_from_json_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map file: ") + e.what());
  }

  std::vector<TopoNode> nodes;
  std::vector<TopoEdge> edges;
  try {
    if (!j.contains("nodes") || !j["nodes"].is_array())
      throw ParseError("map file: missing 'nodes' array");
    if (!j.contains("edges") || !j["edges"].is_array())
      throw ParseError("map file: missing 'edges' array");
    for (const auto& jn : j["nodes"]) {
      TopoNode n;
      n.id = jn.at("id").get<int>();
      n.kind = node_kind_from_string(jn.at("kind").get<std::string>());
      n.is_door = jn.at("is_door").get<bool>();
      n.position = {jn.at("x").get<double>(), jn.at("y").get<double>()};
      if (!jn.at("theta").is_null()) n.orientation = jn.at("theta").get<double>();
      n.room_label = jn.at("room").get<std::string>();
      nodes.push_back(std::move(n));
    }
    for (const auto& je : j["edges"]) {
      TopoEdge e;
      e.id = je.at("id").get<int>();
      e.src = je.at("src").get<int>();
      e.dst = je.at("dst").get<int>();
      e.behavior = behavior_from_string(je.at("behavior").get<std::string>());
      edges.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map file: ") + e.what());
  }

  TopoMap map(std::move(nodes), std::move(edges));
  ValidationReport violations = validate_map(map);
  return LoadedMap{std::move(map), std::move(violations)};
}

LoadedMap read_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return map_from_json_string(buf.str());
}

void write_map(const std::string& path, const TopoMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write map file '" + path + "'");
  out << map_to_json_string(map);
}

}  // namespace graphnav
