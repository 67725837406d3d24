#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json frame_to_json(const Frame& f) {
  ordered_json j;
  j["t"] = f.t;
  j["x"] = f.pose.x;
  j["y"] = f.pose.y;
  j["theta"] = f.pose.theta;
  j["scan"] = f.scan.ranges;
  j["vr"] = {f.cmd_expert.v_p, f.cmd_expert.v_theta};
  j["vx"] = {f.cmd_executed.v_p, f.cmd_executed.v_theta};
  ordered_json labels;
  labels["behavior"] = f.labels.behavior ? ordered_json(to_string(*f.labels.behavior))
                                         : ordered_json(nullptr);
  labels["node"] = f.labels.node ? ordered_json(*f.labels.node) : ordered_json(nullptr);
  labels["edge"] = f.labels.edge ? ordered_json(*f.labels.edge) : ordered_json(nullptr);
  labels["room"] = f.labels.room;
  j["labels"] = labels;
  return j;
}

Frame frame_from_json(const ordered_json& j) {
  Frame f;
  f.t = j.at("t").get<double>();
  f.pose.x = j.at("x").get<double>();
  f.pose.y = j.at("y").get<double>();
  f.pose.theta = j.at("theta").get<double>();
  f.pose.time = f.t;
  const auto& scan = j.at("scan");
  if (scan.size() != static_cast<std::size_t>(kScanRays))
    throw ParseError("frame scan must have " + std::to_string(kScanRays) + " entries");
  for (int i = 0; i < kScanRays; ++i) f.scan.ranges[i] = scan[i].get<double>();
  f.cmd_expert = {j.at("vr")[0].get<double>(), j.at("vr")[1].get<double>()};
  f.cmd_executed = {j.at("vx")[0].get<double>(), j.at("vx")[1].get<double>()};
  const auto& labels = j.at("labels");
  if (!labels.at("behavior").is_null())
    f.labels.behavior = behavior_from_string(labels.at("behavior").get<std::string>());
  if (!labels.at("node").is_null()) f.labels.node = labels.at("node").get<int>();
  if (!labels.at("edge").is_null()) f.labels.edge = labels.at("edge").get<int>();
  f.labels.room = labels.at("room").get<std::string>();
  return f;
}

ordered_json task_to_json(const NavTask& task) {
  ordered_json j;
  j["map_id"] = task.map_id;
  j["start"] = task.start;
  j["goal"] = task.goal;
  j["node_seq"] = task.plan.node_seq;
  j["edge_seq"] = task.plan.edge_seq;
  j["difficulty"] = to_string(task.band);
  return j;
}

NavTask task_from_json(const ordered_json& j, const TopoMap& map) {
  NavTask task;
  task.map_id = j.at("map_id").get<std::string>();
  task.start = j.at("start").get<int>();
  task.goal = j.at("goal").get<int>();
  task.plan = NavPlan(map, j.at("node_seq").get<std::vector<int>>(),
                      j.at("edge_seq").get<std::vector<int>>());
  task.band = difficulty(task.plan);
  return task;
}

}  // namespace

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write trajectory file '" + path + "'");
  for (const Frame& f : traj.frames) out << frame_to_json(f).dump() << "\n";

  ordered_json meta;
  meta["task"] = task_to_json(traj.task);
  meta["world_id"] = traj.world_id;
  meta["map_id"] = traj.map_id;
  meta["outcome"] = to_string(traj.outcome);
  meta["frames"] = traj.frames.size();
  std::ofstream mout(path + ".meta.json", std::ios::binary);
  mout << meta.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& path, const TopoMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open trajectory file '" + path + "'");
  Trajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      traj.frames.push_back(frame_from_json(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }

  std::ifstream min(path + ".meta.json", std::ios::binary);
  if (min) {
    try {
      ordered_json meta;
      min >> meta;
      traj.task = task_from_json(meta.at("task"), map);
      traj.world_id = meta.at("world_id").get<std::string>();
      traj.map_id = meta.at("map_id").get<std::string>();
      traj.outcome = traj_outcome_from_string(meta.at("outcome").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ".meta.json: " + e.what());
    }
  }
  return traj;
}

void save_dataset(const std::string& dir, const std::vector<Trajectory>& trajs,
                  std::uint64_t master_seed) {
  fs::create_directories(fs::path(dir) / "trajectories");
  ordered_json manifest;
  manifest["version"] = 1;
  manifest["master_seed"] = master_seed;
  manifest["trajectories"] = ordered_json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%04zu.jsonl", i);
    std::string rel = std::string("trajectories/") + name;
    save_trajectory((fs::path(dir) / rel).string(), trajs[i]);
    ordered_json entry;
    entry["file"] = rel;
    entry["outcome"] = to_string(trajs[i].outcome);
    entry["frames"] = trajs[i].frames.size();
    entry["map_id"] = trajs[i].map_id;
    manifest["trajectories"].push_back(entry);
  }
  std::ofstream out(fs::path(dir) / "dataset.json", std::ios::binary);
  if (!out) throw ParseError("cannot write dataset index in '" + dir + "'");
  out << manifest.dump(2) << "\n";
}

std::vector<Trajectory> load_dataset(const std::string& dir, const TopoMap& map) {
  std::ifstream in(fs::path(dir) / "dataset.json", std::ios::binary);
  if (!in) throw ParseError("cannot open dataset index in '" + dir + "'");
  ordered_json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(dir + "/manifest.json: " + e.what());
  }
  std::vector<Trajectory> out;
  for (const auto& entry : manifest.at("trajectories")) {
    std::string rel = entry.at("file").get<std::string>();
    out.push_back(load_trajectory((fs::path(dir) / rel).string(), map));
  }
  return out;
}

}  // namespace graphnav
