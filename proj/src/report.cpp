#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/evalsuite.hpp"

namespace graphnav {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json record_to_json(const RunRecord& r) {
  ordered_json j;
  j["task"]["map_id"] = r.task.map_id;
  j["task"]["start"] = r.task.start;
  j["task"]["goal"] = r.task.goal;
  j["task"]["node_seq"] = r.task.plan.node_seq;
  j["task"]["edge_seq"] = r.task.plan.edge_seq;
  j["variant"] = to_string(r.variant);
  j["oracle_policies"] = r.oracle_policies;
  j["outcome"] = to_string(r.outcome);
  j["nodes_reached"] = r.nodes_reached;
  ordered_json frames = ordered_json::array();
  for (const RunFrameLog& f : r.frames) {
    ordered_json jf;
    jf["t"] = f.t;
    jf["x"] = f.pose.x;
    jf["y"] = f.pose.y;
    jf["theta"] = f.pose.theta;
    jf["beh"] = to_string(f.selected);
    jf["pred"] = f.predicted_node;
    jf["gt"] = f.gt_node ? ordered_json(*f.gt_node) : ordered_json(nullptr);
    jf["gt_beh"] = f.gt_behavior ? ordered_json(to_string(*f.gt_behavior)) : ordered_json(nullptr);
    jf["off_plan"] = f.gt_off_plan;
    jf["vx"] = {f.cmd.v_p, f.cmd.v_theta};
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  return j;
}

RunRecord record_from_json(const ordered_json& j, const TopoMap& map) {
  RunRecord r;
  r.task.map_id = j.at("task").at("map_id").get<std::string>();
  r.task.start = j.at("task").at("start").get<int>();
  r.task.goal = j.at("task").at("goal").get<int>();
  r.task.plan = NavPlan(map, j.at("task").at("node_seq").get<std::vector<int>>(),
                        j.at("task").at("edge_seq").get<std::vector<int>>());
  r.task.band = difficulty(r.task.plan);
  r.variant = variant_from_string(j.at("variant").get<std::string>());
  r.oracle_policies = j.at("oracle_policies").get<bool>();
  r.outcome = run_outcome_from_string(j.at("outcome").get<std::string>());
  r.nodes_reached = j.at("nodes_reached").get<int>();
  for (const auto& jf : j.at("frames")) {
    RunFrameLog f;
    f.t = jf.at("t").get<double>();
    f.pose = {jf.at("x").get<double>(), jf.at("y").get<double>(), jf.at("theta").get<double>(),
              f.t};
    f.selected = behavior_from_string(jf.at("beh").get<std::string>());
    f.predicted_node = jf.at("pred").get<int>();
    if (!jf.at("gt").is_null()) f.gt_node = jf.at("gt").get<int>();
    if (!jf.at("gt_beh").is_null())
      f.gt_behavior = behavior_from_string(jf.at("gt_beh").get<std::string>());
    f.gt_off_plan = jf.at("off_plan").get<bool>();
    f.cmd = {jf.at("vx")[0].get<double>(), jf.at("vx")[1].get<double>()};
    r.frames.push_back(std::move(f));
  }
  return r;
}

std::string rate_cell(int successes, int attempts) {
  if (attempts == 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f (%d)", 100.0 * successes / attempts, attempts);
  return buf;
}

std::string sr_pc_cell(const DifficultyCell& cell) {
  if (cell.runs == 0) return "- / -";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.1f / %.1f", 100.0 * cell.successes / cell.runs,
                100.0 * cell.pc_sum / cell.runs);
  return buf;
}

std::string group_label(const RunRecord& r) {
  std::string label = to_string(r.variant);
  label += r.oracle_policies ? "+oracle" : "+learned";
  return label;
}

constexpr BehaviorKind kBehaviorColumns[] = {BehaviorKind::CorridorFollow,
                                             BehaviorKind::FindDoor, BehaviorKind::TurnRight,
                                             BehaviorKind::TurnLeft, BehaviorKind::Straight};

}  // namespace

void save_run_records(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write run records '" + path + "'");
  for (const RunRecord& r : records) out << record_to_json(r).dump() << "\n";
}

std::vector<RunRecord> load_run_records(const std::string& path, const TopoMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open run records '" + path + "'");
  std::vector<RunRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(ordered_json::parse(line), map));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

void write_svg(const WorldModel& world, const TopoMap& map, const RunRecord& record,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  const double scale = 40.0;  // px per meter
  const double H = world.extent_y() * scale;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << world.extent_x() * scale
      << "' height='" << H << "'>\n";
  auto X = [&](double x) { return x * scale; };
  auto Y = [&](double y) { return H - y * scale; };  // world y up, svg y down

  // Occupied cells, run-length merged per row.
  out << "<g fill='#222'>\n";
  for (int cy = 0; cy < world.height(); ++cy) {
    int run_start = -1;
    for (int cx = 0; cx <= world.width(); ++cx) {
      bool occ = cx < world.width() && world.occupied(cx, cy);
      if (occ && run_start < 0) run_start = cx;
      if (!occ && run_start >= 0) {
        double x0 = run_start * kGridResolution, x1 = cx * kGridResolution;
        double y0 = cy * kGridResolution, y1 = (cy + 1) * kGridResolution;
        out << "<rect x='" << X(x0) << "' y='" << Y(y1) << "' width='" << (x1 - x0) * scale
            << "' height='" << (y1 - y0) * scale << "'/>\n";
        run_start = -1;
      }
    }
  }
  out << "</g>\n";

  // Plan nodes and the goal.
  out << "<g fill='none' stroke='#2060c0' stroke-width='2'>\n";
  for (int node_id : record.task.plan.node_seq) {
    const TopoNode& n = map.node(node_id);
    out << "<circle cx='" << X(n.position.x) << "' cy='" << Y(n.position.y) << "' r='5'/>\n";
  }
  out << "</g>\n";
  const TopoNode& goal = map.node(record.task.goal);
  out << "<circle cx='" << X(goal.position.x) << "' cy='" << Y(goal.position.y)
      << "' r='7' fill='#20a040'/>\n";

  // Driven path.
  out << "<polyline fill='none' stroke='#c03020' stroke-width='2' points='";
  for (const RunFrameLog& f : record.frames)
    out << X(f.pose.x) << "," << Y(f.pose.y) << " ";
  out << "'/>\n";
  out << "<text x='8' y='16' font-family='monospace' font-size='14'>" << group_label(record)
      << " " << to_string(record.outcome) << " task " << record.task.start << "-&gt;"
      << record.task.goal << "</text>\n";
  out << "</svg>\n";
}

ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["runs"] = report.runs;
  j["successes"] = report.successes;
  j["success_rate"] = report.success_rate();
  j["mean_plan_completion"] = report.mean_completion();
  for (BehaviorKind b : kBehaviorColumns) {
    const BehaviorCell& cell = report.behavior[static_cast<int>(b)];
    ordered_json jb;
    jb["attempts"] = cell.attempts;
    jb["successes"] = cell.successes;
    if (cell.attempts > 0)
      jb["rate"] = static_cast<double>(cell.successes) / cell.attempts;
    else
      jb["rate"] = nullptr;
    const PredictionCell& pcell = report.prediction[static_cast<int>(b)];
    jb["prediction_frames"] = pcell.frames;
    if (pcell.frames > 0)
      jb["prediction_accuracy"] = static_cast<double>(pcell.correct) / pcell.frames;
    else
      jb["prediction_accuracy"] = nullptr;
    j["behaviors"][to_string(b)] = std::move(jb);
  }
  const char* bands[3] = {"I", "II", "III"};
  for (int d = 0; d < 3; ++d) {
    const DifficultyCell& cell = report.difficulty[d];
    ordered_json jd;
    jd["runs"] = cell.runs;
    jd["successes"] = cell.successes;
    if (cell.runs > 0) {
      jd["success_rate"] = static_cast<double>(cell.successes) / cell.runs;
      jd["mean_plan_completion"] = cell.pc_sum / cell.runs;
    } else {
      jd["success_rate"] = nullptr;
      jd["mean_plan_completion"] = nullptr;
    }
    j["difficulty"][bands[d]] = std::move(jd);
  }
  return j;
}

}  // namespace

void render_report(const WorldModel& world, const TopoMap& map,
                   const std::vector<RunRecord>& records, const std::string& out_dir,
                   int svg_limit) {
  fs::create_directories(out_dir);

  // Group records per (variant, policy source), in first-seen order.
  std::vector<std::pair<std::string, std::vector<RunRecord>>> groups;
  for (const RunRecord& r : records) {
    std::string label = group_label(r);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == label; });
    if (it == groups.end()) {
      groups.push_back({label, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(r);
  }

  std::ostringstream table;
  table << "model               | cf           fd           tr           tl           s      "
           "      | I             II            III           | total SR / PC\n";
  table << std::string(140, '-') << "\n";
  ordered_json jgroups = ordered_json::array();
  for (const auto& [label, runs] : groups) {
    EvalReport report = compute_metrics(runs);
    char row[512];
    const auto& beh = report.behavior;
    auto cell = [&](BehaviorKind b) {
      return rate_cell(beh[static_cast<int>(b)].successes, beh[static_cast<int>(b)].attempts);
    };
    std::snprintf(row, sizeof(row),
                  "%-19s | %-12s %-12s %-12s %-12s %-12s | %-13s %-13s %-13s | %.1f / %.1f",
                  label.c_str(), cell(BehaviorKind::CorridorFollow).c_str(),
                  cell(BehaviorKind::FindDoor).c_str(), cell(BehaviorKind::TurnRight).c_str(),
                  cell(BehaviorKind::TurnLeft).c_str(), cell(BehaviorKind::Straight).c_str(),
                  sr_pc_cell(report.difficulty[0]).c_str(),
                  sr_pc_cell(report.difficulty[1]).c_str(),
                  sr_pc_cell(report.difficulty[2]).c_str(), 100.0 * report.success_rate(),
                  100.0 * report.mean_completion());
    table << row << "\n";

    ordered_json jg;
    jg["model"] = label;
    jg["metrics"] = report_to_json(report);
    jgroups.push_back(std::move(jg));
  }

  std::ofstream txt(fs::path(out_dir) / "report.txt", std::ios::binary);
  if (!txt) throw ParseError("cannot write report.txt in '" + out_dir + "'");
  txt << table.str();

  ordered_json j;
  j["groups"] = std::move(jgroups);
  std::ofstream jf(fs::path(out_dir) / "report.json", std::ios::binary);
  jf << j.dump(2) << "\n";

  int rendered = 0;
  for (std::size_t i = 0; i < records.size() && rendered < svg_limit; ++i, ++rendered) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03zu.svg", i);
    write_svg(world, map, records[i], (fs::path(out_dir) / name).string());
  }
}

}  // namespace graphnav
