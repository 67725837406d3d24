#include "graphnav/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/evalsuite.hpp"
#include "graphnav/fixtures.hpp"
#include "graphnav/gln.hpp"
#include "graphnav/version.hpp"

namespace graphnav {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// --- Manifests ---------------------------------------------------------------

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot hash missing file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a:%016llx",
                static_cast<unsigned long long>(detail::fnv1a(buf.str())));
  return hex;
}

struct Manifest {
  std::string command;
  ordered_json config = ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const std::string& dir) const {
    ordered_json j;
    j["tool"] = "graphnav";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = ordered_json::object();
    for (const std::string& p : inputs) j["inputs"][fs::path(p).filename().string()] = file_hash(p);
    j["outputs"] = ordered_json::object();
    for (const std::string& p : outputs)
      j["outputs"][fs::path(p).lexically_relative(dir).string()] = file_hash(p);
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!out) throw ParseError("cannot write manifest in '" + dir + "'");
    out << j.dump(2) << "\n";
  }
};

// --- Shared loading helpers ---------------------------------------------------

struct WorldBundle {
  WorldModel world;
  TopoMap map;
  std::string world_path;
  std::string map_path;
};

WorldBundle load_world_dir(const std::string& dir) {
  std::string wpath = (fs::path(dir) / "world.json").string();
  std::string mpath = (fs::path(dir) / "map.json").string();
  WorldModel world = read_world(wpath);
  LoadedMap loaded = read_map(mpath);
  for (const RuleViolation& v : loaded.violations)
    std::cerr << "map rule " << v.rule << " violation: " << v.message << "\n";
  return {std::move(world), std::move(loaded.map), wpath, mpath};
}

int effective_workers(int workers, bool strict_repro) {
  if (strict_repro) return 1;
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BehaviorKind> parse_behavior_list(const std::string& spec) {
  if (spec == "all")
    return {BehaviorKind::CorridorFollow, BehaviorKind::FindDoor, BehaviorKind::TurnLeft,
            BehaviorKind::TurnRight, BehaviorKind::Straight};
  std::vector<BehaviorKind> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(behavior_from_string(item));
  if (out.empty()) throw ParseError("empty behavior list");
  return out;
}

// --- Subcommand payloads -------------------------------------------------------

struct CommonOpts {
  std::uint64_t seed = 0;
  bool strict_repro = false;
  int workers = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_flag("--strict-repro", strict_repro,
                  "single-threaded, bit-reproducible artifacts");
    cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
  }
  ordered_json to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["strict_repro"] = strict_repro;
    j["workers"] = workers;
    return j;
  }
};

int cmd_gen_world(const std::string& kind, const CommonOpts& common, const std::string& out) {
  Fixture fx = gen_fixture_world(fixture_kind_from_string(kind), common.seed);
  fs::create_directories(out);
  std::string wpath = (fs::path(out) / "world.json").string();
  std::string mpath = (fs::path(out) / "map.json").string();
  write_world(wpath, fx.world);
  write_map(mpath, fx.map);

  Manifest manifest;
  manifest.command = "gen-world";
  manifest.config = common.to_json();
  manifest.config["kind"] = kind;
  manifest.outputs = {wpath, mpath};
  manifest.write(out);
  std::cout << "generated " << fx.id << ": " << fx.map.nodes().size() << " nodes, "
            << fx.map.edges().size() << " edges\n";
  return kExitOk;
}

// Collection prefers full room-to-room coverage (every behavior class,
// including the sparse straight-across crossings, appears in the data), then
// fills with random room-start tasks.
std::vector<NavTask> collection_tasks(const TopoMap& map, const std::string& map_id, int n,
                                      Rng& rng) {
  std::vector<int> rooms;
  for (const TopoNode& node : map.nodes())
    if (node.kind == NodeKind::Room && !node.is_door) rooms.push_back(node.id);
  std::vector<NavTask> pairs;
  for (int a : rooms) {
    for (int b : rooms) {
      if (a == b) continue;
      try {
        NavTask task;
        task.map_id = map_id;
        task.start = a;
        task.goal = b;
        task.plan = shortest_plan(map, a, b);
        task.band = difficulty(task.plan);
        pairs.push_back(std::move(task));
      } catch (const PlanningError&) {
      }
    }
  }
  for (std::size_t i = pairs.size(); i-- > 1;)
    std::swap(pairs[i], pairs[rng.uniform_int(i + 1)]);
  if (static_cast<int>(pairs.size()) >= n) {
    pairs.resize(static_cast<std::size_t>(n));
    return pairs;
  }
  std::vector<NavTask> extra =
      sample_tasks(map, map_id, n - static_cast<int>(pairs.size()), rng, 2, true);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  return pairs;
}

int cmd_collect(const std::string& world_dir, int tasks, bool noise, bool room_starts,
                const CommonOpts& common, const std::string& out) {
  WorldBundle bundle = load_world_dir(world_dir);
  Rng task_rng = derive_stream(common.seed, "collect/tasks");
  std::string map_id = fs::path(world_dir).filename().string();
  std::vector<NavTask> task_list =
      room_starts ? collection_tasks(bundle.map, map_id, tasks, task_rng)
                  : sample_tasks(bundle.map, map_id, tasks, task_rng, 2, false);

  int workers = effective_workers(common.workers, common.strict_repro);
  std::vector<Trajectory> trajectories(task_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < task_list.size(); i = next.fetch_add(1)) {
      Rng rng = derive_stream(common.seed, "collect/traj/" + std::to_string(i));
      trajectories[i] = collect_trajectory(bundle.world, bundle.map, task_list[i], rng, noise);
      annotate_trajectory(trajectories[i], bundle.world, bundle.map);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  fs::create_directories(out);
  // The dataset carries its own world and map so later stages are
  // self-contained.
  std::string wpath = (fs::path(out) / "world.json").string();
  std::string mpath = (fs::path(out) / "map.json").string();
  write_world(wpath, bundle.world);
  write_map(mpath, bundle.map);
  save_dataset(out, trajectories, common.seed);

  int reached = 0;
  std::size_t frames = 0;
  for (const Trajectory& t : trajectories) {
    if (t.outcome == TrajOutcome::ReachedGoal) ++reached;
    frames += t.frames.size();
  }
  Manifest manifest;
  manifest.command = "collect";
  manifest.config = common.to_json();
  manifest.config["world"] = world_dir;
  manifest.config["tasks"] = tasks;
  manifest.config["noise"] = noise;
  manifest.config["room_starts"] = room_starts;
  manifest.inputs = {bundle.world_path, bundle.map_path};
  manifest.outputs = {wpath, mpath, (fs::path(out) / "manifest.json").string()};
  manifest.outputs.pop_back();
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%04zu.jsonl", i);
    manifest.outputs.push_back((fs::path(out) / "trajectories" / name).string());
  }
  manifest.write(out);
  std::cout << "collected " << trajectories.size() << " trajectories (" << reached
            << " reached goal, " << frames << " frames)\n";
  return kExitOk;
}

int cmd_annotate(const std::string& data_dir) {
  WorldBundle bundle = load_world_dir(data_dir);
  std::vector<Trajectory> trajectories = load_dataset(data_dir, bundle.map);
  std::size_t frames = 0, node_tagged = 0, behavior_tagged = 0;
  for (Trajectory& traj : trajectories) {
    annotate_trajectory(traj, bundle.world, bundle.map);
    AnnotationSummary s = summarize_annotation(traj);
    frames += s.frames;
    node_tagged += s.node_tagged;
    behavior_tagged += s.behavior_tagged;
  }
  save_dataset(data_dir, trajectories, 0);
  std::cout << "annotated " << trajectories.size() << " trajectories: " << frames
            << " frames, " << 100.0 * node_tagged / std::max<std::size_t>(frames, 1)
            << "% node-tagged, " << 100.0 * behavior_tagged / std::max<std::size_t>(frames, 1)
            << "% behavior-tagged\n";
  return kExitOk;
}

struct LoadedData {
  std::vector<WorldBundle> bundles;
  std::vector<std::vector<Trajectory>> datasets;  // aligned with bundles
};

LoadedData load_datasets(const std::vector<std::string>& dirs) {
  LoadedData out;
  for (const std::string& dir : dirs) {
    WorldBundle bundle = load_world_dir(dir);
    out.datasets.push_back(load_dataset(dir, bundle.map));
    out.bundles.push_back(std::move(bundle));
  }
  return out;
}

int cmd_train_gln(const std::vector<std::string>& data_dirs, double val_frac, int epochs,
                  int batch, double lr, int dim, const CommonOpts& common,
                  const std::string& out) {
  LoadedData data = load_datasets(data_dirs);

  // Hold out whole trajectories for validation: accuracy on them measures
  // generalization to unseen rollouts of the seen maps.
  std::vector<GnnExample> train, val;
  Rng split_rng = derive_stream(common.seed, "train-gln/split");
  for (std::size_t d = 0; d < data.datasets.size(); ++d) {
    const TopoMap& map = data.bundles[d].map;
    for (std::size_t t = 0; t < data.datasets[d].size(); ++t) {
      Rng aug = derive_stream(common.seed,
                              "train-gln/aug/" + std::to_string(d) + "/" + std::to_string(t));
      bool hold_out = split_rng.uniform() < val_frac;
      const Trajectory& traj = data.datasets[d][t];
      if (hold_out) {
        std::vector<GnnExample> ex = make_eval_examples(traj, map);
        val.insert(val.end(), ex.begin(), ex.end());
      } else {
        std::vector<GnnExample> ex = make_training_examples(traj, map, aug);
        train.insert(train.end(), ex.begin(), ex.end());
      }
    }
  }
  if (train.empty()) throw QueryError("train-gln: no labeled frames in the datasets");

  GnnConfig config;
  config.embed_dim = dim;
  config.global_dim = dim;
  config.obs_dim = kScanStackDepth * kScanRays;
  config.block1_dim = dim;

  GlnTrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch;
  tc.lr = lr;
  tc.seed = common.seed;
  tc.workers = effective_workers(common.workers, common.strict_repro);

  std::cout << "training localizer on " << train.size() << " examples (" << val.size()
            << " held-out)\n";
  GlnTrainResult result = train_gln(config, train, val, tc);
  for (std::size_t e = 0; e < result.curve.size(); ++e) {
    const GlnEpochStats& s = result.curve[e];
    std::cout << "epoch " << e + 1 << ": train loss " << s.train_loss << " acc "
              << s.train_accuracy << ", val loss " << s.val_loss << " acc " << s.val_accuracy
              << "\n";
  }

  fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string());
  save_gnn_checkpoint(out, result.params);

  Manifest manifest;
  manifest.command = "train-gln";
  manifest.config = common.to_json();
  manifest.config["data"] = data_dirs;
  manifest.config["val_frac"] = val_frac;
  manifest.config["epochs"] = epochs;
  manifest.config["batch"] = batch;
  manifest.config["lr"] = lr;
  manifest.config["dim"] = dim;
  for (const WorldBundle& b : data.bundles) {
    manifest.inputs.push_back(b.world_path);
    manifest.inputs.push_back(b.map_path);
  }
  manifest.outputs = {out};
  std::string manifest_dir = fs::path(out).parent_path().string();
  manifest.write(manifest_dir.empty() ? "." : manifest_dir);
  return kExitOk;
}

int cmd_train_behaviors(const std::vector<std::string>& data_dirs, const std::string& which,
                        int epochs, int batch, double lr, const CommonOpts& common,
                        const std::string& out) {
  LoadedData data = load_datasets(data_dirs);
  std::vector<Trajectory> all;
  for (auto& set : data.datasets)
    for (Trajectory& t : set) all.push_back(std::move(t));

  PolicyConfig pc;
  BehaviorTrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch;
  tc.lr = lr;
  tc.seed = common.seed;

  fs::create_directories(out);
  Manifest manifest;
  manifest.command = "train-behaviors";
  manifest.config = common.to_json();
  manifest.config["data"] = data_dirs;
  manifest.config["behavior"] = which;
  manifest.config["epochs"] = epochs;
  manifest.config["batch"] = batch;
  manifest.config["lr"] = lr;

  for (BehaviorKind kind : parse_behavior_list(which)) {
    BehaviorTrainResult r = train_behavior(kind, all, pc, tc);
    if (r.sparse_warning)
      std::cerr << "warning: behavior '" << to_string(kind) << "' has only " << r.frames
                << " frames; trained anyway\n";
    std::string path =
        (fs::path(out) / (std::string("behavior_") + to_string(kind) + ".json")).string();
    save_mlp_checkpoint(path, r.net, std::string("behavior:") + to_string(kind));
    manifest.outputs.push_back(path);
    std::cout << "behavior " << to_string(kind) << ": " << r.frames << " frames, final loss "
              << r.loss_curve.back() << "\n";
  }
  manifest.write(out);
  return kExitOk;
}

PolicyParams load_policies(const std::string& dir) {
  PolicyParams p;
  for (int b = 0; b < kNumBehaviors; ++b) {
    BehaviorKind kind = static_cast<BehaviorKind>(b);
    std::string path =
        (fs::path(dir) / (std::string("behavior_") + to_string(kind) + ".json")).string();
    p.nets[b] = load_mlp_checkpoint(path, std::string("behavior:") + to_string(kind));
  }
  return p;
}

int cmd_eval(const std::string& world_dir, int tasks, const std::string& variant_name,
             const std::string& policy_mode, const std::string& gln_path,
             const std::string& policy_dir, bool room_starts, int svg_limit,
             const CommonOpts& common, const std::string& out) {
  WorldBundle bundle = load_world_dir(world_dir);
  Variant variant = variant_from_string(variant_name);
  bool oracle = policy_mode == "oracle";
  if (!oracle && policy_mode != "learned")
    throw ParseError("--policies must be 'learned' or 'oracle'");

  GnnParams gln;
  PolicyParams policies;
  RunOptions options;
  options.variant = variant;
  options.oracle_policies = oracle;
  if (variant != Variant::Gtl) {
    if (gln_path.empty()) throw QueryError("variant '" + variant_name + "' needs --gln");
    gln = load_gnn_checkpoint(gln_path);
    options.gln = &gln;
  }
  if (!oracle) {
    if (policy_dir.empty()) throw QueryError("learned policies need --policy-dir");
    policies = load_policies(policy_dir);
    options.policies = &policies;
  }

  Rng task_rng = derive_stream(common.seed, "eval/tasks");
  std::string map_id = fs::path(world_dir).filename().string();
  std::vector<NavTask> task_list =
      sample_tasks(bundle.map, map_id, tasks, task_rng, 2, room_starts);

  InflatedGrid grid(bundle.world);
  options.grid = &grid;

  int workers = effective_workers(common.workers, common.strict_repro);
  std::vector<RunRecord> records(task_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < task_list.size(); i = next.fetch_add(1))
      records[i] = run_navigation(bundle.world, bundle.map, task_list[i], options);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  fs::create_directories(out);
  std::string runs_path = (fs::path(out) / "runs.jsonl").string();
  save_run_records(runs_path, records);
  render_report(bundle.world, bundle.map, records, out, svg_limit);

  EvalReport report = compute_metrics(records);
  std::cout << "evaluated " << records.size() << " tasks: success rate "
            << 100.0 * report.success_rate() << "%, mean plan completion "
            << 100.0 * report.mean_completion() << "%\n";

  Manifest manifest;
  manifest.command = "eval";
  manifest.config = common.to_json();
  manifest.config["world"] = world_dir;
  manifest.config["tasks"] = tasks;
  manifest.config["variant"] = variant_name;
  manifest.config["policies"] = policy_mode;
  manifest.config["room_starts"] = room_starts;
  manifest.inputs = {bundle.world_path, bundle.map_path};
  if (!gln_path.empty()) manifest.inputs.push_back(gln_path);
  manifest.outputs = {runs_path, (fs::path(out) / "report.txt").string(),
                      (fs::path(out) / "report.json").string()};
  manifest.write(out);
  return kExitOk;
}

int cmd_report(const std::string& world_dir, const std::string& runs_path,
               const std::string& out, int svg_limit) {
  WorldBundle bundle = load_world_dir(world_dir);
  std::vector<RunRecord> records = load_run_records(runs_path, bundle.map);
  if (records.empty()) throw QueryError("report: no run records in '" + runs_path + "'");
  render_report(bundle.world, bundle.map, records, out, svg_limit);

  Manifest manifest;
  manifest.command = "report";
  manifest.config["runs"] = runs_path;
  manifest.inputs = {runs_path};
  manifest.outputs = {(fs::path(out) / "report.txt").string(),
                      (fs::path(out) / "report.json").string()};
  manifest.write(out);
  std::cout << "report written to " << out << "\n";
  return kExitOk;
}

// Config-file defaults: every "--key value" pair from the JSON object is
// injected unless the flag already appears on the command line.
std::vector<std::string> apply_config_defaults(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file '" + config_path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(config_path + ": " + std::string(e.what()));
  }

  std::vector<std::string> extra;
  for (auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    bool present = false;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_string()) {
      extra.push_back(flag + "=" + value.get<std::string>());
    } else {
      extra.push_back(flag + "=" + value.dump());
    }
  }
  // Subcommand first, then defaults, then explicit flags.
  std::vector<std::string> merged;
  if (!args.empty()) merged.push_back(args[0]);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
  return merged;
}

}  // namespace

int run_command(const std::vector<std::string>& raw_args) {
  CLI::App app{"behavioral navigation workbench"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file with flag defaults");

  // gen-world
  auto* gen = app.add_subcommand("gen-world", "generate a fixture world and its map");
  std::string gen_kind = "corridor", gen_out = "world";
  CommonOpts gen_common;
  gen->add_option("--kind", gen_kind, "corridor | tee | loop");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--config", config_file, "JSON config file");
  gen_common.add_to(gen);

  // collect
  auto* collect = app.add_subcommand("collect", "roll the scripted expert and record data");
  std::string col_world, col_out = "dataset";
  int col_tasks = 20;
  bool col_no_noise = false, col_any_starts = false;
  CommonOpts col_common;
  collect->add_option("--world", col_world, "world directory")->required();
  collect->add_option("--tasks", col_tasks, "number of trajectories");
  collect->add_flag("--no-noise", col_no_noise, "disable velocity noise injection");
  collect->add_flag("--any-starts", col_any_starts, "sample starts from all nodes, not rooms");
  collect->add_option("--out", col_out, "dataset directory");
  collect->add_option("--config", config_file, "JSON config file");
  col_common.add_to(collect);

  // annotate
  auto* annotate = app.add_subcommand("annotate", "relabel a dataset in place");
  std::string ann_data;
  annotate->add_option("--data", ann_data, "dataset directory")->required();
  annotate->add_option("--config", config_file, "JSON config file");

  // train-gln
  auto* tgln = app.add_subcommand("train-gln", "train the graph localizer");
  std::vector<std::string> tg_data;
  std::string tg_out = "gln.json";
  double tg_val = 0.15, tg_lr = 1e-4;
  int tg_epochs = 10, tg_batch = 32, tg_dim = 32;
  CommonOpts tg_common;
  tgln->add_option("--data", tg_data, "dataset directories")->required();
  tgln->add_option("--val-frac", tg_val, "held-out trajectory fraction");
  tgln->add_option("--epochs", tg_epochs, "training epochs");
  tgln->add_option("--batch", tg_batch, "mini-batch size");
  tgln->add_option("--lr", tg_lr, "learning rate");
  tgln->add_option("--dim", tg_dim, "feature width");
  tgln->add_option("--out", tg_out, "checkpoint path");
  tgln->add_option("--config", config_file, "JSON config file");
  tg_common.add_to(tgln);

  // train-behaviors
  auto* tbeh = app.add_subcommand("train-behaviors", "clone the expert per behavior");
  std::vector<std::string> tb_data;
  std::string tb_which = "all", tb_out = "policies";
  double tb_lr = 1e-4;
  int tb_epochs = 20, tb_batch = 32;
  CommonOpts tb_common;
  tbeh->add_option("--data", tb_data, "dataset directories")->required();
  tbeh->add_option("--behavior", tb_which, "all or comma list of cf,fd,tl,tr,s");
  tbeh->add_option("--epochs", tb_epochs, "training epochs");
  tbeh->add_option("--batch", tb_batch, "mini-batch size");
  tbeh->add_option("--lr", tb_lr, "learning rate");
  tbeh->add_option("--out", tb_out, "checkpoint directory");
  tbeh->add_option("--config", config_file, "JSON config file");
  tb_common.add_to(tbeh);

  // eval
  auto* eval = app.add_subcommand("eval", "closed-loop navigation benchmark");
  std::string ev_world, ev_variant = "gtl", ev_policies = "learned", ev_gln, ev_policy_dir,
              ev_out = "eval";
  int ev_tasks = 20, ev_svg = 24;
  bool ev_room_starts = false;
  CommonOpts ev_common;
  eval->add_option("--world", ev_world, "world directory")->required();
  eval->add_option("--tasks", ev_tasks, "number of sampled tasks");
  eval->add_option("--variant", ev_variant, "graphnav | graphnavpf | gtl");
  eval->add_option("--policies", ev_policies, "learned | oracle");
  eval->add_option("--gln", ev_gln, "localizer checkpoint");
  eval->add_option("--policy-dir", ev_policy_dir, "behavior checkpoint directory");
  eval->add_flag("--room-starts", ev_room_starts, "sample starts from room nodes only");
  eval->add_option("--svg-limit", ev_svg, "trajectory SVGs to render");
  eval->add_option("--out", ev_out, "output directory");
  eval->add_option("--config", config_file, "JSON config file");
  ev_common.add_to(eval);

  // report
  auto* rep = app.add_subcommand("report", "re-render metrics from run records");
  std::string rp_world, rp_runs, rp_out = "report";
  int rp_svg = 24;
  rep->add_option("--world", rp_world, "world directory")->required();
  rep->add_option("--runs", rp_runs, "runs.jsonl path")->required();
  rep->add_option("--out", rp_out, "output directory");
  rep->add_option("--svg-limit", rp_svg, "trajectory SVGs to render");
  rep->add_option("--config", config_file, "JSON config file");

  try {
    std::vector<std::string> args = apply_config_defaults(raw_args);
    // CLI11 parses reversed argv.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  try {
    if (gen->parsed()) return cmd_gen_world(gen_kind, gen_common, gen_out);
    if (collect->parsed())
      return cmd_collect(col_world, col_tasks, !col_no_noise, !col_any_starts, col_common,
                         col_out);
    if (annotate->parsed()) return cmd_annotate(ann_data);
    if (tgln->parsed())
      return cmd_train_gln(tg_data, tg_val, tg_epochs, tg_batch, tg_lr, tg_dim, tg_common,
                           tg_out);
    if (tbeh->parsed())
      return cmd_train_behaviors(tb_data, tb_which, tb_epochs, tb_batch, tb_lr, tb_common,
                                 tb_out);
    if (eval->parsed())
      return cmd_eval(ev_world, ev_tasks, ev_variant, ev_policies, ev_gln, ev_policy_dir,
                      ev_room_starts, ev_svg, ev_common, ev_out);
    if (rep->parsed()) return cmd_report(rp_world, rp_runs, rp_out, rp_svg);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const StructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const QueryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const PlanningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace graphnav
