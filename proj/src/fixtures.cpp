#include "graphnav/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "graphnav/errors.hpp"
#include "graphnav/rng.hpp"

namespace graphnav {

const char* to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::Corridor: return "corridor";
    case FixtureKind::Tee: return "tee";
    case FixtureKind::Loop: return "loop";
  }
  return "?";
}

FixtureKind fixture_kind_from_string(const std::string& s) {
  if (s == "corridor") return FixtureKind::Corridor;
  if (s == "tee") return FixtureKind::Tee;
  if (s == "loop") return FixtureKind::Loop;
  throw ParseError("unknown fixture kind '" + s + "'");
}

namespace {

constexpr double kWall = 0.1;
// Exit-turn stations sit this far past the door along the corridor. Kept wide
// so an exit edge's chord never falls inside the 36-degree orientation cone
// of a robot crossing the corridor straight at the door; the annotation
// heuristics would otherwise latch onto the wrong branch mid-crossing.
constexpr double kStationOffset = 1.4;
constexpr double kCornerOffset = 0.6;    // junction/corner turn stations
constexpr double kDeadEndInset = 0.45;
constexpr double kStationMerge = 0.35;   // closer stations collapse into one
constexpr double kMaxStationGap = 1.1;   // densify long runs between stations
constexpr double kDoorNodeInset = 0.45;  // from the corridor wall line, into the room
constexpr double kRoomNodeDoorBias = 0.30;  // room node sits toward its door
constexpr double kDoorClearRadius = 0.55;
constexpr double kDoorSeparation = 1.6;  // distinct doors on one lane

struct GridCanvas {
  double ex, ey;
  int W, H;
  std::vector<std::uint8_t> occ;
  std::vector<std::uint16_t> ids;
  std::vector<RoomInfo> rooms;

  GridCanvas(double extent_x, double extent_y)
      : ex(extent_x),
        ey(extent_y),
        W(static_cast<int>(std::ceil(extent_x / kGridResolution))),
        H(static_cast<int>(std::ceil(extent_y / kGridResolution))),
        occ(static_cast<std::size_t>(W) * H, 1),
        ids(static_cast<std::size_t>(W) * H, 0) {}

  int add_region(std::string label, SemClass c) {
    rooms.push_back({std::move(label), c});
    return static_cast<int>(rooms.size()) - 1;
  }

  // Frees every cell whose center lies inside [x0,x1) x [y0,y1) and labels it.
  void carve(double x0, double y0, double x1, double y1, int region) {
    for (int cy = 0; cy < H; ++cy) {
      double py = (cy + 0.5) * kGridResolution;
      if (py < y0 || py >= y1) continue;
      for (int cx = 0; cx < W; ++cx) {
        double px = (cx + 0.5) * kGridResolution;
        if (px < x0 || px >= x1) continue;
        occ[static_cast<std::size_t>(cy) * W + cx] = 0;
        ids[static_cast<std::size_t>(cy) * W + cx] = static_cast<std::uint16_t>(region);
      }
    }
  }

  void fill(double x0, double y0, double x1, double y1) {
    for (int cy = 0; cy < H; ++cy) {
      double py = (cy + 0.5) * kGridResolution;
      if (py < y0 || py >= y1) continue;
      for (int cx = 0; cx < W; ++cx) {
        double px = (cx + 0.5) * kGridResolution;
        if (px < x0 || px >= x1) continue;
        occ[static_cast<std::size_t>(cy) * W + cx] = 1;
      }
    }
  }

  const RoomInfo& region_at(Vec2 p) const {
    int cx = static_cast<int>(std::floor(p.x / kGridResolution));
    int cy = static_cast<int>(std::floor(p.y / kGridResolution));
    return rooms.at(ids.at(static_cast<std::size_t>(cy) * W + cx));
  }

  WorldModel build() { return WorldModel(W, H, std::move(occ), std::move(ids), std::move(rooms)); }
};

struct MapBuilder {
  std::vector<TopoNode> nodes;
  std::vector<TopoEdge> edges;

  int add_node(NodeKind k, bool door, Vec2 p, std::optional<double> th, std::string label) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({id, k, door, p, th, std::move(label)});
    return id;
  }

  void add_edge(int s, int d, BehaviorKind b) {
    int id = static_cast<int>(edges.size());
    edges.push_back({id, s, d, b});
  }

  TopoMap build() { return TopoMap(std::move(nodes), std::move(edges)); }
};

double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Turn direction from travel direction `dir` toward `target` direction.
BehaviorKind turn_toward(Vec2 dir, Vec2 target) {
  return cross2(dir, target) > 0 ? BehaviorKind::TurnLeft : BehaviorKind::TurnRight;
}

/// A straight corridor piece carrying two directed node chains. `fwd` is
/// travel toward increasing axis coordinate.
struct Lane {
  bool horizontal = true;
  double c = 0.0;      // cross-axis centerline coordinate
  double lo = 0.0, hi = 0.0;
  std::vector<double> stations;
  std::vector<double> doors;  // door axis positions, for separation checks
  std::vector<int> fwd_nodes, bwd_nodes;

  Vec2 point(double s) const { return horizontal ? Vec2{s, c} : Vec2{c, s}; }
  double fwd_angle() const { return horizontal ? 0.0 : kPi / 2.0; }
  Vec2 fwd_dir() const { return horizontal ? Vec2{1, 0} : Vec2{0, 1}; }

  void add_station(double s) { stations.push_back(clamp(s, lo, hi)); }

  // Door position draw: inside [lo1, hi1], with both turn stations inside the
  // lane, separated from other doors, and outside any exclusion zones.
  double draw_door(Rng& rng, double lo1, double hi1,
                   const std::vector<std::pair<double, double>>& exclude = {}) {
    double dlo = std::max(lo1, lo + kStationOffset);
    double dhi = std::min(hi1, hi - kStationOffset);
    if (dhi <= dlo) {
      dlo = lo1;
      dhi = hi1;
    }
    double pick = (dlo + dhi) / 2;
    for (int attempt = 0; attempt < 40; ++attempt) {
      double d = rng.uniform(dlo, dhi);
      bool ok = true;
      for (double other : doors)
        if (std::abs(d - other) < kDoorSeparation) ok = false;
      for (auto [zlo, zhi] : exclude)
        if (d > zlo && d < zhi) ok = false;
      if (ok) {
        pick = d;
        break;
      }
    }
    doors.push_back(pick);
    add_station(pick - kStationOffset);
    add_station(pick + kStationOffset);
    return pick;
  }

  // Shared door position (aligned pair): register an existing x.
  void register_door(double s) {
    doors.push_back(s);
    add_station(s - kStationOffset);
    add_station(s + kStationOffset);
  }

  void finalize(const GridCanvas& canvas, MapBuilder& mb) {
    std::sort(stations.begin(), stations.end());
    // Merge close stations (cluster mean), then densify long gaps.
    std::vector<double> merged;
    for (std::size_t i = 0; i < stations.size();) {
      std::size_t j = i + 1;
      double sum = stations[i];
      while (j < stations.size() && stations[j] - stations[j - 1] < kStationMerge)
        sum += stations[j++];
      merged.push_back(sum / (j - i));
      i = j;
    }
    // Densify long runs, but never inside a door's own station pair: a node
    // right at a door axis would out-rank the door's stations as nearest
    // while a robot swings through its exit turn.
    std::vector<double> dense;
    auto near_door = [&](double s) {
      for (double d : doors)
        if (std::abs(s - d) < kStationOffset - 0.05) return true;
      return false;
    };
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (i > 0) {
        double gap = merged[i] - merged[i - 1];
        int extra = static_cast<int>(std::floor(gap / kMaxStationGap));
        for (int k = 1; k <= extra; ++k) {
          double s = merged[i - 1] + gap * k / (extra + 1);
          if (!near_door(s)) dense.push_back(s);
        }
      }
      dense.push_back(merged[i]);
    }
    stations = std::move(dense);

    for (double s : stations) {
      Vec2 p = point(s);
      const RoomInfo& region = canvas.region_at(p);
      NodeKind kind = region.sem == SemClass::Open ? NodeKind::OpenSpace : NodeKind::Hallway;
      fwd_nodes.push_back(mb.add_node(kind, false, p, fwd_angle(), region.label));
      bwd_nodes.push_back(mb.add_node(kind, false, p, wrap_angle(fwd_angle() + kPi), region.label));
    }
    for (std::size_t i = 0; i + 1 < stations.size(); ++i) {
      mb.add_edge(fwd_nodes[i], fwd_nodes[i + 1], BehaviorKind::CorridorFollow);
      mb.add_edge(bwd_nodes[i + 1], bwd_nodes[i], BehaviorKind::CorridorFollow);
    }
  }

  // Station index strictly after / before `s` along the axis.
  std::optional<std::size_t> index_after(double s) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i] > s + 0.05) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> index_before(double s) const {
    for (std::size_t i = stations.size(); i-- > 0;)
      if (stations[i] < s - 0.05) return i;
    return std::nullopt;
  }
  std::size_t index_near(double s) const {
    std::size_t best = 0;
    double bd = std::abs(stations[0] - s);
    for (std::size_t i = 1; i < stations.size(); ++i)
      if (std::abs(stations[i] - s) < bd) bd = std::abs(stations[i] - s), best = i;
    return best;
  }
};

struct Room {
  std::string label;
  SemClass cls = SemClass::Office;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  Vec2 door_point;      // center of the door gap, on the room's wall line
  double exit_heading = 0.0;  // from the room toward its corridor
  double door_s = 0.0;        // door position along the attached lane's axis
  int room_node = -1;
  int door_node = -1;
  Vec2 room_node_pos;   // filled by make_room

  Vec2 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }

  // Room node: on the door axis, biased toward the door along the exit axis
  // (transitions happen near doors, and the find-door chord then matches a
  // straight exit heading).
  Vec2 node_position() const {
    Vec2 n{std::cos(exit_heading), std::sin(exit_heading)};
    double depth = std::abs(n.x) > 0.5 ? (x1 - x0) : (y1 - y0);
    double inset = std::max(0.8, kRoomNodeDoorBias * depth);
    if (std::abs(n.x) > 0.5) {
      double wall = n.x > 0 ? x1 : x0;
      return {wall - n.x * inset, clamp(door_point.y, y0 + 0.6, y1 - 0.6)};
    }
    double wall = n.y > 0 ? y1 : y0;
    return {clamp(door_point.x, x0 + 0.6, x1 - 0.6), wall - n.y * inset};
  }
};

struct FixtureBuild {
  GridCanvas canvas;
  MapBuilder mb;
  std::vector<Room> rooms;
  double door_width = 0.9;

  explicit FixtureBuild(double ex, double ey) : canvas(ex, ey) {}

  // Carves the room and its door gap, and creates room/door nodes + fd edge.
  // `wall_c` is the corridor-side wall line.
  void make_room(Room r, double wall_c) {
    int region = canvas.add_region(r.label, r.cls);
    canvas.carve(r.x0, r.y0, r.x1, r.y1, region);

    Vec2 n{std::cos(r.exit_heading), std::sin(r.exit_heading)};
    double half = door_width / 2;
    // Door gap spans the wall (and any alcove); its cells take the room's label.
    if (std::abs(n.x) > 0.5) {
      double gx0 = std::min(wall_c, n.x > 0 ? r.x1 : r.x0);
      double gx1 = std::max(wall_c, n.x > 0 ? r.x1 : r.x0);
      canvas.carve(gx0, r.door_point.y - half, gx1, r.door_point.y + half, region);
    } else {
      double gy0 = std::min(wall_c, n.y > 0 ? r.y1 : r.y0);
      double gy1 = std::max(wall_c, n.y > 0 ? r.y1 : r.y0);
      canvas.carve(r.door_point.x - half, gy0, r.door_point.x + half, gy1, region);
    }

    r.room_node_pos = r.node_position();
    r.room_node = mb.add_node(NodeKind::Room, false, r.room_node_pos, std::nullopt, r.label);
    // Door node measured from the corridor wall line so its distance to the
    // chain is the same for every room depth.
    Vec2 wall_point = std::abs(n.x) > 0.5 ? Vec2{wall_c, r.door_point.y}
                                          : Vec2{r.door_point.x, wall_c};
    Vec2 door_node_pos = wall_point - n * kDoorNodeInset;
    r.door_node = mb.add_node(NodeKind::Room, true, door_node_pos, r.exit_heading, r.label);
    mb.add_edge(r.room_node, r.door_node, BehaviorKind::FindDoor);
    rooms.push_back(r);
  }

  // Entry turns come from the nearest chain node before the door (so a door
  // close behind another door's exit landing stays reachable); exit turns
  // land on the door's own wide-offset stations.
  void connect_room(Lane& lane, const Room& r) {
    Vec2 to_room{-std::cos(r.exit_heading), -std::sin(r.exit_heading)};
    Vec2 fwd = lane.fwd_dir();
    Vec2 bwd = fwd * -1.0;

    if (auto i = lane.index_before(r.door_s))
      mb.add_edge(lane.fwd_nodes[*i], r.room_node, turn_toward(fwd, to_room));
    if (auto i = lane.index_after(r.door_s))
      mb.add_edge(lane.bwd_nodes[*i], r.room_node, turn_toward(bwd, to_room));

    Vec2 exit{std::cos(r.exit_heading), std::sin(r.exit_heading)};
    std::size_t after = lane.index_near(r.door_s + kStationOffset);
    std::size_t before = lane.index_near(r.door_s - kStationOffset);
    mb.add_edge(r.door_node, lane.fwd_nodes[after], turn_toward(exit, fwd));
    mb.add_edge(r.door_node, lane.bwd_nodes[before], turn_toward(exit, bwd));
  }

  // Straight-across edges for door pairs facing each other over one lane.
  void add_straight_pairs() {
    for (const Room& a : rooms) {
      for (const Room& b : rooms) {
        if (&a == &b) continue;
        double opposite = std::abs(angle_diff(a.exit_heading, b.exit_heading + kPi));
        if (opposite > 0.1) continue;
        Vec2 d = b.door_point - a.door_point;
        double along = std::abs(std::cos(a.exit_heading)) > 0.5 ? std::abs(d.y) : std::abs(d.x);
        double toward = d.dot({std::cos(a.exit_heading), std::sin(a.exit_heading)});
        // Doors must face each other across a single corridor, not the world.
        if (along < 0.3 && toward > 0 && toward < 4.0)
          mb.add_edge(a.door_node, b.room_node, BehaviorKind::Straight);
      }
    }
  }

  void add_clutter(Rng& rng) {
    for (const Room& r : rooms) {
      if (!is_enclosed_room(r.cls)) continue;
      int count = static_cast<int>(rng.uniform_int(3));  // 0..2 rectangles
      for (int k = 0; k < count; ++k) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          double w = rng.uniform(0.3, 0.7);
          double h = rng.uniform(0.3, 0.7);
          double x = rng.uniform(r.x0 + 0.35, r.x1 - 0.35 - w);
          double y = rng.uniform(r.y0 + 0.35, r.y1 - 0.35 - h);
          if (clutter_blocks_door(r, x, y, x + w, y + h)) continue;
          canvas.fill(x, y, x + w, y + h);
          break;
        }
      }
    }
  }

  TopoMap build_map() { return mb.build(); }

 private:
  // True if the rect intrudes on the door-to-node channel the robot needs.
  bool clutter_blocks_door(const Room& r, double x0, double y0, double x1, double y1) const {
    Vec2 a = r.door_point;
    Vec2 b = r.room_node_pos;
    const int samples = static_cast<int>(std::ceil(distance(a, b) / 0.05)) + 1;
    for (int i = 0; i <= samples; ++i) {
      Vec2 p = a + (b - a) * (static_cast<double>(i) / samples);
      double dx = std::max({x0 - p.x, 0.0, p.x - x1});
      double dy = std::max({y0 - p.y, 0.0, p.y - y1});
      if (dx * dx + dy * dy < kDoorClearRadius * kDoorClearRadius) return true;
    }
    return false;
  }
};

Fixture build_corridor(std::uint64_t seed) {
  Rng rng = derive_stream(seed, "fixture/corridor");

  double hw = rng.uniform(1.8, 2.2);
  double dn[2] = {rng.uniform(2.8, 3.6), rng.uniform(2.8, 3.6)};
  double ds[2] = {rng.uniform(2.8, 3.6), rng.uniform(2.8, 3.6)};
  double wn[2] = {rng.uniform(4.2, 4.8), rng.uniform(4.2, 4.8)};
  // The first south office mirrors the first north office so the aligned
  // door pair always fits both.
  double ws[2] = {wn[0], rng.uniform(4.2, 4.8)};
  double door_w = rng.uniform(0.8, 1.0);

  double y_s0 = 0.5;
  double y_h0 = y_s0 + std::max(ds[0], ds[1]) + kWall;
  double y_h1 = y_h0 + hw;
  double y_n0 = y_h1 + kWall;
  double hall_x0 = 0.5;
  double hall_x1 = hall_x0 + std::max(wn[0] + wn[1], ws[0] + ws[1]) + kWall;
  double ex = hall_x1 + 0.5;
  double ey = y_n0 + std::max(dn[0], dn[1]) + 0.5;

  FixtureBuild fb(ex, ey);
  fb.door_width = door_w;
  int hall_region = fb.canvas.add_region("hallway_0", SemClass::Hallway);
  fb.canvas.carve(hall_x0, y_h0, hall_x1, y_h1, hall_region);

  Lane hall;
  hall.horizontal = true;
  hall.c = (y_h0 + y_h1) / 2;
  hall.lo = hall_x0 + 0.3;
  hall.hi = hall_x1 - 0.3;

  // North offices exit south, south offices exit north. The first opposite
  // pair shares a door x so straight-across edges exist in every seed.
  double nx[2] = {hall_x0, hall_x0 + wn[0] + kWall};
  double sx[2] = {hall_x0, hall_x0 + ws[0] + kWall};
  // Door draws keep distinct doors separated and the corridor legs long
  // enough that corridor-follow stretches survive between the transition
  // windows: the shared pair sits at the west end, the second south door in
  // its room's west band, and the second north door at the east end.
  double door0 = hall.draw_door(rng, nx[0] + 0.75, nx[0] + 2.3);
  hall.register_door(door0);  // the aligned twin on the other side
  double door_s1 = hall.draw_door(rng, sx[1] + 0.75, sx[1] + ws[1] - 2.45);
  double door_n1 = hall.draw_door(rng, nx[1] + wn[1] - 2.3, nx[1] + wn[1] - 0.75);

  struct Spec {
    double x0, w, depth, door_x;
    bool north;
    const char* label;
  };
  Spec specs[4] = {{nx[0], wn[0], dn[0], door0, true, "office_0"},
                   {nx[1], wn[1], dn[1], door_n1, true, "office_1"},
                   {sx[0], ws[0], ds[0], door0, false, "office_2"},
                   {sx[1], ws[1], ds[1], door_s1, false, "office_3"}};
  for (const Spec& s : specs) {
    Room r;
    r.label = s.label;
    r.cls = SemClass::Office;
    r.x0 = s.x0;
    r.x1 = s.x0 + s.w;
    r.door_s = s.door_x;
    if (s.north) {
      r.y0 = y_n0;
      r.y1 = y_n0 + s.depth;
      r.exit_heading = -kPi / 2;
      r.door_point = {s.door_x, r.y0};
      fb.make_room(r, y_h1);
    } else {
      r.y1 = y_s0 + s.depth;
      r.y0 = y_s0;
      r.exit_heading = kPi / 2;
      r.door_point = {s.door_x, r.y1};
      fb.make_room(r, y_h0);
    }
  }
  hall.add_station(hall_x0 + kDeadEndInset);
  hall.add_station(hall_x1 - kDeadEndInset);
  hall.finalize(fb.canvas, fb.mb);

  for (const Room& r : fb.rooms) fb.connect_room(hall, r);
  fb.add_straight_pairs();
  fb.add_clutter(rng);

  return {fb.canvas.build(), fb.build_map(), "corridor-" + std::to_string(seed)};
}

Fixture build_tee(std::uint64_t seed) {
  Rng rng = derive_stream(seed, "fixture/tee");

  double hw = rng.uniform(1.8, 2.2);   // bar width
  double sw = rng.uniform(1.8, 2.2);   // stem width
  double ow = rng.uniform(4.6, 5.4);   // open space width
  double oh = rng.uniform(3.6, 4.4);   // open space height
  double sl = rng.uniform(2.6, 3.4);   // stem length
  double door_w = rng.uniform(0.8, 1.0);
  double wn[2] = {rng.uniform(3.4, 4.2), rng.uniform(3.4, 4.2)};
  double dn[2] = {rng.uniform(2.8, 3.4), rng.uniform(2.8, 3.4)};
  double side_depth = rng.uniform(2.8, 3.4);

  // Vertical stack: open space, stem, bar, north rooms.
  double oy0 = 0.5 + side_depth + kWall;  // rooms flank the open space
  double oy1 = oy0 + oh;
  double by0 = oy1 + sl;
  double by1 = by0 + hw;
  double ny0 = by1 + kWall;

  double bar_x0 = 0.5;
  double bar_x1 = bar_x0 + 2 * std::max(wn[0], wn[1]) + 2 * std::max(sw, 3.2) + 2.0;
  double jx = (bar_x0 + bar_x1) / 2;  // stem center
  double ox0 = jx - ow / 2;
  double ox1 = jx + ow / 2;

  double ex = std::max(bar_x1, ox1 + kWall + side_depth) + 0.5;
  double ey = ny0 + std::max(dn[0], dn[1]) + 0.5;

  FixtureBuild fb(ex, ey);
  fb.door_width = door_w;
  int open_region = fb.canvas.add_region("open_0", SemClass::Open);
  fb.canvas.carve(ox0, oy0, ox1, oy1, open_region);
  int stem_region = fb.canvas.add_region("hallway_1", SemClass::Hallway);
  fb.canvas.carve(jx - sw / 2, oy1, jx + sw / 2, by0, stem_region);
  int bar_region = fb.canvas.add_region("hallway_0", SemClass::Hallway);
  fb.canvas.carve(bar_x0, by0, bar_x1, by1, bar_region);

  Lane bar;
  bar.horizontal = true;
  bar.c = (by0 + by1) / 2;
  bar.lo = bar_x0 + 0.3;
  bar.hi = bar_x1 - 0.3;

  Lane stem;  // runs from inside the open space up to the bar
  stem.horizontal = false;
  stem.c = jx;
  stem.lo = oy0 + kDeadEndInset;
  stem.hi = by0 - 0.4;

  // Doors on the bar keep clear of the junction so exit landings never
  // overshoot the junction turn stations.
  std::vector<std::pair<double, double>> no_junction{{jx - 2.2, jx + 2.2}};

  // Two rooms north of the bar, west and east of the stem.
  for (int i = 0; i < 2; ++i) {
    Room r;
    r.label = i == 0 ? "office_0" : "office_1";
    r.cls = SemClass::Office;
    if (i == 0) {
      r.x0 = bar_x0 + 0.3;
      r.x1 = r.x0 + wn[0];
    } else {
      r.x1 = bar_x1 - 0.3;
      r.x0 = r.x1 - wn[1];
    }
    r.y0 = ny0;
    r.y1 = ny0 + dn[i];
    r.exit_heading = -kPi / 2;
    double dx = bar.draw_door(rng, r.x0 + 0.75, r.x1 - 0.75, no_junction);
    r.door_point = {dx, r.y0};
    r.door_s = dx;
    fb.make_room(r, by1);
  }

  // Two rooms south of the bar flanking the stem.
  for (int i = 0; i < 2; ++i) {
    Room r;
    r.label = i == 0 ? "office_2" : "conference_0";
    r.cls = i == 0 ? SemClass::Office : SemClass::Conference;
    if (i == 0) {
      r.x1 = std::min(ox0, jx - sw / 2) - kWall - 0.2;
      r.x0 = std::max(0.5, r.x1 - rng.uniform(3.2, 3.8));
    } else {
      r.x0 = std::max(ox1, jx + sw / 2) + kWall + 0.2;
      r.x1 = std::min(ex - 0.5, r.x0 + rng.uniform(3.2, 3.8));
    }
    r.y1 = by0 - kWall;
    r.y0 = r.y1 - rng.uniform(2.6, 3.2);
    r.exit_heading = kPi / 2;
    double dx = bar.draw_door(rng, r.x0 + 0.75, r.x1 - 0.75, no_junction);
    r.door_point = {dx, r.y1};
    r.door_s = dx;
    fb.make_room(r, by0);
  }

  // Two rooms flanking the open space, reached from the stem lane.
  for (int i = 0; i < 2; ++i) {
    Room r;
    r.label = i == 0 ? "storage_0" : "office_3";
    r.cls = i == 0 ? SemClass::Storage : SemClass::Office;
    r.y0 = oy0 + 0.2;
    r.y1 = oy0 + oh - 0.2;
    if (i == 0) {
      r.x1 = ox0 - kWall;
      r.x0 = r.x1 - side_depth;
      r.exit_heading = 0.0;  // east into the open space
    } else {
      r.x0 = ox1 + kWall;
      r.x1 = r.x0 + side_depth;
      r.exit_heading = kPi;  // west into the open space
    }
    double dy = stem.draw_door(rng, r.y0 + 0.75, r.y1 - 0.75);
    r.door_point = {i == 0 ? r.x1 : r.x0, dy};
    r.door_s = dy;
    fb.make_room(r, i == 0 ? ox0 : ox1);
  }

  // Junction stations.
  bar.add_station(jx - kCornerOffset);
  bar.add_station(jx + kCornerOffset);
  bar.add_station(bar_x0 + kDeadEndInset);
  bar.add_station(bar_x1 - kDeadEndInset);
  stem.add_station(by0 - kCornerOffset);

  bar.finalize(fb.canvas, fb.mb);
  stem.finalize(fb.canvas, fb.mb);

  for (const Room& r : fb.rooms) {
    bool on_bar = std::abs(std::abs(r.exit_heading) - kPi / 2) < 0.1;
    fb.connect_room(on_bar ? bar : stem, r);
  }

  // Bar <-> stem turns at the junction.
  std::size_t b_west = bar.index_near(jx - kCornerOffset);
  std::size_t b_east = bar.index_near(jx + kCornerOffset);
  std::size_t s_top = stem.index_near(by0 - kCornerOffset);
  fb.mb.add_edge(bar.fwd_nodes[b_west], stem.bwd_nodes[s_top], BehaviorKind::TurnRight);
  fb.mb.add_edge(bar.bwd_nodes[b_east], stem.bwd_nodes[s_top], BehaviorKind::TurnLeft);
  fb.mb.add_edge(stem.fwd_nodes[s_top], bar.fwd_nodes[b_east], BehaviorKind::TurnRight);
  fb.mb.add_edge(stem.fwd_nodes[s_top], bar.bwd_nodes[b_west], BehaviorKind::TurnLeft);

  fb.add_straight_pairs();
  fb.add_clutter(rng);

  return {fb.canvas.build(), fb.build_map(), "tee-" + std::to_string(seed)};
}

Fixture build_loop(std::uint64_t seed) {
  Rng rng = derive_stream(seed, "fixture/loop");

  double hw = rng.uniform(1.8, 2.2);
  double ring_w = rng.uniform(10.2, 11.2);  // outer ring extent x
  double ring_h = rng.uniform(10.0, 10.8);  // outer ring extent y
  double depth = rng.uniform(2.8, 3.4);     // room depth
  double door_w = rng.uniform(0.8, 1.0);

  double rx0 = 0.5 + depth + kWall;
  double ry0 = 0.5 + depth + kWall;
  double rx1 = rx0 + ring_w;
  double ry1 = ry0 + ring_h;
  double ex = rx1 + kWall + depth + 0.5;
  double ey = ry1 + kWall + depth + 0.5;

  FixtureBuild fb(ex, ey);
  fb.door_width = door_w;
  // Vertical slices first so the corner cells belong to the horizontal rows.
  int left_region = fb.canvas.add_region("hallway_3", SemClass::Hallway);
  fb.canvas.carve(rx0, ry0 + hw, rx0 + hw, ry1 - hw, left_region);
  int right_region = fb.canvas.add_region("hallway_1", SemClass::Hallway);
  fb.canvas.carve(rx1 - hw, ry0 + hw, rx1, ry1 - hw, right_region);
  int bottom_region = fb.canvas.add_region("hallway_0", SemClass::Hallway);
  fb.canvas.carve(rx0, ry0, rx1, ry0 + hw, bottom_region);
  int top_region = fb.canvas.add_region("hallway_2", SemClass::Hallway);
  fb.canvas.carve(rx0, ry1 - hw, rx1, ry1, top_region);

  Lane bottom, top, left, right;
  bottom.horizontal = true;
  bottom.c = ry0 + hw / 2;
  bottom.lo = rx0 + 0.35;
  bottom.hi = rx1 - 0.35;
  top = bottom;
  top.c = ry1 - hw / 2;
  left.horizontal = false;
  left.c = rx0 + hw / 2;
  left.lo = ry0 + 0.35;
  left.hi = ry1 - 0.35;
  right = left;
  right.c = rx1 - hw / 2;

  struct Corner {
    double x, y;
  };
  Corner corners[4] = {{rx0 + hw / 2, ry0 + hw / 2},
                       {rx1 - hw / 2, ry0 + hw / 2},
                       {rx1 - hw / 2, ry1 - hw / 2},
                       {rx0 + hw / 2, ry1 - hw / 2}};
  bottom.add_station(corners[0].x + kCornerOffset);
  bottom.add_station(corners[1].x - kCornerOffset);
  top.add_station(corners[3].x + kCornerOffset);
  top.add_station(corners[2].x - kCornerOffset);
  left.add_station(corners[0].y + kCornerOffset);
  left.add_station(corners[3].y - kCornerOffset);
  right.add_station(corners[1].y + kCornerOffset);
  right.add_station(corners[2].y - kCornerOffset);

  // Two rooms on the outside of each ring side. Exit landings near corners
  // collapse onto the corner stations, which carry the ring turns.
  struct SideSpec {
    Lane* lane;
    bool along_x;
    double wall;          // wall line between room and corridor
    double exit_heading;  // room -> corridor
    const char* labels[2];
    SemClass cls[2];
  };
  SideSpec sides[4] = {
      {&bottom, true, ry0, kPi / 2, {"office_0", "office_1"}, {SemClass::Office, SemClass::Office}},
      {&right, false, rx1, kPi, {"office_2", "conference_0"}, {SemClass::Office, SemClass::Conference}},
      {&top, true, ry1, -kPi / 2, {"office_3", "storage_0"}, {SemClass::Office, SemClass::Storage}},
      {&left, false, rx0, 0.0, {"conference_1", "storage_1"}, {SemClass::Conference, SemClass::Storage}},
  };
  for (const SideSpec& side : sides) {
    double span_lo = side.along_x ? rx0 : ry0;
    double span_hi = side.along_x ? rx1 : ry1;
    // Doors first: clear of the corner turn stations (an exit landing past a
    // corner station would strand the rollout on a chain terminus), mutually
    // separated, with the rooms built around them.
    double wlo = span_lo + hw / 2 + kCornerOffset + kStationOffset + 0.3;
    double whi = span_hi - hw / 2 - kCornerOffset - kStationOffset - 0.3;
    double mid = (wlo + whi) / 2;
    for (int i = 0; i < 2; ++i) {
      double door_a = i == 0 ? side.lane->draw_door(rng, wlo, mid - 0.8)
                             : side.lane->draw_door(rng, mid + 0.8, whi);
      double lo_ext = rng.uniform(1.4, 2.0);
      double hi_ext = rng.uniform(1.4, 2.0);
      double a0 = std::max(span_lo + 0.2, door_a - lo_ext);
      double a1 = std::min(span_hi - 0.2, door_a + hi_ext);
      if (i == 0) a1 = std::min(a1, mid - 0.1);
      if (i == 1) a0 = std::max(a0, mid + 0.1);
      Room r;
      r.label = side.labels[i];
      r.cls = side.cls[i];
      r.exit_heading = side.exit_heading;
      if (side.along_x) {
        r.x0 = a0;
        r.x1 = a1;
        if (side.wall == ry0) {  // room below the bottom corridor
          r.y1 = ry0 - kWall;
          r.y0 = r.y1 - depth;
          r.door_point = {door_a, r.y1};
        } else {
          r.y0 = ry1 + kWall;
          r.y1 = r.y0 + depth;
          r.door_point = {door_a, r.y0};
        }
      } else {
        r.y0 = a0;
        r.y1 = a1;
        if (side.wall == rx1) {  // room east of the right corridor
          r.x0 = rx1 + kWall;
          r.x1 = r.x0 + depth;
          r.door_point = {r.x0, door_a};
        } else {
          r.x1 = rx0 - kWall;
          r.x0 = r.x1 - depth;
          r.door_point = {r.x1, door_a};
        }
      }
      r.door_s = door_a;
      fb.make_room(r, side.wall);
    }
  }

  bottom.finalize(fb.canvas, fb.mb);
  top.finalize(fb.canvas, fb.mb);
  left.finalize(fb.canvas, fb.mb);
  right.finalize(fb.canvas, fb.mb);

  {
    std::size_t i = 0;
    for (const SideSpec& side : sides) {
      for (int k = 0; k < 2; ++k) fb.connect_room(*side.lane, fb.rooms[i++]);
    }
  }

  auto tl = BehaviorKind::TurnLeft;
  auto tr = BehaviorKind::TurnRight;
  auto b0 = bottom.index_near(corners[0].x + kCornerOffset);
  auto b1 = bottom.index_near(corners[1].x - kCornerOffset);
  auto t3 = top.index_near(corners[3].x + kCornerOffset);
  auto t2 = top.index_near(corners[2].x - kCornerOffset);
  auto l0 = left.index_near(corners[0].y + kCornerOffset);
  auto l3 = left.index_near(corners[3].y - kCornerOffset);
  auto r1 = right.index_near(corners[1].y + kCornerOffset);
  auto r2 = right.index_near(corners[2].y - kCornerOffset);
  // ccw: bottom.fwd -> right.fwd -> top.bwd -> left.bwd -> bottom.fwd
  fb.mb.add_edge(bottom.fwd_nodes[b1], right.fwd_nodes[r1], tl);
  fb.mb.add_edge(right.fwd_nodes[r2], top.bwd_nodes[t2], tl);
  fb.mb.add_edge(top.bwd_nodes[t3], left.bwd_nodes[l3], tl);
  fb.mb.add_edge(left.bwd_nodes[l0], bottom.fwd_nodes[b0], tl);
  // cw: bottom.bwd -> left.fwd -> top.fwd -> right.bwd -> bottom.bwd
  fb.mb.add_edge(bottom.bwd_nodes[b0], left.fwd_nodes[l0], tr);
  fb.mb.add_edge(left.fwd_nodes[l3], top.fwd_nodes[t3], tr);
  fb.mb.add_edge(top.fwd_nodes[t2], right.bwd_nodes[r2], tr);
  fb.mb.add_edge(right.bwd_nodes[r1], bottom.bwd_nodes[b1], tr);

  fb.add_straight_pairs();
  fb.add_clutter(rng);

  return {fb.canvas.build(), fb.build_map(), "loop-" + std::to_string(seed)};
}

}  // namespace

Fixture gen_fixture_world(FixtureKind kind, std::uint64_t seed) {
  switch (kind) {
    case FixtureKind::Corridor: return build_corridor(seed);
    case FixtureKind::Tee: return build_tee(seed);
    case FixtureKind::Loop: return build_loop(seed);
  }
  throw ContractViolation("unknown fixture kind");
}

}  // namespace graphnav
