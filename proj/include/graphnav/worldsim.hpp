#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graphnav/geometry.hpp"
#include "graphnav/rng.hpp"

namespace graphnav {

// Simulation constants. The control rate, velocity cap, scan clipping, and
// noise model follow the navigation setup this workbench reproduces; the
// footprint, angular cap, and ray count are declared workbench defaults.
inline constexpr double kGridResolution = 0.05;   // m per cell
inline constexpr double kFootprintRadius = 0.18;  // m
inline constexpr double kMaxLinearVel = 0.5;      // m/s
inline constexpr double kMaxAngularVel = 1.5;     // rad/s
inline constexpr double kControlDt = 0.2;         // s (5 Hz)
inline constexpr double kCollisionSubDt = 0.02;   // s, swept-footprint substep
inline constexpr int kScanRays = 64;
inline constexpr double kScanFovDeg = 150.0;
inline constexpr double kScanMaxRange = 3.5;      // m

enum class SemClass { Office, Hallway, Open, Conference, Storage, Occupied };
const char* to_string(SemClass c);
SemClass sem_class_from_string(const std::string& s);

struct RoomInfo {
  std::string label;  // instance label, e.g. "office_1"
  SemClass sem = SemClass::Office;
};

/// True for classes that count as enclosed rooms (as opposed to traversal
/// space) in annotation heuristics.
inline bool is_enclosed_room(SemClass c) {
  return c == SemClass::Office || c == SemClass::Conference || c == SemClass::Storage;
}

/// Occupancy-grid world with per-cell room instance labels. Immutable after
/// generation. Cell (0,0) is the corner at metric (0,0); cell centers sit at
/// ((cx+0.5)*res, (cy+0.5)*res).
class WorldModel {
 public:
  WorldModel(int width, int height, std::vector<std::uint8_t> occupancy,
             std::vector<std::uint16_t> room_ids, std::vector<RoomInfo> rooms);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return kGridResolution; }
  double extent_x() const { return width_ * kGridResolution; }
  double extent_y() const { return height_ * kGridResolution; }

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < width_ && cy < height_;
  }
  /// Out-of-bounds cells read as occupied.
  bool occupied(int cx, int cy) const {
    return !in_bounds(cx, cy) || occ_[static_cast<std::size_t>(cy) * width_ + cx] != 0;
  }
  std::uint16_t room_id_at_cell(int cx, int cy) const {
    return room_ids_[static_cast<std::size_t>(cy) * width_ + cx];
  }
  const std::vector<RoomInfo>& rooms() const { return rooms_; }
  const std::vector<std::uint8_t>& occupancy_raster() const { return occ_; }
  const std::vector<std::uint16_t>& room_id_raster() const { return room_ids_; }

  int cell_x(double x) const { return static_cast<int>(std::floor(x / kGridResolution)); }
  int cell_y(double y) const { return static_cast<int>(std::floor(y / kGridResolution)); }

  bool operator==(const WorldModel& o) const {
    return width_ == o.width_ && height_ == o.height_ && occ_ == o.occ_ &&
           room_ids_ == o.room_ids_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint16_t> room_ids_;
  std::vector<RoomInfo> rooms_;
};

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, (-pi, pi]
  double time = 0.0;   // seconds
};

struct VelocityCmd {
  double v_p = 0.0;      // m/s
  double v_theta = 0.0;  // rad/s
};

inline VelocityCmd clamp_cmd(const VelocityCmd& c) {
  return {clamp(c.v_p, -kMaxLinearVel, kMaxLinearVel),
          clamp(c.v_theta, -kMaxAngularVel, kMaxAngularVel)};
}

/// Clipped depth scan: kScanRays rays spanning kScanFovDeg centered on the
/// robot heading, ranges in [0, kScanMaxRange].
struct ScanObs {
  std::array<double, kScanRays> ranges{};
};

struct CollisionEvent {
  RobotState state;  // pose at impact (footprint overlaps an obstacle)
};

using StepResult = std::variant<RobotState, CollisionEvent>;

/// True if a footprint disc centered at (x, y) is free of occupied cells.
bool footprint_clear(const WorldModel& world, double x, double y);

/// Integrates one control tick: x' = x + v_p cos(theta) dt, y' likewise,
/// theta' = wrap(theta + v_theta dt). The swept footprint is checked at
/// kCollisionSubDt substeps; any overlap yields a CollisionEvent (terminal).
/// Commands outside the velocity caps are a caller bug (ContractViolation).
StepResult step(const WorldModel& world, const RobotState& state, const VelocityCmd& cmd,
                double dt = kControlDt);

/// Ray i leaves at bearing theta - fov/2 + i * fov/(kScanRays-1); range is the
/// distance to the first occupied cell boundary, clipped to kScanMaxRange.
ScanObs raycast_scan(const WorldModel& world, const RobotState& state);

/// Persistent velocity-noise offsets, updated as z' = 0.95 z + 0.05 n.
struct NoiseState {
  double z_p = 0.0;
  double z_theta = 0.0;
};

/// Deterministic core of the noise update given the sampled n = (n_p, n_theta).
std::pair<NoiseState, VelocityCmd> inject_noise_with(const NoiseState& z,
                                                     const VelocityCmd& raw, double n_p,
                                                     double n_theta);

/// Samples n_p ~ N(0, 0.2), n_theta ~ N(0, 1) (variances), applies the update,
/// and clamps the noisy command to the velocity caps.
std::pair<NoiseState, VelocityCmd> inject_noise(const NoiseState& z, const VelocityCmd& raw,
                                                Rng& rng);

/// Room lookup at a metric position. Occupied cells report ("occupied",
/// SemClass::Occupied). Out-of-bounds positions throw QueryError.
std::pair<std::string, SemClass> room_at(const WorldModel& world, double x, double y);

// --- World file I/O (JSON header + base64 rasters) --------------------------

void write_world(const std::string& path, const WorldModel& world);
WorldModel read_world(const std::string& path);

}  // namespace graphnav
