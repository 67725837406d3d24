#include "graphnav/worldsim.hpp"

#include <cmath>

#include "graphnav/errors.hpp"

namespace graphnav {

const char* to_string(SemClass c) {
  switch (c) {
    case SemClass::Office: return "office";
    case SemClass::Hallway: return "hallway";
    case SemClass::Open: return "open";
    case SemClass::Conference: return "conference";
    case SemClass::Storage: return "storage";
    case SemClass::Occupied: return "occupied";
  }
  return "?";
}

SemClass sem_class_from_string(const std::string& s) {
  if (s == "office") return SemClass::Office;
  if (s == "hallway") return SemClass::Hallway;
  if (s == "open") return SemClass::Open;
  if (s == "conference") return SemClass::Conference;
  if (s == "storage") return SemClass::Storage;
  if (s == "occupied") return SemClass::Occupied;
  throw ParseError("unknown semantic class '" + s + "'");
}

WorldModel::WorldModel(int width, int height, std::vector<std::uint8_t> occupancy,
                       std::vector<std::uint16_t> room_ids, std::vector<RoomInfo> rooms)
    : width_(width),
      height_(height),
      occ_(std::move(occupancy)),
      room_ids_(std::move(room_ids)),
      rooms_(std::move(rooms)) {
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  if (width_ <= 0 || height_ <= 0 || occ_.size() != n || room_ids_.size() != n)
    throw StructureError("world raster size mismatch");
  for (int cx = 0; cx < width_; ++cx)
    if (!occupied(cx, 0) || !occupied(cx, height_ - 1))
      throw StructureError("world boundary not occupied");
  for (int cy = 0; cy < height_; ++cy)
    if (!occupied(0, cy) || !occupied(width_ - 1, cy))
      throw StructureError("world boundary not occupied");
}

bool footprint_clear(const WorldModel& world, double x, double y) {
  const double r = kFootprintRadius;
  const double res = kGridResolution;
  int cx0 = world.cell_x(x - r);
  int cx1 = world.cell_x(x + r);
  int cy0 = world.cell_y(y - r);
  int cy1 = world.cell_y(y + r);
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      if (!world.occupied(cx, cy)) continue;
      // Distance from disc center to the cell rectangle.
      double rx0 = cx * res, rx1 = (cx + 1) * res;
      double ry0 = cy * res, ry1 = (cy + 1) * res;
      double dx = std::max({rx0 - x, 0.0, x - rx1});
      double dy = std::max({ry0 - y, 0.0, y - ry1});
      if (dx * dx + dy * dy < r * r) return false;
    }
  }
  return true;
}

StepResult step(const WorldModel& world, const RobotState& state, const VelocityCmd& cmd,
                double dt) {
  constexpr double kCapTol = 1e-9;
  if (std::abs(cmd.v_p) > kMaxLinearVel + kCapTol ||
      std::abs(cmd.v_theta) > kMaxAngularVel + kCapTol)
    throw ContractViolation("velocity command exceeds caps");

  // Position advances along the initial heading; substeps sample the same
  // parameterization so the end state equals the single-step integration.
  const double cos_t = std::cos(state.theta);
  const double sin_t = std::sin(state.theta);
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / kCollisionSubDt - 1e-12)));
  for (int k = 1; k <= substeps; ++k) {
    double t = dt * k / substeps;
    double x = state.x + cmd.v_p * cos_t * t;
    double y = state.y + cmd.v_p * sin_t * t;
    if (!footprint_clear(world, x, y)) {
      return CollisionEvent{
          {x, y, wrap_angle(state.theta + cmd.v_theta * t), state.time + t}};
    }
  }
  return RobotState{state.x + cmd.v_p * cos_t * dt, state.y + cmd.v_p * sin_t * dt,
                    wrap_angle(state.theta + cmd.v_theta * dt), state.time + dt};
}

namespace {

// Grid traversal (Amanatides & Woo): distance from (x, y) along `bearing` to
// the first occupied cell boundary, clipped to max_range.
double cast_ray(const WorldModel& world, double x, double y, double bearing, double max_range) {
  const double res = kGridResolution;
  const double dx = std::cos(bearing);
  const double dy = std::sin(bearing);

  int cx = world.cell_x(x);
  int cy = world.cell_y(y);
  if (world.occupied(cx, cy)) return 0.0;

  const int step_x = dx > 0 ? 1 : -1;
  const int step_y = dy > 0 ? 1 : -1;
  // Ray length to the first vertical / horizontal cell boundary.
  double t_max_x = dx != 0.0
                       ? ((dx > 0 ? (cx + 1) * res - x : x - cx * res) / std::abs(dx))
                       : std::numeric_limits<double>::infinity();
  double t_max_y = dy != 0.0
                       ? ((dy > 0 ? (cy + 1) * res - y : y - cy * res) / std::abs(dy))
                       : std::numeric_limits<double>::infinity();
  const double t_delta_x = dx != 0.0 ? res / std::abs(dx) : 0.0;
  const double t_delta_y = dy != 0.0 ? res / std::abs(dy) : 0.0;

  while (true) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cx += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cy += step_y;
    }
    if (t > max_range) return max_range;
    if (world.occupied(cx, cy)) return t;
  }
}

}  // namespace

ScanObs raycast_scan(const WorldModel& world, const RobotState& state) {
  ScanObs obs;
  const double fov = deg2rad(kScanFovDeg);
  for (int i = 0; i < kScanRays; ++i) {
    double bearing = state.theta - fov / 2.0 + fov * i / (kScanRays - 1);
    obs.ranges[i] = cast_ray(world, state.x, state.y, bearing, kScanMaxRange);
  }
  return obs;
}

std::pair<NoiseState, VelocityCmd> inject_noise_with(const NoiseState& z,
                                                     const VelocityCmd& raw, double n_p,
                                                     double n_theta) {
  NoiseState nz{0.95 * z.z_p + 0.05 * n_p, 0.95 * z.z_theta + 0.05 * n_theta};
  VelocityCmd noisy = clamp_cmd({raw.v_p + nz.z_p, raw.v_theta + nz.z_theta});
  return {nz, noisy};
}

std::pair<NoiseState, VelocityCmd> inject_noise(const NoiseState& z, const VelocityCmd& raw,
                                                Rng& rng) {
  // N(0, 0.2) and N(0, 1) are variances, per the noise model.
  double n_p = rng.normal() * std::sqrt(0.2);
  double n_theta = rng.normal();
  return inject_noise_with(z, raw, n_p, n_theta);
}

std::pair<std::string, SemClass> room_at(const WorldModel& world, double x, double y) {
  int cx = world.cell_x(x);
  int cy = world.cell_y(y);
  if (!world.in_bounds(cx, cy))
    throw QueryError("room_at: position (" + std::to_string(x) + ", " + std::to_string(y) +
                     ") outside world bounds");
  if (world.occupied(cx, cy)) return {"occupied", SemClass::Occupied};
  const RoomInfo& info = world.rooms().at(world.room_id_at_cell(cx, cy));
  return {info.label, info.sem};
}

}  // namespace graphnav
