#pragma once

#include <cstdint>
#include <string>

#include "graphnav/topomap.hpp"
#include "graphnav/worldsim.hpp"

namespace graphnav {

enum class FixtureKind { Corridor, Tee, Loop };
const char* to_string(FixtureKind k);
FixtureKind fixture_kind_from_string(const std::string& s);

/// A generated world plus its aligned topological map.
struct Fixture {
  WorldModel world;
  TopoMap map;
  std::string id;  // e.g. "corridor-7"
};

/// Procedurally generates a fixture world and its rule-conforming map.
///   Corridor: straight hallway with 4 offices (two per side).
///   Tee:      T-junction, 6 rooms, one open space at the stem's end.
///   Loop:     rectangular loop corridor with 8 rooms on the outside.
/// The seed perturbs room dimensions, door positions, and clutter. The same
/// (kind, seed) always produces a bit-identical world. Door gaps are at
/// least 0.7 m wide and the map passes validate_map by construction.
Fixture gen_fixture_world(FixtureKind kind, std::uint64_t seed);

}  // namespace graphnav
