#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphnav/errors.hpp"
#include "graphnav/worldsim.hpp"

namespace graphnav {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr char kB64Table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t v = data[i] << 16;
    if (i + 1 < len) v |= data[i + 1] << 8;
    if (i + 2 < len) v |= data[i + 2];
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back(i + 1 < len ? kB64Table[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kB64Table[v & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw ParseError("invalid base64 character");
  };
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i + 3 < text.size(); i += 4) {
    int a = val(text[i]), b = val(text[i + 1]), c = val(text[i + 2]), d = val(text[i + 3]);
    out.push_back(static_cast<std::uint8_t>((a << 2) | (b >> 4)));
    if (c >= 0) out.push_back(static_cast<std::uint8_t>(((b & 15) << 4) | (c >> 2)));
    if (d >= 0) out.push_back(static_cast<std::uint8_t>(((c & 3) << 6) | d));
  }
  return out;
}

}  // namespace

void write_world(const std::string& path, const WorldModel& world) {
  ordered_json j;
  j["version"] = 1;
  j["width"] = world.width();
  j["height"] = world.height();
  j["resolution"] = world.resolution();
  j["rooms"] = ordered_json::array();
  for (const RoomInfo& r : world.rooms()) {
    ordered_json jr;
    jr["label"] = r.label;
    jr["class"] = to_string(r.sem);
    j["rooms"].push_back(jr);
  }
  j["occupancy"] = base64_encode(world.occupancy_raster().data(), world.occupancy_raster().size());

  // Room ids serialize little-endian uint16.
  std::vector<std::uint8_t> ids;
  ids.reserve(world.room_id_raster().size() * 2);
  for (std::uint16_t v : world.room_id_raster()) {
    ids.push_back(static_cast<std::uint8_t>(v & 0xFF));
    ids.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  j["room_ids"] = base64_encode(ids.data(), ids.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write world file '" + path + "'");
  out << j.dump(2) << "\n";
}

WorldModel read_world(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open world file '" + path + "'");
  ordered_json j;
  try {
    in >> j;
    int width = j.at("width").get<int>();
    int height = j.at("height").get<int>();
    std::vector<RoomInfo> rooms;
    for (const auto& jr : j.at("rooms"))
      rooms.push_back({jr.at("label").get<std::string>(),
                       sem_class_from_string(jr.at("class").get<std::string>())});
    std::vector<std::uint8_t> occ = base64_decode(j.at("occupancy").get<std::string>());
    std::vector<std::uint8_t> idb = base64_decode(j.at("room_ids").get<std::string>());
    if (idb.size() != occ.size() * 2) throw ParseError("world file: raster size mismatch");
    std::vector<std::uint16_t> ids(occ.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      ids[i] = static_cast<std::uint16_t>(idb[2 * i] | (idb[2 * i + 1] << 8));
    return WorldModel(width, height, std::move(occ), std::move(ids), std::move(rooms));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("world file: ") + e.what());
  }
}

}  // namespace graphnav
