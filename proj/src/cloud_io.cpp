#include "vantage/cloud_io.hpp"

#include <json.hpp>

#include <charconv>
#include <sstream>

#include "vantage/serial.hpp"

namespace vantage {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

LandmarkCloud load_ply(const std::filesystem::path& path) {
  auto is = open_input(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("ply", 0) != 0)
    throw io_error(path.string() + ": missing ply magic");

  size_t vertex_count = 0;
  int xi = -1, yi = -1, zi = -1;
  int prop_index = 0;
  bool in_vertex_element = false;
  bool header_done = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment") continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw io_error(path.string() + ": only ascii ply supported");
    } else if (tok == "element") {
      std::string name;
      size_t count = 0;
      ls >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
      prop_index = 0;
    } else if (tok == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      ls >> type >> name;
      if (name == "x") xi = prop_index;
      if (name == "y") yi = prop_index;
      if (name == "z") zi = prop_index;
      ++prop_index;
    } else if (tok == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw io_error(path.string() + ": unterminated ply header");
  if (xi < 0 || yi < 0 || zi < 0)
    throw io_error(path.string() + ": vertex element lacks x/y/z properties");

  std::vector<Landmark> landmarks;
  landmarks.reserve(vertex_count);
  for (size_t i = 0; i < vertex_count; ++i) {
    if (!std::getline(is, line))
      throw io_error(path.string() + ": truncated vertex data");
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    int needed = std::max({xi, yi, zi});
    if (static_cast<int>(vals.size()) <= needed)
      throw io_error(path.string() + ": vertex line " + std::to_string(i) + " too short");
    landmarks.push_back({static_cast<int64_t>(i), Vec3(vals[xi], vals[yi], vals[zi])});
  }
  if (landmarks.empty()) throw io_error(path.string() + ": cloud is empty");
  return LandmarkCloud(std::move(landmarks));
}

LandmarkCloud load_jsonl(const std::filesystem::path& path) {
  auto is = open_input(path);
  std::vector<Landmark> landmarks;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("id") || !j.contains("x") || !j.contains("y") || !j.contains("z"))
      throw io_error(path.string() + ":" + std::to_string(lineno) +
                     ": object needs id, x, y, z");
    landmarks.push_back({j["id"].get<int64_t>(),
                         Vec3(j["x"].get<double>(), j["y"].get<double>(),
                              j["z"].get<double>())});
  }
  if (landmarks.empty()) throw io_error(path.string() + ": cloud is empty");
  return LandmarkCloud(std::move(landmarks));
}

}  // namespace

LandmarkCloud load_cloud(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".ply") return load_ply(path);
  if (ext == ".jsonl") return load_jsonl(path);
  throw io_error(path.string() + ": unknown cloud format (expect .ply or .jsonl)");
}

void save_cloud(const LandmarkCloud& cloud, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".ply") {
    atomic_write_file(path, [&](std::ostream& os) {
      os << "ply\nformat ascii 1.0\n";
      os << "element vertex " << cloud.size() << "\n";
      os << "property double x\nproperty double y\nproperty double z\n";
      os << "end_header\n";
      for (const auto& lm : cloud.landmarks())
        os << format_double(lm.position.x()) << ' ' << format_double(lm.position.y())
           << ' ' << format_double(lm.position.z()) << '\n';
    });
  } else if (ext == ".jsonl") {
    atomic_write_file(path, [&](std::ostream& os) {
      for (const auto& lm : cloud.landmarks()) {
        nlohmann::json j{{"id", lm.id},
                         {"x", lm.position.x()},
                         {"y", lm.position.y()},
                         {"z", lm.position.z()}};
        os << j.dump() << '\n';
      }
    });
  } else {
    throw io_error(path.string() + ": unknown cloud format (expect .ply or .jsonl)");
  }
}

}  // namespace vantage
