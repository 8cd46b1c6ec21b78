#pragma once

#include <filesystem>

#include "vantage/geometry.hpp"

namespace vantage {

/// Loads a landmark cloud. Format by extension: ".ply" for ASCII PLY
/// (x y z vertex properties, ids assigned sequentially), ".jsonl" for one
/// JSON object per line with fields id, x, y, z. Throws io_error on parse
/// failure or an empty cloud.
LandmarkCloud load_cloud(const std::filesystem::path& path);

/// Saves a cloud in the format chosen by extension (see load_cloud).
/// Coordinates are written with round-trip precision.
void save_cloud(const LandmarkCloud& cloud, const std::filesystem::path& path);

}  // namespace vantage
