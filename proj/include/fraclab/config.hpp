#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclab/geometry.hpp"
#include "fraclab/psolver.hpp"

namespace fraclab {

using ojson = nlohmann::ordered_json;

/// Raised for anything wrong with the run configuration. The CLI maps it to
/// a nonzero exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainSpec {
  std::string shape = "interval";  // interval | disk | rectangle | union | mask
  IntervalShape interval{0.0, 2.0};
  DiskShape disk;
  RectangleShape rectangle;
  std::vector<RectangleShape> rectangles;  // union
  std::filesystem::path mask_path;         // CSV with columns x,y,inside
};

struct RunConfig {
  DomainSpec domain;
  double h = 0.01;
  double margin = 2.0;
  double alpha = 0.5;
  std::optional<double> p;
  std::vector<double> p_list;
  SolverOptions solver;
  std::vector<Point> gamma1;  // empty: the whole discrete ridge
  std::vector<double> h_list;
  double band_factor = 0.1;
  std::filesystem::path output_dir = "out";
};

/// Parses a config document. Relative paths are resolved against base_dir.
RunConfig parse_config(const ojson& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Normalized echo of the effective configuration (fixed key order).
ojson config_to_json(const RunConfig& cfg);
/// FNV-1a of the compact echo.
std::uint64_t config_hash(const RunConfig& cfg);

GridDomain build_domain(const RunConfig& cfg);
GridDomain build_domain(const RunConfig& cfg, double h);

/// Mask CSV (x,y,inside) for every lattice node.
void write_mask_csv(const GridDomain& dom, const std::filesystem::path& path);

}  // namespace fraclab
