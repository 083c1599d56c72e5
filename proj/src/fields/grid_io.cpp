#include "figsim/fields/grid_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"

namespace figsim {

using nlohmann::json;

void write_grid(const GridField& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  json header = {
      {"origin", {grid.origin().x, grid.origin().y, grid.origin().z}},
      {"spacing", {grid.spacing().x, grid.spacing().y, grid.spacing().z}},
      {"dims", {grid.nx(), grid.ny(), grid.nz()}},
      {"threshold", grid.threshold()},
      {"has_color", grid.has_color()},
  };
  out << header.dump() << "\n";
  const auto& d = grid.densities();
  out.write(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(float));
  if (grid.has_color()) {
    const auto& c = grid.colors();
    out.write(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(float));
  }
  if (!out) throw IoError("write failed: " + path);
}

std::shared_ptr<GridField> read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing grid header: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("bad grid header in " + path + ": " + e.what());
  }
  const Vec3 origin{header["origin"][0], header["origin"][1], header["origin"][2]};
  const Vec3 spacing{header["spacing"][0], header["spacing"][1], header["spacing"][2]};
  const int nx = header["dims"][0], ny = header["dims"][1], nz = header["dims"][2];
  const double threshold = header.value("threshold", 0.5);
  const bool has_color = header.value("has_color", false);

  const size_t count = size_t(nx) * ny * nz;
  std::vector<float> densities(count);
  in.read(reinterpret_cast<char*>(densities.data()), count * sizeof(float));
  if (!in) throw IoError("truncated grid densities: " + path);
  std::vector<float> rgb;
  if (has_color) {
    rgb.resize(count * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), rgb.size() * sizeof(float));
    if (!in) throw IoError("truncated grid colors: " + path);
  }
  return std::make_shared<GridField>(origin, spacing, nx, ny, nz, std::move(densities),
                                     std::move(rgb), threshold);
}

}  // namespace figsim
