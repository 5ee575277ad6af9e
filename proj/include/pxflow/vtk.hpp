#pragma once

#include <map>
#include <string>
#include <vector>

#include "pxflow/mesh.hpp"

namespace pxf {

/// In-memory form of a legacy ASCII VTK unstructured grid (triangles only).
struct VtkGrid {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> cells;
  std::map<std::string, std::vector<double>> point_scalars;
  std::map<std::string, std::vector<Vec2>> point_vectors;
  std::map<std::string, std::vector<double>> cell_scalars;
};

void write_vtk(const std::string& path, const std::string& title, const VtkGrid& grid);
VtkGrid read_vtk(const std::string& path);

}  // namespace pxf
