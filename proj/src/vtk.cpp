#include "pxflow/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pxf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_vtk(const std::string& path, const std::string& title, const VtkGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

  const size_t np = grid.points.size();
  const size_t nc = grid.cells.size();
  out << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (const auto& p : grid.points) out << num(p.x) << ' ' << num(p.y) << " 0\n";
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (const auto& c : grid.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (size_t i = 0; i < nc; ++i) out << "5\n";

  if (!grid.point_scalars.empty() || !grid.point_vectors.empty()) {
    out << "POINT_DATA " << np << '\n';
    for (const auto& [name, vals] : grid.point_vectors) {
      out << "VECTORS " << name << " double\n";
      for (const auto& v : vals) out << num(v.x) << ' ' << num(v.y) << " 0\n";
    }
    for (const auto& [name, vals] : grid.point_scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) out << num(v) << '\n';
    }
  }
  if (!grid.cell_scalars.empty()) {
    out << "CELL_DATA " << nc << '\n';
    for (const auto& [name, vals] : grid.cell_scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) out << num(v) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

VtkGrid read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  VtkGrid g;

  std::string line;
  auto fail = [&](const std::string& msg) { throw std::runtime_error(path + ": " + msg); };

  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) fail("missing VTK header");
  std::getline(in, line);  // title
  if (!std::getline(in, line) || line != "ASCII") fail("only ASCII files supported");
  if (!std::getline(in, line) || line.find("UNSTRUCTURED_GRID") == std::string::npos)
    fail("only unstructured grids supported");

  std::string keyword;
  size_t point_count = 0, cell_count = 0;
  enum { None, PointData, CellData } section = None;

  while (in >> keyword) {
    if (keyword == "POINTS") {
      size_t n;
      std::string type;
      in >> n >> type;
      g.points.resize(n);
      point_count = n;
      for (size_t i = 0; i < n; ++i) {
        double x, y, z;
        if (!(in >> x >> y >> z)) fail("truncated POINTS block");
        g.points[i] = {x, y};
      }
    } else if (keyword == "CELLS") {
      size_t n, total;
      in >> n >> total;
      g.cells.resize(n);
      cell_count = n;
      for (size_t i = 0; i < n; ++i) {
        int k, a, b, c;
        if (!(in >> k >> a >> b >> c) || k != 3) fail("only triangle cells supported");
        g.cells[i] = {a, b, c};
      }
    } else if (keyword == "CELL_TYPES") {
      size_t n;
      in >> n;
      for (size_t i = 0; i < n; ++i) {
        int t;
        if (!(in >> t) || t != 5) fail("only VTK_TRIANGLE cells supported");
      }
    } else if (keyword == "POINT_DATA") {
      size_t n;
      in >> n;
      if (n != point_count) fail("POINT_DATA size mismatch");
      section = PointData;
    } else if (keyword == "CELL_DATA") {
      size_t n;
      in >> n;
      if (n != cell_count) fail("CELL_DATA size mismatch");
      section = CellData;
    } else if (keyword == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps;
      std::string lut, lut_name;
      in >> lut >> lut_name;
      if (lut != "LOOKUP_TABLE") fail("expected LOOKUP_TABLE after SCALARS");
      const size_t n = (section == CellData) ? cell_count : point_count;
      std::vector<double> vals(n);
      for (size_t i = 0; i < n; ++i)
        if (!(in >> vals[i])) fail("truncated SCALARS block");
      if (section == CellData)
        g.cell_scalars[name] = std::move(vals);
      else
        g.point_scalars[name] = std::move(vals);
    } else if (keyword == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      if (section != PointData) fail("VECTORS outside POINT_DATA unsupported");
      std::vector<Vec2> vals(point_count);
      for (size_t i = 0; i < point_count; ++i) {
        double x, y, z;
        if (!(in >> x >> y >> z)) fail("truncated VECTORS block");
        vals[i] = {x, y};
      }
      g.point_vectors[name] = std::move(vals);
    } else {
      fail("unexpected keyword '" + keyword + "'");
    }
  }
  if (g.points.empty() || g.cells.empty()) fail("no grid data found");
  return g;
}

}  // namespace pxf
