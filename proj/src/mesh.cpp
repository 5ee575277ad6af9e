#include "pxflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace pxf {

double Vec2::norm() const { return std::hypot(x, y); }

double cross2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

namespace {

std::pair<int, int> sorted_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

ElementGeometry make_geometry(int t, const Vec2& a, const Vec2& b, const Vec2& c) {
  ElementGeometry g;
  g.tri = t;
  g.v0 = a;
  g.jac[0][0] = b.x - a.x;
  g.jac[1][0] = b.y - a.y;
  g.jac[0][1] = c.x - a.x;
  g.jac[1][1] = c.y - a.y;
  const double det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
  g.area = 0.5 * det;
  // inv(J)^T = 1/det * [[ J11, -J10], [-J01, J00]]^T
  g.inv_jt[0][0] = g.jac[1][1] / det;
  g.inv_jt[0][1] = -g.jac[1][0] / det;
  g.inv_jt[1][0] = -g.jac[0][1] / det;
  g.inv_jt[1][1] = g.jac[0][0] / det;
  g.barycenter = (a + b + c) / 3.0;
  const double e0 = (b - a).norm(), e1 = (c - b).norm(), e2 = (a - c).norm();
  g.h_T = std::max({e0, e1, e2});
  return g;
}

}  // namespace

Triangulation::Triangulation(std::vector<Vec2> vertices,
                             std::vector<std::array<int, 3>> triangles,
                             std::vector<BoundaryEdge> boundary_edges, int level)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      level_(level) {
  if (vertices_.empty() || triangles_.empty())
    throw MeshError("triangulation must have at least one vertex and one triangle");
  const int nv = n_vertices();
  for (auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv) throw MeshError("triangle vertex index out of range");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshError("degenerate triangle with repeated vertex");
    const double s = cross2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (s == 0.0) throw MeshError("triangle with zero area");
    if (s < 0.0) std::swap(tri[1], tri[2]);  // enforce counter-clockwise
  }

  geometry_.reserve(triangles_.size());
  for (int t = 0; t < n_triangles(); ++t) {
    const auto& tri = triangles_[t];
    geometry_.push_back(make_geometry(t, vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]));
  }

  vertex_tris_.assign(nv, {});
  for (int t = 0; t < n_triangles(); ++t)
    for (int k = 0; k < 3; ++k) vertex_tris_[triangles_[t][k]].push_back(t);

  if (boundary_edges_.empty()) {
    // detect by incidence count; default marker 1
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : triangles_)
      for (int k = 0; k < 3; ++k) count[sorted_edge(tri[k], tri[(k + 1) % 3])]++;
    for (const auto& [e, c] : count)
      if (c == 1) boundary_edges_.push_back({e.first, e.second, 1});
  }
}

double Triangulation::max_h() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.h_T);
  return h;
}

double Triangulation::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

double Triangulation::min_angle_deg() const {
  double best = 180.0;
  for (const auto& tri : triangles_) {
    const Vec2& a = vertices_[tri[0]];
    const Vec2& b = vertices_[tri[1]];
    const Vec2& c = vertices_[tri[2]];
    const Vec2 pts[3] = {a, b, c};
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = pts[(k + 1) % 3] - pts[k];
      const Vec2 v = pts[(k + 2) % 3] - pts[k];
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      best = std::min(best, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / M_PI);
    }
  }
  return best;
}

std::vector<int> Triangulation::element_patch(int t) const {
  if (t < 0 || t >= n_triangles()) throw MeshError("element_patch: triangle index out of range");
  std::vector<int> patch;
  for (int k = 0; k < 3; ++k)
    for (int other : vertex_tris_[triangles_[t][k]]) patch.push_back(other);
  std::sort(patch.begin(), patch.end());
  patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
  return patch;
}

bool Triangulation::is_conforming(std::string* reason) const {
  auto fail = [&](const std::string& msg) {
    if (reason) *reason = msg;
    return false;
  };
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles_)
    for (int k = 0; k < 3; ++k) count[sorted_edge(tri[k], tri[(k + 1) % 3])]++;
  std::vector<std::pair<int, int>> exposed;
  for (const auto& [e, c] : count) {
    if (c > 2)
      return fail("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                  ") shared by more than two triangles");
    if (c == 1) exposed.push_back(e);
  }
  // a vertex in the interior of an exposed edge is a hanging node
  for (const auto& [a, b] : exposed) {
    const Vec2& pa = vertices_[a];
    const Vec2& pb = vertices_[b];
    const double len2 = (pb - pa).norm2();
    for (int v = 0; v < n_vertices(); ++v) {
      if (v == a || v == b) continue;
      const Vec2& p = vertices_[v];
      const double s = std::abs(cross2(pa, pb, p));
      if (s > 1e-12 * len2) continue;
      const double tpar = (p - pa).dot(pb - pa) / len2;
      if (tpar > 1e-10 && tpar < 1.0 - 1e-10)
        return fail("vertex " + std::to_string(v) + " hangs on edge (" + std::to_string(a) +
                    "," + std::to_string(b) + ")");
    }
  }
  // every declared boundary edge must be exposed
  for (const auto& be : boundary_edges_) {
    auto it = count.find(sorted_edge(be.a, be.b));
    if (it == count.end() || it->second != 1)
      return fail("boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                  ") is not incident to exactly one triangle");
  }
  if (reason) reason->clear();
  return true;
}

Triangulation unit_square_initial() {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  std::vector<std::array<int, 3>> t = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  std::vector<BoundaryEdge> b = {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}};
  return Triangulation(std::move(v), std::move(t), std::move(b), 0);
}

Triangulation refine_red(const Triangulation& m) {
  std::vector<Vec2> verts = m.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = sorted_edge(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back((m.vertex(a) + m.vertex(b)) * 0.5);
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  std::vector<int> parents;
  tris.reserve(4 * m.n_triangles());
  parents.reserve(4 * m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& [a, b, c] = m.triangle(t);
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    tris.push_back({a, ab, ca});
    tris.push_back({ab, b, bc});
    tris.push_back({ca, bc, c});
    tris.push_back({ab, bc, ca});
    for (int k = 0; k < 4; ++k) parents.push_back(t);
  }

  std::vector<BoundaryEdge> bedges;
  bedges.reserve(2 * m.boundary_edges().size());
  for (const auto& be : m.boundary_edges()) {
    const int mm = mid(be.a, be.b);
    bedges.push_back({be.a, mm, be.marker});
    bedges.push_back({mm, be.b, be.marker});
  }

  Triangulation fine(std::move(verts), std::move(tris), std::move(bedges), m.level() + 1);
  fine.parents_ = std::move(parents);
  return fine;
}

namespace {

// Reads whitespace-separated tokens, skipping '#' comments, tracking line numbers.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (true) {
      if (pos_ >= line_.size()) {
        if (!std::getline(in_, line_)) return false;
        ++lineno_;
        pos_ = 0;
        continue;
      }
      while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      if (pos_ >= line_.size()) continue;
      if (line_[pos_] == '#') {
        pos_ = line_.size();
        continue;
      }
      size_t start = pos_;
      while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_])) )
        ++pos_;
      tok = line_.substr(start, pos_ - start);
      return true;
    }
  }

  long expect_int(const char* what) {
    std::string tok;
    if (!next(tok)) throw MeshError(err_prefix() + "unexpected end of file reading " + what);
    size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tok, &used);
    } catch (...) {
      used = 0;
    }
    if (used != tok.size())
      throw MeshError(err_prefix() + "expected integer for " + what + ", got '" + tok + "'");
    return value;
  }

  double expect_double(const char* what) {
    std::string tok;
    if (!next(tok)) throw MeshError(err_prefix() + "unexpected end of file reading " + what);
    size_t used = 0;
    double value = 0;
    try {
      value = std::stod(tok, &used);
    } catch (...) {
      used = 0;
    }
    if (used != tok.size())
      throw MeshError(err_prefix() + "expected number for " + what + ", got '" + tok + "'");
    return value;
  }

  std::string err_prefix() const { return "line " + std::to_string(lineno_) + ": "; }

 private:
  std::istream& in_;
  std::string line_;
  size_t pos_ = 0;
  int lineno_ = 0;
};

}  // namespace

Triangulation import_mesh(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  TokenReader tr(in);

  const long nv = tr.expect_int("vertex count");
  const long dim = tr.expect_int("dimension");
  tr.expect_int("attribute count");
  const long has_marker = tr.expect_int("marker flag");
  if (nv <= 0) throw MeshError(tr.err_prefix() + "vertex count must be positive");
  if (dim != 2) throw MeshError(tr.err_prefix() + "only 2D meshes supported");

  std::vector<Vec2> verts(nv);
  std::vector<int> vmarker(nv, 0);
  for (long i = 0; i < nv; ++i) {
    const long id = tr.expect_int("vertex id");
    if (id != i) throw MeshError(tr.err_prefix() + "vertex ids must be 0-based and consecutive");
    verts[i].x = tr.expect_double("x coordinate");
    verts[i].y = tr.expect_double("y coordinate");
    if (has_marker) vmarker[i] = static_cast<int>(tr.expect_int("vertex marker"));
  }

  const long nt = tr.expect_int("triangle count");
  tr.expect_int("nodes per triangle");
  tr.expect_int("triangle attribute count");
  if (nt <= 0) throw MeshError(tr.err_prefix() + "triangle count must be positive");

  std::vector<std::array<int, 3>> tris(nt);
  for (long i = 0; i < nt; ++i) {
    const long id = tr.expect_int("triangle id");
    if (id != i) throw MeshError(tr.err_prefix() + "triangle ids must be 0-based and consecutive");
    for (int k = 0; k < 3; ++k) {
      const long v = tr.expect_int("triangle vertex");
      if (v < 0 || v >= nv) throw MeshError(tr.err_prefix() + "triangle vertex index out of range");
      tris[i][k] = static_cast<int>(v);
    }
  }

  // boundary edges by incidence; marker from endpoint markers when they agree
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : tris)
    for (int k = 0; k < 3; ++k) count[sorted_edge(tri[k], tri[(k + 1) % 3])]++;
  std::vector<BoundaryEdge> bedges;
  for (const auto& [e, c] : count) {
    if (c != 1) continue;
    int marker = 1;
    if (vmarker[e.first] > 0 && vmarker[e.first] == vmarker[e.second]) marker = vmarker[e.first];
    bedges.push_back({e.first, e.second, marker});
  }

  Triangulation m(std::move(verts), std::move(tris), std::move(bedges), 0);
  if (validate) {
    std::string reason;
    if (!m.is_conforming(&reason)) throw MeshError("mesh is not conforming: " + reason);
  }
  return m;
}

void export_mesh(const Triangulation& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path + "' for writing");

  std::vector<int> vmarker(m.n_vertices(), 0);
  for (const auto& be : m.boundary_edges()) {
    vmarker[be.a] = std::max(vmarker[be.a], be.marker);
    vmarker[be.b] = std::max(vmarker[be.b], be.marker);
  }

  char buf[64];
  out << m.n_vertices() << " 2 0 1\n";
  for (int i = 0; i < m.n_vertices(); ++i) {
    out << i;
    std::snprintf(buf, sizeof buf, " %.17g", m.vertex(i).x);
    out << buf;
    std::snprintf(buf, sizeof buf, " %.17g", m.vertex(i).y);
    out << buf << ' ' << vmarker[i] << '\n';
  }
  out << m.n_triangles() << " 3 0\n";
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  if (!out) throw MeshError("write failed for '" + path + "'");
}

}  // namespace pxf
