#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const;
  double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Cross product z-component of (b-a) x (c-a); twice the signed triangle area.
double cross2(const Vec2& a, const Vec2& b, const Vec2& c);

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  int marker = 1;
};

/// Affine geometry of one triangle: x(xi,eta) = v0 + J * (xi,eta)^T.
struct ElementGeometry {
  int tri = -1;
  double h_T = 0.0;      // diameter = longest edge
  Vec2 barycenter;
  double area = 0.0;
  Vec2 v0;
  double jac[2][2] = {{0, 0}, {0, 0}};      // columns: v1-v0, v2-v0
  double inv_jt[2][2] = {{0, 0}, {0, 0}};   // inverse transpose, maps ref grads to physical

  Vec2 map(double xi, double eta) const {
    return {v0.x + jac[0][0] * xi + jac[0][1] * eta,
            v0.y + jac[1][0] * xi + jac[1][1] * eta};
  }

  /// Inverse of map: reference coordinates of a physical point.
  Vec2 to_reference(const Vec2& x) const {
    const double rx = x.x - v0.x, ry = x.y - v0.y;
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    return {(jac[1][1] * rx - jac[0][1] * ry) / det,
            (-jac[1][0] * rx + jac[0][0] * ry) / det};
  }
};

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Conforming triangulation of a polygonal domain. Immutable after construction;
/// triangles are stored counter-clockwise (flipped on construction if needed).
class Triangulation {
 public:
  Triangulation(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                std::vector<BoundaryEdge> boundary_edges = {}, int level = 0);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_triangles() const { return static_cast<int>(triangles_.size()); }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  int level() const { return level_; }

  const ElementGeometry& geometry(int t) const { return geometry_[t]; }
  double max_h() const;
  double total_area() const;
  double min_angle_deg() const;

  /// All triangles sharing at least one vertex with t, including t itself.
  std::vector<int> element_patch(int t) const;
  const std::vector<std::vector<int>>& vertex_to_triangles() const { return vertex_tris_; }

  /// True if every interior edge is shared by exactly two triangles with
  /// matching endpoints and no vertex sits in the interior of a boundary edge.
  bool is_conforming(std::string* reason = nullptr) const;

  /// Parent triangle index in the coarse mesh (red refinement), or -1.
  int parent_triangle(int t) const { return parents_.empty() ? -1 : parents_[t]; }
  bool has_parents() const { return !parents_.empty(); }

  friend Triangulation refine_red(const Triangulation& m);

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<ElementGeometry> geometry_;
  std::vector<std::vector<int>> vertex_tris_;
  std::vector<int> parents_;
  int level_ = 0;
};

/// The 4-triangle mesh of (0,1)^2 obtained by subdividing along both diagonals.
Triangulation unit_square_initial();

/// Uniform red refinement: every triangle splits into four via edge midpoints.
Triangulation refine_red(const Triangulation& m);

/// Plain-text node/ele import. Set validate=false to allow non-conforming input
/// (used by mesh-info to report the verdict instead of throwing).
Triangulation import_mesh(const std::string& path, bool validate = true);
void export_mesh(const Triangulation& m, const std::string& path);

}  // namespace pxf
