#pragma once

#include <vector>

#include "pxflow/mesh.hpp"

namespace pxf {

/// Symmetric Gauss rule on the reference triangle {(0,0),(1,0),(0,1)}.
/// Points are stored as barycentric triples; weights sum to 1/2.
struct QuadratureRule {
  struct Point {
    double l0, l1, l2;  // barycentric; reference coords are (xi,eta) = (l1,l2)
  };
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Returns a positive-weight symmetric rule exact to at least the given degree.
/// Supported requests: 1..12.
const QuadratureRule& rule(int degree);

struct MappedQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to |T|
};

/// Affine push-forward of a reference rule to a physical element.
MappedQuadrature map_to_element(const QuadratureRule& r, const ElementGeometry& geom);

}  // namespace pxf
