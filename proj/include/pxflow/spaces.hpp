#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pxflow/mesh.hpp"
#include "pxflow/quadrature.hpp"

namespace pxf {

enum class Family { P0, P1c, P2c, P1cBubble };

std::string family_name(Family f);

/// Number of scalar local basis functions per element.
int local_count(Family f);

/// Values and reference gradients of all local basis functions at (xi, eta).
/// values must hold local_count entries, grads local_count pairs (d/dxi, d/deta).
void eval_basis(Family f, double xi, double eta, double* values, double grads[][2]);

/// Scalar- or vector-valued conforming finite element space with its dof map.
/// Scalar dofs are numbered vertices first, then edge/bubble dofs; a vector
/// dof is scalar_dof * value_dim + component.
struct FeSpace {
  Family family = Family::P1c;
  int value_dim = 1;
  const Triangulation* mesh = nullptr;

  int n_scalar_dofs = 0;
  int n_dofs = 0;                               // n_scalar_dofs * value_dim
  int local_size = 0;                           // scalar dofs per element
  std::vector<std::vector<int>> element_dofs;   // scalar dof ids per element
  std::vector<int> boundary_scalar_dofs;        // sorted, unique
  std::vector<Vec2> dof_points;                 // nodal point per scalar dof
  std::vector<bool> is_boundary_scalar;

  int global_dof(int scalar_dof, int comp) const { return scalar_dof * value_dim + comp; }
};

FeSpace build_space(const Triangulation& m, Family f, int value_dim);

/// Evaluation tables of the local basis at the points of a reference rule.
struct BasisTable {
  std::vector<std::vector<double>> values;       // [point][local]
  std::vector<std::vector<double>> ref_grads_x;  // [point][local] d/dxi
  std::vector<std::vector<double>> ref_grads_y;  // [point][local] d/deta
};

const BasisTable& basis_table(Family f, const QuadratureRule& r);

/// Nodal interpolation of a scalar function (bubble dofs are set to zero).
/// Throws when f is not finite at a nodal point.
std::vector<double> interpolate(const FeSpace& space, const std::function<double(Vec2)>& f);

/// Component-wise nodal interpolation for vector-valued spaces.
std::vector<double> interpolate(const FeSpace& space, const std::function<Vec2(Vec2)>& f);

/// Evaluates a scalar FE function (coefficients over scalar dofs) inside an element.
double eval_scalar(const FeSpace& space, const std::vector<double>& dofs, int elem, double xi,
                   double eta);

}  // namespace pxf
