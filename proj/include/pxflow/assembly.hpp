#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "pxflow/exponent.hpp"
#include "pxflow/mesh.hpp"
#include "pxflow/spaces.hpp"

namespace pxf {

struct MixedPair {
  Family velocity = Family::P1cBubble;
  Family pressure = Family::P1c;
  std::string name = "mini";
  int assembly_degree = 8;  // 2k+2 with k the effective velocity degree

  static MixedPair mini() { return {Family::P1cBubble, Family::P1c, "mini", 8}; }
  static MixedPair taylor_hood() { return {Family::P2c, Family::P1c, "taylor-hood", 6}; }
};

struct DofPartition {
  int n_v = 0;
  int n_p = 0;
  int total() const { return n_v + n_p + 1; }
};

/// Dof vector of the bordered saddle point system: velocity block, pressure
/// block, and the scalar multiplier enforcing the zero pressure mean.
struct MixedSolution {
  Eigen::VectorXd x;
  DofPartition part;

  explicit MixedSolution(DofPartition p = {}) : x(Eigen::VectorXd::Zero(p.total())), part(p) {}

  Eigen::VectorBlock<Eigen::VectorXd> velocity() { return x.segment(0, part.n_v); }
  Eigen::VectorBlock<const Eigen::VectorXd> velocity() const {
    return x.segment(0, part.n_v);
  }
  Eigen::VectorBlock<Eigen::VectorXd> pressure() { return x.segment(part.n_v, part.n_p); }
  Eigen::VectorBlock<const Eigen::VectorXd> pressure() const {
    return x.segment(part.n_v, part.n_p);
  }
  double multiplier() const { return x[part.n_v + part.n_p]; }
};

/// Everything needed to evaluate the residual and Jacobian of the discrete
/// problem on one mesh/pair/stress-law combination.
struct Problem {
  const Triangulation* mesh = nullptr;
  FeSpace vel;   // vector valued
  FeSpace pres;  // scalar
  DiscreteExponent p_h;
  double delta = 1e-5;
  double mu0 = 0.5;
  bool convection = true;
  int quad_degree = 8;

  Eigen::VectorXd rhs;           // linear functional over all dofs (momentum rows)
  Eigen::VectorXd mean_weights;  // integrals of the pressure basis functions
  std::vector<int> dirichlet_dofs;
  Eigen::VectorXd dirichlet_values;

  DofPartition part;
};

Problem make_problem(const Triangulation& mesh, const MixedPair& pair, DiscreteExponent p_h,
                     double delta, double mu0, bool convection);

/// Pins the velocity boundary dofs to the nodal interpolation of g.
void set_dirichlet(Problem& pb, const std::function<Vec2(Vec2)>& g);

/// Writes the Dirichlet values into the solution vector.
void impose_dirichlet(const Problem& pb, MixedSolution& u);

/// Galerkin residual of all blocks (momentum, continuity, zero mean) with
/// Dirichlet rows replaced by the pinning residual u_i - g_i.
Eigen::VectorXd residual(const Problem& pb, const MixedSolution& u);

/// Directional derivative of the residual, with symmetric Dirichlet
/// condensation (unit diagonal rows/columns on pinned dofs).
Eigen::SparseMatrix<double> jacobian(const Problem& pb, const MixedSolution& u);

/// Raw (unconstrained) versions, used by tests to inspect interior rows.
Eigen::VectorXd residual_raw(const Problem& pb, const MixedSolution& u);
Eigen::SparseMatrix<double> jacobian_raw(const Problem& pb, const MixedSolution& u);

/// Applies the symmetric Dirichlet condensation in place.
void apply_dirichlet(const Problem& pb, Eigen::SparseMatrix<double>& J, Eigen::VectorXd& R,
                     const MixedSolution& u);

/// Skew-symmetric convective trilinear form
///   b(u,w,z) = 1/2 (z (x) u, grad w) - 1/2 (w (x) u, grad z).
double convective_form(const FeSpace& vel, const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& z, int degree);

/// Assembles z -> (S_exact, Dz) + b(v_ex, v_ex, z) - (q_ex, div z) by quadrature;
/// the weak-form right-hand side of a manufactured run.
Eigen::VectorXd assemble_consistency_rhs(const Problem& pb, int degree,
                                         const std::function<Mat2(Vec2)>& stress_exact,
                                         const std::function<Vec2(Vec2)>& v_exact,
                                         const std::function<Mat2(Vec2)>& grad_v_exact,
                                         const std::function<double(Vec2)>& q_exact);

/// Assembles z -> (f, z) by quadrature.
Eigen::VectorXd assemble_force_rhs(const Problem& pb, int degree,
                                   const std::function<Vec2(Vec2)>& f);

}  // namespace pxf
