#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "pxflow/assembly.hpp"

namespace pxf {

struct NewtonConfig {
  double atol = 1e-8;
  double rtol = 1e-10;
  int max_iter = 50;
  bool damping = true;
  double backtrack_factor = 0.5;
  double min_step = 1.0 / 1024.0;  // 2^-10
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> step_sizes;
  bool converged = false;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Sparse direct solve with a post-check: relative residual <= 1e-10.
Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

/// Damped Newton on the mixed system. u must satisfy the Dirichlet constraints
/// on entry; the last iterate is returned in u regardless of convergence.
NewtonReport solve_newton(const Problem& pb, MixedSolution& u, const NewtonConfig& cfg = {});

/// Nodal prolongation of a coarse solution to the red-refined mesh
/// (exact for nested P1/P2 parts, bubble dofs restart at zero).
MixedSolution prolong(const Problem& coarse, const MixedSolution& u_coarse, const Problem& fine);

}  // namespace pxf
