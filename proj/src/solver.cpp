#include "pxflow/solver.hpp"

#include <umfpack.h>

#include <cmath>

#include "pxflow/norms.hpp"

namespace pxf {

namespace {

struct UmfpackHandles {
  void* symbolic = nullptr;
  void* numeric = nullptr;
  ~UmfpackHandles() {
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    if (numeric) umfpack_di_free_numeric(&numeric);
  }
};

}  // namespace

Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols()) throw SolverError("sparse_lu_solve: matrix must be square");
  if (A.rows() != b.size()) throw SolverError("sparse_lu_solve: dimension mismatch");

  const Eigen::SparseMatrix<double>* mat = &A;
  Eigen::SparseMatrix<double> compressed;
  if (!A.isCompressed()) {
    compressed = A;
    compressed.makeCompressed();
    mat = &compressed;
  }
  const int n = static_cast<int>(mat->rows());
  const int* Ap = mat->outerIndexPtr();
  const int* Ai = mat->innerIndexPtr();
  const double* Ax = mat->valuePtr();

  UmfpackHandles h;
  double info[UMFPACK_INFO];
  int status = umfpack_di_symbolic(n, n, Ap, Ai, Ax, &h.symbolic, nullptr, info);
  if (status != UMFPACK_OK)
    throw SolverError("sparse LU symbolic analysis failed (status " + std::to_string(status) +
                      ")");
  status = umfpack_di_numeric(Ap, Ai, Ax, h.symbolic, &h.numeric, nullptr, info);
  if (status == UMFPACK_WARNING_singular_matrix)
    throw SolverError("sparse LU: matrix numerically singular at pivot " +
                      std::to_string(static_cast<long>(info[UMFPACK_UDIAG_NZ])) + " of " +
                      std::to_string(n));
  if (status != UMFPACK_OK)
    throw SolverError("sparse LU factorization failed (status " + std::to_string(status) + ")");

  Eigen::VectorXd x(n);
  status = umfpack_di_solve(UMFPACK_A, Ap, Ai, Ax, x.data(), b.data(), h.numeric, nullptr, info);
  if (status != UMFPACK_OK)
    throw SolverError("sparse LU back-substitution failed (status " + std::to_string(status) +
                      ")");

  const double bnorm = b.norm();
  if (bnorm > 0.0) {
    const double rel = ((*mat) * x - b).norm() / bnorm;
    if (!(rel <= 1e-10))
      throw SolverError("sparse LU solution rejected: relative residual " + std::to_string(rel));
  }
  return x;
}

NewtonReport solve_newton(const Problem& pb, MixedSolution& u, const NewtonConfig& cfg) {
  NewtonReport rep;
  Eigen::VectorXd R = residual(pb, u);
  double rnorm = R.norm();
  rep.residual_history.push_back(rnorm);
  const double r0 = rnorm;
  auto done = [&](double r) { return r <= cfg.atol || r <= cfg.rtol * r0; };

  if (done(rnorm)) {
    rep.converged = true;
    return rep;
  }

  for (int it = 0; it < cfg.max_iter; ++it) {
    Eigen::SparseMatrix<double> J = jacobian_raw(pb, u);
    Eigen::VectorXd Rc = R;
    apply_dirichlet(pb, J, Rc, u);

    Eigen::VectorXd du;
    try {
      du = sparse_lu_solve(J, -Rc);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (Newton iteration " + std::to_string(it) +
                        ", n = " + std::to_string(pb.part.total()) + ")");
    }

    double step = 1.0;
    MixedSolution trial = u;
    Eigen::VectorXd R_trial;
    double r_trial = rnorm;
    bool accepted = false;
    while (true) {
      trial.x = u.x + step * du;
      R_trial = residual(pb, trial);
      r_trial = R_trial.norm();
      if (std::isfinite(r_trial) && r_trial < rnorm) {
        accepted = true;
        break;
      }
      if (!cfg.damping || step <= cfg.min_step) break;
      step *= cfg.backtrack_factor;
    }

    rep.iterations = it + 1;
    rep.step_sizes.push_back(step);
    if (!accepted) {  // line search exhausted
      rep.converged = false;
      return rep;
    }

    u = trial;
    R = R_trial;
    rnorm = r_trial;
    rep.residual_history.push_back(rnorm);
    if (done(rnorm)) {
      rep.converged = true;
      return rep;
    }
  }
  rep.converged = done(rnorm);
  return rep;
}

MixedSolution prolong(const Problem& coarse, const MixedSolution& u_coarse, const Problem& fine) {
  const Triangulation& fm = *fine.mesh;
  if (!fm.has_parents() || fm.n_triangles() != 4 * coarse.mesh->n_triangles())
    throw SolverError("prolong: fine mesh is not the red refinement of the coarse mesh");

  MixedSolution u(fine.part);
  const Eigen::VectorXd vc = u_coarse.velocity();
  const Eigen::VectorXd qc = u_coarse.pressure();

  const int nv_fine = fine.vel.n_scalar_dofs;
  std::vector<bool> vel_set(nv_fine, false);
  std::vector<bool> pres_set(fine.pres.n_scalar_dofs, false);

  for (int t = 0; t < fm.n_triangles(); ++t) {
    const int pt = fm.parent_triangle(t);
    const ElementGeometry& pgeom = coarse.mesh->geometry(pt);

    for (int i = 0; i < fine.vel.local_size; ++i) {
      const int sd = fine.vel.element_dofs[t][i];
      if (vel_set[sd]) continue;
      vel_set[sd] = true;
      if (fine.vel.family == Family::P1cBubble && i == 3) continue;  // bubbles restart at zero
      const Vec2 ref = pgeom.to_reference(fine.vel.dof_points[sd]);
      const Vec2 val = fe_vector_value(coarse.vel, vc, pt, ref.x, ref.y);
      u.x[2 * sd] = val.x;
      u.x[2 * sd + 1] = val.y;
    }
    for (int j = 0; j < fine.pres.local_size; ++j) {
      const int sd = fine.pres.element_dofs[t][j];
      if (pres_set[sd]) continue;
      pres_set[sd] = true;
      const Vec2 ref = pgeom.to_reference(fine.pres.dof_points[sd]);
      u.x[fine.part.n_v + sd] = fe_scalar_value(coarse.pres, qc, pt, ref.x, ref.y);
    }
  }
  return u;
}

}  // namespace pxf
