#include "pxflow/assembly.hpp"

#include <cmath>

#include "pxflow/quadrature.hpp"

namespace pxf {

namespace {

constexpr int kMaxLocal = 6;

struct ElementScratch {
  // physical basis gradients at one quadrature point
  double gx[kMaxLocal];
  double gy[kMaxLocal];
};

void physical_gradients(const ElementGeometry& g, const BasisTable& tab, int q, int nloc,
                        ElementScratch& s) {
  for (int i = 0; i < nloc; ++i) {
    const double rx = tab.ref_grads_x[q][i];
    const double ry = tab.ref_grads_y[q][i];
    s.gx[i] = g.inv_jt[0][0] * rx + g.inv_jt[0][1] * ry;
    s.gy[i] = g.inv_jt[1][0] * rx + g.inv_jt[1][1] * ry;
  }
}

}  // namespace

Problem make_problem(const Triangulation& mesh, const MixedPair& pair, DiscreteExponent p_h,
                     double delta, double mu0, bool convection) {
  Problem pb;
  pb.mesh = &mesh;
  pb.vel = build_space(mesh, pair.velocity, 2);
  pb.pres = build_space(mesh, pair.pressure, 1);
  pb.p_h = std::move(p_h);
  pb.delta = delta;
  pb.mu0 = mu0;
  pb.convection = convection;
  pb.quad_degree = pair.assembly_degree;
  pb.part = {pb.vel.n_dofs, pb.pres.n_dofs};
  pb.rhs = Eigen::VectorXd::Zero(pb.part.total());

  // integrals of the pressure basis (multiplier coupling)
  pb.mean_weights = Eigen::VectorXd::Zero(pb.pres.n_dofs);
  const QuadratureRule& qr = rule(2);
  const BasisTable& ptab = basis_table(pb.pres.family, qr);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double scale = 2.0 * mesh.geometry(t).area;
    const auto& dofs = pb.pres.element_dofs[t];
    for (int q = 0; q < qr.size(); ++q)
      for (int j = 0; j < pb.pres.local_size; ++j)
        pb.mean_weights[dofs[j]] += qr.weights[q] * scale * ptab.values[q][j];
  }

  for (int s : pb.vel.boundary_scalar_dofs)
    for (int c = 0; c < 2; ++c) pb.dirichlet_dofs.push_back(2 * s + c);
  pb.dirichlet_values = Eigen::VectorXd::Zero(pb.dirichlet_dofs.size());
  return pb;
}

void set_dirichlet(Problem& pb, const std::function<Vec2(Vec2)>& g) {
  for (size_t k = 0; k < pb.dirichlet_dofs.size(); ++k) {
    const int dof = pb.dirichlet_dofs[k];
    const int scalar = dof / 2;
    const Vec2 val = g(pb.vel.dof_points[scalar]);
    if (!std::isfinite(val.x) || !std::isfinite(val.y))
      throw std::domain_error("set_dirichlet: boundary data not finite at a node");
    pb.dirichlet_values[k] = (dof % 2 == 0) ? val.x : val.y;
  }
}

void impose_dirichlet(const Problem& pb, MixedSolution& u) {
  for (size_t k = 0; k < pb.dirichlet_dofs.size(); ++k)
    u.x[pb.dirichlet_dofs[k]] = pb.dirichlet_values[k];
}

Eigen::VectorXd residual_raw(const Problem& pb, const MixedSolution& u) {
  const Triangulation& mesh = *pb.mesh;
  const QuadratureRule& qr = rule(pb.quad_degree);
  const BasisTable& vtab = basis_table(pb.vel.family, qr);
  const BasisTable& ptab = basis_table(pb.pres.family, qr);
  const int nlv = pb.vel.local_size;
  const int nlp = pb.pres.local_size;
  const int n_v = pb.part.n_v;

  Eigen::VectorXd R = Eigen::VectorXd::Zero(pb.part.total());
  ElementScratch s;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    const auto& vd = pb.vel.element_dofs[t];
    const auto& pd = pb.pres.element_dofs[t];
    const double p_T = pb.p_h[t];

    for (int q = 0; q < qr.size(); ++q) {
      const double w = qr.weights[q] * scale;
      physical_gradients(g, vtab, q, nlv, s);

      Vec2 vel(0, 0);
      Mat2 G;  // velocity gradient
      for (int i = 0; i < nlv; ++i) {
        const double vx = u.x[2 * vd[i]];
        const double vy = u.x[2 * vd[i] + 1];
        const double N = vtab.values[q][i];
        vel.x += vx * N;
        vel.y += vy * N;
        G(0, 0) += vx * s.gx[i];
        G(0, 1) += vx * s.gy[i];
        G(1, 0) += vy * s.gx[i];
        G(1, 1) += vy * s.gy[i];
      }
      double qh = 0.0;
      for (int j = 0; j < nlp; ++j) qh += u.x[n_v + pd[j]] * ptab.values[q][j];

      const Mat2 S = stress_S(p_T, pb.delta, pb.mu0, G);
      const Vec2 conv_Gu = {G(0, 0) * vel.x + G(0, 1) * vel.y,
                            G(1, 0) * vel.x + G(1, 1) * vel.y};

      for (int i = 0; i < nlv; ++i) {
        const double N = vtab.values[q][i];
        const double gp[2] = {s.gx[i], s.gy[i]};
        const double gdotu = gp[0] * vel.x + gp[1] * vel.y;
        for (int c = 0; c < 2; ++c) {
          double r = S(c, 0) * gp[0] + S(c, 1) * gp[1];  // (S, Dz), S symmetric
          if (pb.convection) {
            const double uc = (c == 0) ? vel.x : vel.y;
            const double gu = (c == 0) ? conv_Gu.x : conv_Gu.y;
            r += 0.5 * N * gu - 0.5 * uc * gdotu;
          }
          r -= qh * gp[c];  // -(q, div z)
          R[2 * vd[i] + c] += w * r;
        }
      }
      const double divv = G.trace();
      for (int j = 0; j < nlp; ++j) R[n_v + pd[j]] -= w * divv * ptab.values[q][j];
    }
  }

  const double lambda = u.multiplier();
  for (int j = 0; j < pb.part.n_p; ++j) R[n_v + j] -= lambda * pb.mean_weights[j];
  R[n_v + pb.part.n_p] = -pb.mean_weights.dot(u.pressure());

  R -= pb.rhs;
  return R;
}

Eigen::VectorXd residual(const Problem& pb, const MixedSolution& u) {
  Eigen::VectorXd R = residual_raw(pb, u);
  for (size_t k = 0; k < pb.dirichlet_dofs.size(); ++k)
    R[pb.dirichlet_dofs[k]] = u.x[pb.dirichlet_dofs[k]] - pb.dirichlet_values[k];
  return R;
}

Eigen::SparseMatrix<double> jacobian_raw(const Problem& pb, const MixedSolution& u) {
  const Triangulation& mesh = *pb.mesh;
  const QuadratureRule& qr = rule(pb.quad_degree);
  const BasisTable& vtab = basis_table(pb.vel.family, qr);
  const BasisTable& ptab = basis_table(pb.pres.family, qr);
  const int nlv = pb.vel.local_size;
  const int nlp = pb.pres.local_size;
  const int n_v = pb.part.n_v;
  const int n_p = pb.part.n_p;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_triangles()) * (2 * nlv + nlp) * (2 * nlv + nlp) *
                    qr.size() / 4 +
                2 * n_p + 16);
  ElementScratch s;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    const auto& vd = pb.vel.element_dofs[t];
    const auto& pd = pb.pres.element_dofs[t];
    const double p_T = pb.p_h[t];

    double local[2 * kMaxLocal + kMaxLocal][2 * kMaxLocal + kMaxLocal] = {};

    for (int q = 0; q < qr.size(); ++q) {
      const double w = qr.weights[q] * scale;
      physical_gradients(g, vtab, q, nlv, s);

      Vec2 vel(0, 0);
      Mat2 G;
      for (int i = 0; i < nlv; ++i) {
        const double vx = u.x[2 * vd[i]];
        const double vy = u.x[2 * vd[i] + 1];
        const double N = vtab.values[q][i];
        vel.x += vx * N;
        vel.y += vy * N;
        G(0, 0) += vx * s.gx[i];
        G(0, 1) += vx * s.gy[i];
        G(1, 0) += vy * s.gx[i];
        G(1, 1) += vy * s.gy[i];
      }

      const StressDeriv sd = stress_jacobian_coeffs(p_T, pb.delta, pb.mu0, G);

      // symmetric parts of e_c (x) grad N_i, stored as (xx, yy, xy)
      double Dxx[2 * kMaxLocal], Dyy[2 * kMaxLocal], Dxy[2 * kMaxLocal];
      for (int i = 0; i < nlv; ++i) {
        Dxx[2 * i] = s.gx[i];
        Dyy[2 * i] = 0.0;
        Dxy[2 * i] = 0.5 * s.gy[i];
        Dxx[2 * i + 1] = 0.0;
        Dyy[2 * i + 1] = s.gy[i];
        Dxy[2 * i + 1] = 0.5 * s.gx[i];
      }
      const double Axx = sd.Asym(0, 0), Ayy = sd.Asym(1, 1), Axy = sd.Asym(0, 1);

      for (int a = 0; a < 2 * nlv; ++a) {
        const double AdotDa = Axx * Dxx[a] + Ayy * Dyy[a] + 2.0 * Axy * Dxy[a];
        for (int b = 0; b < 2 * nlv; ++b) {
          const double DaDb = Dxx[a] * Dxx[b] + Dyy[a] * Dyy[b] + 2.0 * Dxy[a] * Dxy[b];
          const double AdotDb = Axx * Dxx[b] + Ayy * Dyy[b] + 2.0 * Axy * Dxy[b];
          local[a][b] += w * (sd.s1 * DaDb + sd.s2 * AdotDa * AdotDb);
        }
      }

      if (pb.convection) {
        for (int i = 0; i < nlv; ++i) {
          const double Ni = vtab.values[q][i];
          const double gpi[2] = {s.gx[i], s.gy[i]};
          const double gi_dot_u = gpi[0] * vel.x + gpi[1] * vel.y;
          for (int c = 0; c < 2; ++c) {
            const double uc = (c == 0) ? vel.x : vel.y;
            for (int k = 0; k < nlv; ++k) {
              const double Nk = vtab.values[q][k];
              const double gpk[2] = {s.gx[k], s.gy[k]};
              const double gk_dot_u = gpk[0] * vel.x + gpk[1] * vel.y;
              for (int e = 0; e < 2; ++e) {
                double val = 0.0;
                if (c == e) val += 0.5 * Ni * gk_dot_u - 0.5 * Nk * gi_dot_u;
                val += 0.5 * Ni * G(c, e) * Nk - 0.5 * uc * gpi[e] * Nk;
                local[2 * i + c][2 * k + e] += w * val;
              }
            }
          }
        }
      }

      // pressure coupling and continuity
      for (int i = 0; i < nlv; ++i) {
        const double gpi[2] = {s.gx[i], s.gy[i]};
        for (int c = 0; c < 2; ++c)
          for (int j = 0; j < nlp; ++j) {
            const double val = w * ptab.values[q][j] * gpi[c];
            local[2 * i + c][2 * nlv + j] -= val;  // -(q, div z)
            local[2 * nlv + j][2 * i + c] -= val;  // -(div v, z)
          }
      }
    }

    auto global_index = [&](int loc) {
      if (loc < 2 * nlv) return 2 * vd[loc / 2] + (loc % 2);
      return n_v + pd[loc - 2 * nlv];
    };
    for (int a = 0; a < 2 * nlv + nlp; ++a)
      for (int b = 0; b < 2 * nlv + nlp; ++b)
        if (local[a][b] != 0.0) trips.emplace_back(global_index(a), global_index(b), local[a][b]);
  }

  // multiplier coupling
  const int mean_row = n_v + n_p;
  for (int j = 0; j < n_p; ++j) {
    trips.emplace_back(n_v + j, mean_row, -pb.mean_weights[j]);
    trips.emplace_back(mean_row, n_v + j, -pb.mean_weights[j]);
  }

  Eigen::SparseMatrix<double> J(pb.part.total(), pb.part.total());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

void apply_dirichlet(const Problem& pb, Eigen::SparseMatrix<double>& J, Eigen::VectorXd& R,
                     const MixedSolution& u) {
  std::vector<bool> pinned(pb.part.total(), false);
  for (int dof : pb.dirichlet_dofs) pinned[dof] = true;

  for (int col = 0; col < J.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(J, col); it; ++it) {
      if (it.row() == it.col()) continue;
      if (pinned[it.row()] || pinned[it.col()]) it.valueRef() = 0.0;
    }
  for (int dof : pb.dirichlet_dofs) J.coeffRef(dof, dof) = 1.0;
  J.prune(0.0);

  for (size_t k = 0; k < pb.dirichlet_dofs.size(); ++k)
    R[pb.dirichlet_dofs[k]] = u.x[pb.dirichlet_dofs[k]] - pb.dirichlet_values[k];
}

Eigen::SparseMatrix<double> jacobian(const Problem& pb, const MixedSolution& u) {
  Eigen::SparseMatrix<double> J = jacobian_raw(pb, u);
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(pb.part.total());
  apply_dirichlet(pb, J, dummy, u);
  return J;
}

double convective_form(const FeSpace& vel, const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& z, int degree) {
  const Triangulation& mesh = *vel.mesh;
  const QuadratureRule& qr = rule(degree);
  const BasisTable& vtab = basis_table(vel.family, qr);
  const int nlv = vel.local_size;
  ElementScratch s;
  double total = 0.0;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    const auto& vd = vel.element_dofs[t];
    for (int q = 0; q < qr.size(); ++q) {
      const double wq = qr.weights[q] * scale;
      physical_gradients(g, vtab, q, nlv, s);
      Vec2 uv(0, 0), wv(0, 0), zv(0, 0);
      Mat2 Gw, Gz;
      for (int i = 0; i < nlv; ++i) {
        const double N = vtab.values[q][i];
        const double ux = u[2 * vd[i]], uy = u[2 * vd[i] + 1];
        const double wx = w[2 * vd[i]], wy = w[2 * vd[i] + 1];
        const double zx = z[2 * vd[i]], zy = z[2 * vd[i] + 1];
        uv.x += ux * N;
        uv.y += uy * N;
        wv.x += wx * N;
        wv.y += wy * N;
        zv.x += zx * N;
        zv.y += zy * N;
        Gw(0, 0) += wx * s.gx[i];
        Gw(0, 1) += wx * s.gy[i];
        Gw(1, 0) += wy * s.gx[i];
        Gw(1, 1) += wy * s.gy[i];
        Gz(0, 0) += zx * s.gx[i];
        Gz(0, 1) += zx * s.gy[i];
        Gz(1, 0) += zy * s.gx[i];
        Gz(1, 1) += zy * s.gy[i];
      }
      const double zGwu = zv.x * (Gw(0, 0) * uv.x + Gw(0, 1) * uv.y) +
                          zv.y * (Gw(1, 0) * uv.x + Gw(1, 1) * uv.y);
      const double wGzu = wv.x * (Gz(0, 0) * uv.x + Gz(0, 1) * uv.y) +
                          wv.y * (Gz(1, 0) * uv.x + Gz(1, 1) * uv.y);
      total += wq * 0.5 * (zGwu - wGzu);
    }
  }
  return total;
}

Eigen::VectorXd assemble_consistency_rhs(const Problem& pb, int degree,
                                         const std::function<Mat2(Vec2)>& stress_exact,
                                         const std::function<Vec2(Vec2)>& v_exact,
                                         const std::function<Mat2(Vec2)>& grad_v_exact,
                                         const std::function<double(Vec2)>& q_exact) {
  const Triangulation& mesh = *pb.mesh;
  const QuadratureRule& qr = rule(degree);
  const BasisTable& vtab = basis_table(pb.vel.family, qr);
  const int nlv = pb.vel.local_size;
  ElementScratch s;

  Eigen::VectorXd L = Eigen::VectorXd::Zero(pb.part.total());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    const auto& vd = pb.vel.element_dofs[t];
    for (int q = 0; q < qr.size(); ++q) {
      const double w = qr.weights[q] * scale;
      const Vec2 x = g.map(qr.points[q].l1, qr.points[q].l2);
      physical_gradients(g, vtab, q, nlv, s);

      const Mat2 S = stress_exact(x);
      const double qe = q_exact(x);
      Vec2 ve(0, 0), Gu(0, 0);
      Mat2 Ge;
      if (pb.convection) {
        ve = v_exact(x);
        Ge = grad_v_exact(x);
        Gu = {Ge(0, 0) * ve.x + Ge(0, 1) * ve.y, Ge(1, 0) * ve.x + Ge(1, 1) * ve.y};
      }

      for (int i = 0; i < nlv; ++i) {
        const double N = vtab.values[q][i];
        const double gp[2] = {s.gx[i], s.gy[i]};
        const double gdotu = pb.convection ? gp[0] * ve.x + gp[1] * ve.y : 0.0;
        for (int c = 0; c < 2; ++c) {
          double r = S(c, 0) * gp[0] + S(c, 1) * gp[1];
          if (pb.convection) {
            const double uc = (c == 0) ? ve.x : ve.y;
            const double gu = (c == 0) ? Gu.x : Gu.y;
            r += 0.5 * N * gu - 0.5 * uc * gdotu;
          }
          r -= qe * gp[c];
          L[2 * vd[i] + c] += w * r;
        }
      }
    }
  }
  return L;
}

Eigen::VectorXd assemble_force_rhs(const Problem& pb, int degree,
                                   const std::function<Vec2(Vec2)>& f) {
  const Triangulation& mesh = *pb.mesh;
  const QuadratureRule& qr = rule(degree);
  const BasisTable& vtab = basis_table(pb.vel.family, qr);
  const int nlv = pb.vel.local_size;

  Eigen::VectorXd L = Eigen::VectorXd::Zero(pb.part.total());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    const auto& vd = pb.vel.element_dofs[t];
    for (int q = 0; q < qr.size(); ++q) {
      const double w = qr.weights[q] * scale;
      const Vec2 x = g.map(qr.points[q].l1, qr.points[q].l2);
      const Vec2 fv = f(x);
      for (int i = 0; i < nlv; ++i) {
        const double N = vtab.values[q][i];
        L[2 * vd[i]] += w * N * fv.x;
        L[2 * vd[i] + 1] += w * N * fv.y;
      }
    }
  }
  return L;
}

}  // namespace pxf
