#include "pxflow/experiments.hpp"

#include <cmath>
#include <filesystem>

#include "pxflow/quadrature.hpp"
#include "pxflow/vtk.hpp"

namespace pxf {

ManufacturedCase ManufacturedCase::make(int case_id, double alpha, double beta, double gamma,
                                        double p_minus, double delta, double mu0) {
  if (case_id != 1 && case_id != 2)
    throw std::invalid_argument("ManufacturedCase: case must be 1 or 2");
  ManufacturedCase mc;
  mc.case_id_ = case_id;
  mc.alpha_ = alpha;
  mc.beta_ = beta;
  mc.gamma_ = gamma;
  mc.p_minus_ = p_minus;
  mc.p_plus_ = p_minus + 1.0;  // the experimental protocol ties the bounds
  mc.delta_ = delta;
  mc.mu0_ = mu0;
  mc.exponent_ = academic_p(alpha, mc.p_minus_, mc.p_plus_);
  return mc;
}

Vec2 ManufacturedCase::grad_p(Vec2 x) const {
  const double r = x.norm();
  if (r == 0.0) return {0.0, 0.0};
  const double coeff =
      -(p_plus_ - p_minus_) * alpha_ * std::pow(2.0, -alpha_ / 2.0) * std::pow(r, alpha_ - 2.0);
  return {coeff * x.x, coeff * x.y};
}

double ManufacturedCase::rho_v(Vec2 x) const {
  return 2.0 * (beta_ - 1.0) / p_at(x) + eps_shift_;
}

double ManufacturedCase::rho_q(Vec2 x) const {
  const double p = p_at(x);
  if (case_id_ == 1) return gamma_ - 2.0 + 2.0 / p + eps_shift_;  // gamma - 2/p' + eps
  return rho_v(x) * (p - 2.0) / 2.0 + gamma_ - 1.0 + eps_shift_;
}

Vec2 ManufacturedCase::velocity(Vec2 x) const {
  const double r = x.norm();
  if (r == 0.0) return {0.0, 0.0};
  const double g = std::pow(r, rho_v(x));
  return {g * x.y, -g * x.x};
}

Mat2 ManufacturedCase::velocity_gradient(Vec2 x) const {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("velocity gradient singular at the origin");
  const double p = p_at(x);
  const double rho = rho_v(x);
  const double g = std::pow(r, rho);

  // grad rho = -2(beta-1)/p^2 * grad p
  const Vec2 gp = grad_p(x);
  const Vec2 grho = {-2.0 * (beta_ - 1.0) / (p * p) * gp.x,
                     -2.0 * (beta_ - 1.0) / (p * p) * gp.y};
  const double logr = std::log(r);
  const Vec2 gg = {g * (grho.x * logr + rho * x.x / (r * r)),
                   g * (grho.y * logr + rho * x.y / (r * r))};

  Mat2 G;
  const double u0 = x.y, u1 = -x.x;
  G(0, 0) = u0 * gg.x;
  G(0, 1) = u0 * gg.y + g;
  G(1, 0) = u1 * gg.x - g;
  G(1, 1) = u1 * gg.y;
  return G;
}

double ManufacturedCase::pressure_unshifted(Vec2 x) const {
  const double r = x.norm();
  return std::pow(r, rho_q(x));
}

Mat2 ManufacturedCase::stress_exact(Vec2 x) const {
  return stress_S(p_at(x), delta_, mu0_, velocity_gradient(x));
}

double ManufacturedCase::mean_shift() const {
  if (shift_) return *shift_;
  Triangulation mesh = unit_square_initial();
  for (int i = 0; i < 8; ++i) mesh = refine_red(mesh);
  const QuadratureRule& qr = rule(10);
  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const double scale = 2.0 * g.area;
    for (int q = 0; q < qr.size(); ++q)
      total += qr.weights[q] * scale * pressure_unshifted(g.map(qr.points[q].l1, qr.points[q].l2));
  }
  shift_ = total;  // |Omega| = 1
  return *shift_;
}

double ManufacturedCase::theory_velocity_rate() const {
  return theory_rate(case_id_, RateQuantity::Velocity, alpha_, beta_, gamma_, p_minus_, p_plus_);
}

double ManufacturedCase::theory_pressure_rate() const {
  return theory_rate(case_id_, RateQuantity::Pressure, alpha_, beta_, gamma_, p_minus_, p_plus_);
}

Eigen::VectorXd consistency_rhs(const ManufacturedCase& mc, const Problem& pb) {
  return assemble_consistency_rhs(
      pb, 10, [&mc](Vec2 x) { return mc.stress_exact(x); },
      [&mc](Vec2 x) { return mc.velocity(x); }, [&mc](Vec2 x) { return mc.velocity_gradient(x); },
      [&mc](Vec2 x) { return mc.pressure(x); });
}

StudyResult run_convergence_study(const ManufacturedCase& mc, const MixedPair& pair,
                                  int max_level, const StudyOptions& opts) {
  StudyResult result;
  auto g_exact = [&mc](Vec2 x) { return mc.velocity(x); };
  auto dv_exact = [&mc](Vec2 x) { return mc.velocity_gradient(x); };
  auto q_exact = [&mc](Vec2 x) { return mc.pressure(x); };

  // two-slot mesh rotation: the coarse problem keeps referencing its mesh
  // until the fine level has taken the prolonged initial guess
  auto mesh = std::make_unique<Triangulation>(unit_square_initial());
  std::unique_ptr<Triangulation> coarse_mesh;
  std::optional<Problem> coarse_problem;
  std::optional<MixedSolution> coarse_solution;

  std::vector<double> evs, eqs;

  for (int level = 0; level <= max_level; ++level) {
    if (level > 0) {
      auto fine = std::make_unique<Triangulation>(refine_red(*mesh));
      coarse_mesh = std::move(mesh);
      mesh = std::move(fine);
    }

    Problem pb = make_problem(*mesh, pair, freeze(mc.exponent(), *mesh), mc.delta(), mc.mu0(),
                              /*convection=*/true);
    set_dirichlet(pb, g_exact);
    pb.rhs = consistency_rhs(mc, pb);

    MixedSolution u(pb.part);
    if (coarse_solution) u = prolong(*coarse_problem, *coarse_solution, pb);
    impose_dirichlet(pb, u);

    const NewtonReport rep = solve_newton(pb, u, opts.newton);

    ErrorRecord rec;
    rec.level = level;
    rec.h = std::pow(0.5, level);
    rec.newton_iterations = rep.iterations;
    rec.converged = rep.converged;
    rec.theory_v = mc.theory_velocity_rate();
    rec.theory_q = mc.theory_pressure_rate();

    if (!rep.converged) {
      result.records.push_back(rec);
      result.aborted = true;
      result.abort_reason = "Newton did not converge at level " + std::to_string(level);
      return result;
    }

    const Eigen::VectorXd vel_dofs = u.velocity();
    const Eigen::VectorXd pres_dofs = u.pressure();
    rec.e_v = error_velocity(*mesh, pb.p_h, mc.delta(), pb.vel, vel_dofs, dv_exact, 10);

    DiscreteExponent p_conj;
    p_conj.values.resize(pb.p_h.size());
    for (int t = 0; t < pb.p_h.size(); ++t) p_conj.values[t] = p_conjugate(pb.p_h[t]);
    rec.e_q = error_pressure_localized(*mesh, p_conj, pb.pres, pres_dofs, q_exact, 10);

    if (opts.compute_stability) {
      const Triangulation& mref = *mesh;
      auto dv_mag = [&](int t, Vec2 x) {
        const Vec2 ref = mref.geometry(t).to_reference(x);
        return fe_vector_gradient(pb.vel, vel_dofs, t, ref.x, ref.y).sym().frobenius();
      };
      auto q_mag = [&](int t, Vec2 x) {
        const Vec2 ref = mref.geometry(t).to_reference(x);
        return fe_scalar_value(pb.pres, pres_dofs, t, ref.x, ref.y);
      };
      const double nq = luxemburg_norm(mref, frozen_exponent(p_conj), q_mag, 10);
      const double ndv = luxemburg_norm(mref, frozen_exponent(pb.p_h), dv_mag, 10);
      rec.stability = nq + ndv;
    }

    evs.push_back(rec.e_v);
    eqs.push_back(rec.e_q);
    result.records.push_back(rec);

    if (opts.progress) {
      (*opts.progress) << "level " << level << ": e_v = " << rec.e_v << ", e_q = " << rec.e_q
                       << ", newton " << rep.iterations << " its\n";
      opts.progress->flush();
    }

    coarse_problem.emplace(std::move(pb));
    coarse_solution = std::move(u);
  }

  const std::vector<double> ratios(result.records.size() - 1, 0.5);
  const auto ev_eoc = eoc(evs, ratios);
  const auto eq_eoc = eoc(eqs, ratios);
  for (size_t i = 1; i < result.records.size(); ++i) {
    result.records[i].eoc_v = ev_eoc[i - 1];
    result.records[i].eoc_q = eq_eoc[i - 1];
  }
  return result;
}

Vec2 ERScenario::field_E(Vec2 x) {
  // tolerance: meshes resolve the holes by inscribed polygons, so points of
  // electrode-adjacent elements may dip slightly inside the true circle
  constexpr double r_guard = 0.75 * hole_radius;
  const Vec2 cp = electrode(+1);
  const Vec2 cm = electrode(-1);
  const Vec2 dp = x - cp;
  const Vec2 dm = x - cm;
  const double rp2 = dp.norm2();
  const double rm2 = dm.norm2();
  if (rp2 < r_guard * r_guard || rm2 < r_guard * r_guard)
    throw std::domain_error("field_E evaluated inside an electrode disc");
  return dp / rp2 - dm / rm2;
}

Mat2 ERScenario::grad_E(Vec2 x) {
  auto dipole_grad = [](Vec2 y) {
    const double r2 = y.norm2();
    Mat2 G;
    G(0, 0) = 1.0 / r2 - 2.0 * y.x * y.x / (r2 * r2);
    G(0, 1) = -2.0 * y.x * y.y / (r2 * r2);
    G(1, 0) = G(0, 1);
    G(1, 1) = 1.0 / r2 - 2.0 * y.y * y.y / (r2 * r2);
    return G;
  };
  constexpr double r_guard = 0.75 * hole_radius;
  const Vec2 cp = electrode(+1);
  const Vec2 cm = electrode(-1);
  const Vec2 dp = x - cp;
  const Vec2 dm = x - cm;
  if (dp.norm2() < r_guard * r_guard || dm.norm2() < r_guard * r_guard)
    throw std::domain_error("grad_E evaluated inside an electrode disc");
  return dipole_grad(dp) - dipole_grad(dm);
}

Vec2 ERScenario::force(Vec2 x, bool with_field) const {
  Vec2 f = mechanical_force(x);
  if (with_field) {
    const Vec2 E = field_E(x);
    const Mat2 G = grad_E(x);
    f.x += chi_E * (G(0, 0) * E.x + G(0, 1) * E.y);
    f.y += chi_E * (G(1, 0) * E.x + G(1, 1) * E.y);
  }
  return f;
}

namespace {

ERRunResult run_er_case(const Triangulation& mesh, const ERScenario& sc, bool with_field,
                        const std::string& out_dir, const std::string& tag) {
  const MixedPair pair = MixedPair::taylor_hood();

  DiscreteExponent p_h;
  p_h.values.resize(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    p_h.values[t] =
        with_field ? ERScenario::exponent(mesh.geometry(t).barycenter) : ERScenario::p_hat(0.0);

  Problem pb = make_problem(mesh, pair, p_h, sc.delta, sc.mu0, /*convection=*/true);
  set_dirichlet(pb, [](Vec2) { return Vec2{0.0, 0.0}; });
  pb.rhs = assemble_force_rhs(pb, 10, [&](Vec2 x) { return sc.force(x, with_field); });

  // warm start: solve the quadratic-growth (p = 2) problem first, so the
  // initial Jacobian is far from the degenerate zero-shear regime
  Problem pb2 = pb;
  pb2.p_h.values.assign(mesh.n_triangles(), 2.0);
  MixedSolution u(pb.part);
  impose_dirichlet(pb2, u);
  NewtonConfig warm_cfg;
  warm_cfg.max_iter = 30;
  solve_newton(pb2, u, warm_cfg);

  ERRunResult out;
  out.report = solve_newton(pb, u, NewtonConfig{});

  const Eigen::VectorXd vel = u.velocity();
  for (int s = 0; s < pb.vel.n_scalar_dofs; ++s)
    out.max_speed = std::max(out.max_speed, std::hypot(vel[2 * s], vel[2 * s + 1]));
  out.pressure_mean = pb.mean_weights.dot(u.pressure()) / mesh.total_area();

  // vertex samples for output
  const int nv = mesh.n_vertices();
  VtkGrid grid;
  grid.points = mesh.vertices();
  grid.cells.assign(mesh.triangles().begin(), mesh.triangles().end());
  std::vector<Vec2> vel_pts(nv);
  std::vector<double> q_pts(nv);
  for (int v = 0; v < nv; ++v) {
    vel_pts[v] = {vel[2 * v], vel[2 * v + 1]};
    q_pts[v] = u.pressure()[v];
  }
  grid.cell_scalars["exponent"] = p_h.values;

  std::filesystem::create_directories(out_dir);
  {
    VtkGrid gv = grid;
    gv.point_vectors["velocity"] = vel_pts;
    const std::string path = out_dir + "/velocity_" + tag + ".vtk";
    write_vtk(path, "velocity (" + tag + ")", gv);
    out.files.push_back(path);
  }
  {
    VtkGrid gq = grid;
    gq.point_scalars["pressure"] = q_pts;
    const std::string path = out_dir + "/pressure_" + tag + ".vtk";
    write_vtk(path, "pressure (" + tag + ")", gq);
    out.files.push_back(path);
  }
  return out;
}

}  // namespace

ERDemoResult run_er_demo(const Triangulation& mesh, const std::string& out_dir, bool field_case,
                         bool nofield_case) {
  ERDemoResult res;
  ERScenario sc;
  if (field_case) res.with_field = run_er_case(mesh, sc, true, out_dir, "with_field");
  if (nofield_case) res.no_field = run_er_case(mesh, sc, false, out_dir, "no_field");
  return res;
}

}  // namespace pxf
