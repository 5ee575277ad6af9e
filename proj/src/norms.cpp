#include "pxflow/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "pxflow/quadrature.hpp"

namespace pxf {

namespace {

template <typename Fn>
double integrate(const Triangulation& m, int degree, const std::vector<int>& elems, Fn&& fn) {
  const QuadratureRule& qr = rule(degree);
  double total = 0.0;
  auto accumulate = [&](int t) {
    const ElementGeometry& g = m.geometry(t);
    const double scale = 2.0 * g.area;
    for (int q = 0; q < qr.size(); ++q) {
      const Vec2 x = g.map(qr.points[q].l1, qr.points[q].l2);
      total += qr.weights[q] * scale * fn(t, x);
    }
  };
  if (elems.empty())
    for (int t = 0; t < m.n_triangles(); ++t) accumulate(t);
  else
    for (int t : elems) accumulate(t);
  return total;
}

}  // namespace

double modular(const Triangulation& m, const ElemExponent& p, const ElemIntegrand& f, int degree,
               const std::vector<int>& elems) {
  return integrate(m, degree, elems, [&](int t, Vec2 x) {
    const double v = std::abs(f(t, x));
    return v == 0.0 ? 0.0 : std::pow(v, p(t, x));
  });
}

double luxemburg_norm(const Triangulation& m, const ElemExponent& p, const ElemIntegrand& f,
                      int degree, const std::vector<int>& elems) {
  // sample magnitudes, exponents, and weights once; bisection then runs on the cache
  const QuadratureRule& qr = rule(degree);
  std::vector<double> wts, vals, exps;
  auto sample = [&](int t) {
    const ElementGeometry& g = m.geometry(t);
    const double scale = 2.0 * g.area;
    for (int q = 0; q < qr.size(); ++q) {
      const Vec2 x = g.map(qr.points[q].l1, qr.points[q].l2);
      wts.push_back(qr.weights[q] * scale);
      vals.push_back(std::abs(f(t, x)));
      exps.push_back(p(t, x));
    }
  };
  if (elems.empty())
    for (int t = 0; t < m.n_triangles(); ++t) sample(t);
  else
    for (int t : elems) sample(t);

  double rho1 = 0.0, l1 = 0.0, domain = 0.0;
  for (size_t i = 0; i < wts.size(); ++i) {
    if (vals[i] > 0.0) rho1 += wts[i] * std::pow(vals[i], exps[i]);
    l1 += wts[i] * vals[i];
    domain += wts[i];
  }
  if (rho1 == 0.0) return 0.0;

  auto rho_at = [&](double lambda) {
    double sum = 0.0;
    for (size_t i = 0; i < wts.size(); ++i)
      if (vals[i] > 0.0) sum += wts[i] * std::pow(vals[i] / lambda, exps[i]);
    return sum;
  };

  double lo = l1 / (1.0 + domain);
  double hi = std::max(1.0, rho1) + 1.0;
  if (lo <= 0.0) lo = 1e-300;
  while (rho_at(lo) <= 1.0 && lo > 1e-280) lo *= 0.5;  // ensure rho(lo) > 1
  while (rho_at(hi) > 1.0) hi *= 2.0;                  // ensure rho(hi) <= 1
  if (rho_at(lo) <= 1.0) return lo;                    // norm below resolvable bracket

  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (rho_at(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Vec2 fe_vector_value(const FeSpace& vel, const Eigen::VectorXd& dofs, int elem, double xi,
                     double eta) {
  double v[6];
  double g[6][2];
  eval_basis(vel.family, xi, eta, v, g);
  Vec2 out(0, 0);
  const auto& ed = vel.element_dofs[elem];
  for (int i = 0; i < vel.local_size; ++i) {
    out.x += dofs[2 * ed[i]] * v[i];
    out.y += dofs[2 * ed[i] + 1] * v[i];
  }
  return out;
}

Mat2 fe_vector_gradient(const FeSpace& vel, const Eigen::VectorXd& dofs, int elem, double xi,
                        double eta) {
  double v[6];
  double g[6][2];
  eval_basis(vel.family, xi, eta, v, g);
  const ElementGeometry& geom = vel.mesh->geometry(elem);
  Mat2 G;
  const auto& ed = vel.element_dofs[elem];
  for (int i = 0; i < vel.local_size; ++i) {
    const double gx = geom.inv_jt[0][0] * g[i][0] + geom.inv_jt[0][1] * g[i][1];
    const double gy = geom.inv_jt[1][0] * g[i][0] + geom.inv_jt[1][1] * g[i][1];
    G(0, 0) += dofs[2 * ed[i]] * gx;
    G(0, 1) += dofs[2 * ed[i]] * gy;
    G(1, 0) += dofs[2 * ed[i] + 1] * gx;
    G(1, 1) += dofs[2 * ed[i] + 1] * gy;
  }
  return G;
}

double fe_scalar_value(const FeSpace& space, const Eigen::VectorXd& dofs, int elem, double xi,
                       double eta) {
  double v[6];
  double g[6][2];
  eval_basis(space.family, xi, eta, v, g);
  double out = 0.0;
  const auto& ed = space.element_dofs[elem];
  for (int i = 0; i < space.local_size; ++i) out += dofs[ed[i]] * v[i];
  return out;
}

double error_velocity(const Triangulation& m, const DiscreteExponent& p_h, double delta,
                      const FeSpace& vel, const Eigen::VectorXd& vel_dofs,
                      const std::function<Mat2(Vec2)>& grad_v_exact, int degree) {
  const QuadratureRule& qr = rule(degree);
  double total = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const ElementGeometry& g = m.geometry(t);
    const double scale = 2.0 * g.area;
    const double p_T = p_h[t];
    for (int q = 0; q < qr.size(); ++q) {
      const double xi = qr.points[q].l1, eta = qr.points[q].l2;
      const Vec2 x = g.map(xi, eta);
      const Mat2 Fh = F_map(p_T, delta, fe_vector_gradient(vel, vel_dofs, t, xi, eta));
      const Mat2 Fe = F_map(p_T, delta, grad_v_exact(x));
      const Mat2 diff = Fh - Fe;
      total += qr.weights[q] * scale * diff.ddot(diff);
    }
  }
  return std::sqrt(total);
}

double error_pressure_localized(const Triangulation& m, const DiscreteExponent& p_conj_h,
                                const FeSpace& pres, const Eigen::VectorXd& pres_dofs,
                                const std::function<double(Vec2)>& q_exact, int degree) {
  // element-wise means of the exact pressure, same rule as the norm quadrature
  const QuadratureRule& qr = rule(degree);
  std::vector<double> means(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const ElementGeometry& g = m.geometry(t);
    const double scale = 2.0 * g.area;
    double mean = 0.0;
    for (int q = 0; q < qr.size(); ++q)
      mean += qr.weights[q] * scale * q_exact(g.map(qr.points[q].l1, qr.points[q].l2));
    means[t] = mean / g.area;
  }
  auto diff = [&](int t, Vec2 x) {
    const Vec2 ref = m.geometry(t).to_reference(x);
    return fe_scalar_value(pres, pres_dofs, t, ref.x, ref.y) - means[t];
  };
  return luxemburg_norm(m, frozen_exponent(p_conj_h), diff, degree);
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& h_ratios) {
  if (h_ratios.size() + 1 != errors.size())
    throw std::invalid_argument("eoc: need one h ratio per consecutive error pair");
  std::vector<std::optional<double>> out;
  out.reserve(h_ratios.size());
  for (size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] <= 0.0 || errors[i - 1] <= 0.0 || h_ratios[i - 1] <= 0.0 ||
        h_ratios[i - 1] == 1.0) {
      out.push_back(std::nullopt);
      continue;
    }
    out.push_back(std::log(errors[i] / errors[i - 1]) / std::log(h_ratios[i - 1]));
  }
  return out;
}

double theory_rate(int case_id, RateQuantity q, double alpha, double beta, double gamma,
                   double p_minus, double p_plus) {
  if (case_id != 1 && case_id != 2) throw std::invalid_argument("theory_rate: case must be 1 or 2");
  if (case_id == 2) return std::min({alpha, beta, gamma});
  const double pp_conj = p_conjugate(p_plus);
  const double v_rate = std::min({alpha, beta, gamma * std::min(1.0, pp_conj / 2.0)});
  if (q == RateQuantity::Velocity) return v_rate;
  const double r_minus = std::min(2.0, p_minus);
  return 2.0 * v_rate / p_conjugate(r_minus);
}

}  // namespace pxf
