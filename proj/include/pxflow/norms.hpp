#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "pxflow/exponent.hpp"
#include "pxflow/mesh.hpp"
#include "pxflow/spaces.hpp"

namespace pxf {

/// Integrand magnitude at a quadrature point of one element.
using ElemIntegrand = std::function<double(int elem, Vec2 x)>;
/// Exponent at a quadrature point of one element (frozen or pointwise).
using ElemExponent = std::function<double(int elem, Vec2 x)>;

inline ElemExponent frozen_exponent(const DiscreteExponent& p) {
  return [&p](int elem, Vec2) { return p[elem]; };
}
inline ElemExponent pointwise_exponent(const ExponentField& p) {
  return [&p](int, Vec2 x) { return p(x); };
}

/// rho_{p(.)}(f) = int |f|^{p(x)} dx over the listed elements (all if empty).
double modular(const Triangulation& m, const ElemExponent& p, const ElemIntegrand& f, int degree,
               const std::vector<int>& elems = {});

/// Luxembourg norm inf{ lambda > 0 : rho(f/lambda) <= 1 } by bracketing and
/// bisection to 1e-10 relative; returns 0 for the zero function.
double luxemburg_norm(const Triangulation& m, const ElemExponent& p, const ElemIntegrand& f,
                      int degree, const std::vector<int>& elems = {});

/// || F_h(., Dv_h) - F_h(., Dv_exact) ||_{L^2} with the frozen exponent.
double error_velocity(const Triangulation& m, const DiscreteExponent& p_h, double delta,
                      const FeSpace& vel, const Eigen::VectorXd& vel_dofs,
                      const std::function<Mat2(Vec2)>& grad_v_exact, int degree = 10);

/// || q_h - P0 q ||_{p'_h(.)} — the localized pressure error: the Luxembourg
/// norm, with the element-frozen conjugate exponent, of the distance between
/// the discrete pressure and the element-wise means of the exact pressure.
double error_pressure_localized(const Triangulation& m, const DiscreteExponent& p_conj_h,
                                const FeSpace& pres, const Eigen::VectorXd& pres_dofs,
                                const std::function<double(Vec2)>& q_exact, int degree = 10);

/// EOC_i = log(e_i/e_{i-1}) / log(h_i/h_{i-1}); entries with non-positive
/// errors are reported as missing.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& h_ratios);

enum class RateQuantity { Velocity, Pressure };

/// Expected convergence rates of the velocity and (upper bound for the)
/// pressure error in the two manufactured regimes.
double theory_rate(int case_id, RateQuantity q, double alpha, double beta, double gamma,
                   double p_minus, double p_plus);

/// Helpers to evaluate FE fields pointwise inside elements (reference coords).
Vec2 fe_vector_value(const FeSpace& vel, const Eigen::VectorXd& dofs, int elem, double xi,
                     double eta);
Mat2 fe_vector_gradient(const FeSpace& vel, const Eigen::VectorXd& dofs, int elem, double xi,
                        double eta);
double fe_scalar_value(const FeSpace& space, const Eigen::VectorXd& dofs, int elem, double xi,
                       double eta);

}  // namespace pxf
