#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pxflow/mesh.hpp"

namespace pxf {

/// Small dense 2x2 tensor used for gradients and stresses.
struct Mat2 {
  double m[2][2] = {{0, 0}, {0, 0}};

  static Mat2 zero() { return {}; }
  static Mat2 identity() {
    Mat2 r;
    r.m[0][0] = r.m[1][1] = 1.0;
    return r;
  }

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  Mat2 sym() const {
    Mat2 r;
    r.m[0][0] = m[0][0];
    r.m[1][1] = m[1][1];
    r.m[0][1] = r.m[1][0] = 0.5 * (m[0][1] + m[1][0]);
    return r;
  }
  double ddot(const Mat2& o) const {
    return m[0][0] * o.m[0][0] + m[0][1] * o.m[0][1] + m[1][0] * o.m[1][0] + m[1][1] * o.m[1][1];
  }
  double frobenius() const;
  double trace() const { return m[0][0] + m[1][1]; }

  Mat2 operator+(const Mat2& o) const;
  Mat2 operator-(const Mat2& o) const;
  Mat2 operator*(double s) const;
};

inline Mat2 operator*(double s, const Mat2& a) { return a * s; }

/// Spatially varying power-law index with its essential bounds.
struct ExponentField {
  std::function<double(Vec2)> eval;
  double p_minus = 2.0;
  double p_plus = 2.0;
  double alpha = 1.0;  // Hoelder exponent, metadata

  double operator()(Vec2 x) const { return eval(x); }
};

/// Element-wise constant exponent obtained by barycenter sampling.
struct DiscreteExponent {
  std::vector<double> values;

  double operator[](int t) const { return values[t]; }
  int size() const { return static_cast<int>(values.size()); }
};

struct StressLaw {
  ExponentField exponent;
  double delta = 1e-5;
  double mu0 = 0.5;
};

/// p/(p-1); throws for p <= 1.
double p_conjugate(double p);

ExponentField constant_exponent(double p);

/// p(x) = (1 - |x|^a / 2^{a/2}) p+ + (|x|^a / 2^{a/2}) p-  on the unit square.
ExponentField academic_p(double alpha, double p_minus, double p_plus);

DiscreteExponent freeze(const ExponentField& p, const Triangulation& m);

// Pointwise tensor maps; the exponent argument is the local value p(x) or p(xi_T).
Mat2 stress_S(double p, double delta, double mu0, const Mat2& A);
Mat2 F_map(double p, double delta, const Mat2& A);
Mat2 F_star_map(double p, double delta, const Mat2& A);

inline Mat2 stress_S(const StressLaw& law, Vec2 x, const Mat2& A) {
  return stress_S(law.exponent(x), law.delta, law.mu0, A);
}
inline Mat2 F_map(const StressLaw& law, Vec2 x, const Mat2& A) {
  return F_map(law.exponent(x), law.delta, A);
}

/// Directional derivative coefficients of the stress at A:
///   D_A S [B] = s1 * B^sym + s2 * (A^sym : B^sym) A^sym.
struct StressDeriv {
  double s1 = 0.0;
  double s2 = 0.0;
  Mat2 Asym;
};

/// eps_A: strain magnitudes below this drop the rank-one (anisotropic) term.
StressDeriv stress_jacobian_coeffs(double p, double delta, double mu0, const Mat2& A,
                                   double eps_A = 1e-12);

using Tensor4 = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

/// Full fourth-order tensor D_A S(x,A); mainly for verification.
Tensor4 stress_jacobian(double p, double delta, double mu0, const Mat2& A, double eps_A = 1e-12);

/// Closed-form equivalents of the shifted N-function and its conjugate,
///   phi_a(t)    = (delta + a + t)^{p-2} t^2
///   (phi_a)*(t) = ((delta + a)^{p-1} + t)^{p'-2} t^2
/// valid up to p-dependent constants; used for diagnostics only.
double shifted_phi(double p, double delta, double a, double t);
double shifted_phi_conj(double p, double delta, double a, double t);

}  // namespace pxf
