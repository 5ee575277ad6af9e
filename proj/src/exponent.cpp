#include "pxflow/exponent.hpp"

#include <cmath>
#include <stdexcept>

namespace pxf {

double Mat2::frobenius() const {
  return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                   m[1][1] * m[1][1]);
}

Mat2 Mat2::operator+(const Mat2& o) const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
  return r;
}

Mat2 Mat2::operator-(const Mat2& o) const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
  return r;
}

Mat2 Mat2::operator*(double s) const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
  return r;
}

double p_conjugate(double p) {
  if (p <= 1.0) throw std::domain_error("p_conjugate requires p > 1");
  return p / (p - 1.0);
}

ExponentField constant_exponent(double p) {
  ExponentField f;
  f.eval = [p](Vec2) { return p; };
  f.p_minus = f.p_plus = p;
  f.alpha = 1.0;
  return f;
}

ExponentField academic_p(double alpha, double p_minus, double p_plus) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("academic_p: alpha in (0,1]");
  if (!(p_minus > 1.0 && p_minus <= p_plus))
    throw std::invalid_argument("academic_p: need 1 < p_minus <= p_plus");
  const double scale = std::pow(2.0, -alpha / 2.0);
  ExponentField f;
  f.eval = [=](Vec2 x) {
    const double w = std::pow(x.norm(), alpha) * scale;
    return (1.0 - w) * p_plus + w * p_minus;
  };
  f.p_minus = p_minus;
  f.p_plus = p_plus;
  f.alpha = alpha;
  return f;
}

DiscreteExponent freeze(const ExponentField& p, const Triangulation& m) {
  DiscreteExponent d;
  d.values.resize(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) d.values[t] = p(m.geometry(t).barycenter);
  return d;
}

Mat2 stress_S(double p, double delta, double mu0, const Mat2& A) {
  const Mat2 As = A.sym();
  const double norm = As.frobenius();
  if (norm <= 0.0) return Mat2::zero();
  return As * (mu0 * std::pow(delta + norm, p - 2.0));
}

Mat2 F_map(double p, double delta, const Mat2& A) {
  const Mat2 As = A.sym();
  const double norm = As.frobenius();
  if (norm <= 0.0) return Mat2::zero();
  return As * std::pow(delta + norm, 0.5 * (p - 2.0));
}

Mat2 F_star_map(double p, double delta, const Mat2& A) {
  const Mat2 As = A.sym();
  const double norm = As.frobenius();
  if (norm <= 0.0) return Mat2::zero();
  const double pc = p_conjugate(p);
  return As * std::pow(std::pow(delta, p - 1.0) + norm, 0.5 * (pc - 2.0));
}

StressDeriv stress_jacobian_coeffs(double p, double delta, double mu0, const Mat2& A,
                                   double eps_A) {
  StressDeriv d;
  d.Asym = A.sym();
  const double norm = d.Asym.frobenius();
  d.s1 = mu0 * std::pow(delta + norm, p - 2.0);
  if (norm < eps_A) {
    d.s2 = 0.0;
  } else {
    d.s2 = mu0 * (p - 2.0) * std::pow(delta + norm, p - 3.0) / norm;
  }
  return d;
}

Tensor4 stress_jacobian(double p, double delta, double mu0, const Mat2& A, double eps_A) {
  const StressDeriv d = stress_jacobian_coeffs(p, delta, mu0, A, eps_A);
  Tensor4 J{};
  auto kron = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double sym = 0.5 * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k));
          J[i][j][k][l] = d.s1 * sym + d.s2 * d.Asym(i, j) * d.Asym(k, l);
        }
  return J;
}

double shifted_phi(double p, double delta, double a, double t) {
  if (t < 0.0 || a < 0.0) throw std::domain_error("shifted_phi: a,t >= 0 required");
  if (t == 0.0) return 0.0;
  return std::pow(delta + a + t, p - 2.0) * t * t;
}

double shifted_phi_conj(double p, double delta, double a, double t) {
  if (t < 0.0 || a < 0.0) throw std::domain_error("shifted_phi_conj: a,t >= 0 required");
  if (t == 0.0) return 0.0;
  const double pc = p_conjugate(p);
  return std::pow(std::pow(delta + a, p - 1.0) + t, pc - 2.0) * t * t;
}

}  // namespace pxf
