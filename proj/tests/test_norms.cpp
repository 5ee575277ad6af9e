#include <doctest.h>

#include <cmath>
#include <random>

#include "pxflow/norms.hpp"
#include "pxflow/quadrature.hpp"

using namespace pxf;

namespace {

Triangulation fine_square(int levels) {
  Triangulation m = unit_square_initial();
  for (int i = 0; i < levels; ++i) m = refine_red(m);
  return m;
}

}  // namespace

TEST_CASE("modular basics") {
  const Triangulation m = fine_square(3);
  const ExponentField p2 = constant_exponent(2.0);
  CHECK(modular(m, pointwise_exponent(p2), [](int, Vec2) { return 0.0; }, 4) == 0.0);
  CHECK(modular(m, pointwise_exponent(p2), [](int, Vec2) { return 1.0; }, 4) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const ExponentField p3 = constant_exponent(3.0);
  CHECK(modular(m, pointwise_exponent(p3), [](int, Vec2 x) { return x.x; }, 10) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("luxemburg norm agrees with constant-exponent L^p") {
  const Triangulation m = fine_square(2);
  auto f = [](int, Vec2 x) { return 0.3 + x.x * x.y; };
  for (double p : {1.5, 2.0, 3.75}) {
    const ExponentField pf = constant_exponent(p);
    const double mod = modular(m, pointwise_exponent(pf), f, 10);
    const double closed = std::pow(mod, 1.0 / p);
    const double lux = luxemburg_norm(m, pointwise_exponent(pf), f, 10);
    CHECK(lux == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("luxemburg homogeneity") {
  const Triangulation m = fine_square(2);
  const ExponentField pf = academic_p(1.0, 2.0, 3.0);
  auto f = [](int, Vec2 x) { return x.x - 0.4 * x.y; };
  const double base = luxemburg_norm(m, pointwise_exponent(pf), f, 8);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> dist(0.1, 20.0);
  for (int k = 0; k < 5; ++k) {
    const double c = dist(rng);
    auto cf = [&](int t, Vec2 x) { return c * f(t, x); };
    CHECK(luxemburg_norm(m, pointwise_exponent(pf), cf, 8) ==
          doctest::Approx(c * base).epsilon(1e-9));
  }
  CHECK(luxemburg_norm(m, pointwise_exponent(pf), [](int, Vec2) { return 0.0; }, 8) == 0.0);
}

TEST_CASE("two-exponent Luxemburg against a grid-scan oracle") {
  // two triangles, piecewise constant data: rho(1/l) = 0.5 (1/l)^2 + 0.5 (2/l)^3
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Triangulation m(v, {{0, 1, 2}, {0, 2, 3}});
  DiscreteExponent pe;
  pe.values = {2.0, 3.0};
  auto f = [](int t, Vec2) { return t == 0 ? 1.0 : 2.0; };

  auto rho = [](double l) {
    return 0.5 * std::pow(1.0 / l, 2.0) + 0.5 * std::pow(2.0 / l, 3.0);
  };
  double lo = 0.5, hi = 8.0;
  while (rho(lo) <= 1.0) lo *= 0.5;
  double scan = hi;
  for (double l = hi; l >= lo; l -= 1e-6)
    if (rho(l) <= 1.0) scan = l;

  const double lux = luxemburg_norm(m, frozen_exponent(pe), f, 4);
  CHECK(lux == doctest::Approx(scan).epsilon(3e-6));
}

TEST_CASE("unit ball property of the Luxemburg norm") {
  const Triangulation m = fine_square(3);
  const ExponentField pf = academic_p(0.5, 1.5, 2.5);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int k = 0; k < 5; ++k) {
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    auto f = [&](int, Vec2 x) { return a + b * x.x + c * x.y; };
    const double L = luxemburg_norm(m, pointwise_exponent(pf), f, 8);
    if (L == 0.0) continue;
    auto scaled = [&](int t, Vec2 x) { return f(t, x) / L; };
    const double mod = modular(m, pointwise_exponent(pf), scaled, 8);
    CHECK(mod == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("velocity error vanishes on represented fields") {
  const Triangulation m = fine_square(2);
  const FeSpace vel = build_space(m, Family::P2c, 2);
  auto v_exact = [](Vec2 x) { return Vec2{x.x * x.x + 2.0 * x.x * x.y, -(2.0 * x.x * x.y + x.y * x.y)}; };
  auto dv_exact = [](Vec2 x) {
    Mat2 g;
    g(0, 0) = 2.0 * x.x + 2.0 * x.y;
    g(0, 1) = 2.0 * x.x;
    g(1, 0) = -2.0 * x.y;
    g(1, 1) = -(2.0 * x.x + 2.0 * x.y);
    return g;
  };
  const auto dofs_std = interpolate(vel, std::function<Vec2(Vec2)>(v_exact));
  Eigen::VectorXd dofs = Eigen::Map<const Eigen::VectorXd>(dofs_std.data(), dofs_std.size());
  DiscreteExponent pe;
  pe.values.assign(m.n_triangles(), 2.0);
  CHECK(error_velocity(m, pe, 1e-5, vel, dofs, dv_exact, 10) <= 1e-10);

  // scaling the discrete field moves the error continuously away from zero
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dofs.size());
  const double e0 = error_velocity(m, pe, 1e-5, vel, zero, dv_exact, 10);
  CHECK(e0 > 0.1);
}

TEST_CASE("pressure error closed form on one element") {
  // single reference triangle, q = x, q_h = its P1 interpolant (= q):
  // || q - <q> ||_{L^2}^2 = 1/36, so the error is 1/6
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}};
  const Triangulation m(v, {{0, 1, 2}});
  const FeSpace pres = build_space(m, Family::P1c, 1);
  Eigen::VectorXd q(3);
  q << 0.0, 1.0, 0.0;  // nodal values of q = x
  DiscreteExponent pc;
  pc.values = {2.0};
  const double e = error_pressure_localized(m, pc, pres, q, [](Vec2 x) { return x.x; }, 10);
  CHECK(e == doctest::Approx(1.0 / 6.0).epsilon(1e-9));

  // q_h equal to the element mean gives a vanishing error
  Eigen::VectorXd qc = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(error_pressure_localized(m, pc, pres, qc, [](Vec2 x) { return x.x; }, 10) <= 1e-12);
}

TEST_CASE("eoc") {
  auto r = eoc({0.4, 0.2}, {0.5});
  REQUIRE(r.size() == 1);
  CHECK(*r[0] == doctest::Approx(1.0).epsilon(1e-14));
  r = eoc({0.4, 0.4}, {0.5});
  CHECK(*r[0] == doctest::Approx(0.0).epsilon(1e-14));
  r = eoc({1.0, std::pow(2.0, -0.75)}, {0.5});
  CHECK(*r[0] == doctest::Approx(0.75).epsilon(1e-14));
  r = eoc({1.0, 0.0, 0.5}, {0.5, 0.5});
  CHECK_FALSE(r[0].has_value());
  CHECK_FALSE(r[1].has_value());
  // scaling invariance is exact by the log-ratio form
  auto r1 = eoc({0.8, 0.3, 0.11}, {0.5, 0.5});
  auto r2 = eoc({8.0, 3.0, 1.1}, {0.5, 0.5});
  CHECK(*r1[0] == doctest::Approx(*r2[0]).epsilon(1e-14));
  CHECK(*r1[1] == doctest::Approx(*r2[1]).epsilon(1e-14));
  CHECK_THROWS_AS((void)eoc({1.0, 0.5}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("theory rates reproduce every printed table entry") {
  const double pms[6] = {1.5, 1.75, 2.0, 2.25, 2.5, 2.75};
  struct Row {
    int case_id;
    RateQuantity q;
    double a;
    const double* expected;
    int n;
  };
  // velocity rows (identical for both element tables)
  static const double v_c1_a1[6] = {0.833, 0.786, 0.750, 0.722, 0.700, 0.682};
  static const double v_c1_a05[6] = {0.417, 0.393, 0.375, 0.361, 0.350, 0.341};
  static const double ones[4] = {1.000, 1.000, 1.000, 1.000};
  static const double halves[4] = {0.500, 0.500, 0.500, 0.500};
  // pressure rows
  static const double q_c1_a1[6] = {0.556, 0.673, 0.750, 0.722, 0.700, 0.682};
  static const double q_c1_a05[6] = {0.278, 0.337, 0.375, 0.361, 0.350, 0.341};

  const Row rows[] = {
      {1, RateQuantity::Velocity, 1.0, v_c1_a1, 6},
      {1, RateQuantity::Velocity, 0.5, v_c1_a05, 6},
      {2, RateQuantity::Velocity, 1.0, ones, 4},
      {2, RateQuantity::Velocity, 0.5, halves, 4},
      {1, RateQuantity::Pressure, 1.0, q_c1_a1, 6},
      {1, RateQuantity::Pressure, 0.5, q_c1_a05, 6},
      {2, RateQuantity::Pressure, 1.0, ones, 4},
      {2, RateQuantity::Pressure, 0.5, halves, 4},
  };
  for (const Row& row : rows) {
    for (int i = 0; i < row.n; ++i) {
      const double pm = row.n == 6 ? pms[i] : pms[i + 2];  // case 2 columns start at 2.0
      const double rate =
          theory_rate(row.case_id, row.q, row.a, row.a, row.a, pm, pm + 1.0);
      CHECK(std::abs(rate - row.expected[i]) <= 0.001);
    }
  }
  CHECK_THROWS_AS((void)theory_rate(3, RateQuantity::Velocity, 1, 1, 1, 2, 3),
                  std::invalid_argument);
}
