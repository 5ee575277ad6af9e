#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "pxflow/experiments.hpp"
#include "pxflow/quadrature.hpp"
#include "pxflow/vtk.hpp"

using namespace pxf;

TEST_CASE("manufactured velocity field") {
  auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.0);
  CHECK(mc.p_plus() == doctest::Approx(3.0));
  const Vec2 v0 = mc.velocity({0, 0});
  CHECK(v0.x == 0.0);
  CHECK(v0.y == 0.0);
  // rho_v = 1e-4 at beta = 1, so the field is nearly the rigid rotation
  const Vec2 v = mc.velocity({0.3, 0.7});
  CHECK(v.x == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(v.y == doctest::Approx(-0.3).epsilon(1e-3));
  CHECK_THROWS_AS((void)mc.velocity_gradient({0, 0}), std::domain_error);
}

TEST_CASE("exact velocity is divergence free") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.01, 1.0);
  for (int c : {1, 2}) {
    auto mc = ManufacturedCase::make(c, 0.5, 0.5, 0.5, 2.5);
    for (int k = 0; k < 100; ++k) {
      const Vec2 x{dist(rng), dist(rng)};
      const Mat2 g = mc.velocity_gradient(x);
      CHECK(std::abs(g.trace()) <= 1e-11 * (1.0 + g.frobenius()));
    }
  }
}

TEST_CASE("velocity gradient matches finite differences") {
  auto mc = ManufacturedCase::make(1, 0.5, 0.5, 0.5, 2.5);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x{dist(rng), dist(rng)};
    const double h = 1e-6 * x.norm();
    const Mat2 g = mc.velocity_gradient(x);
    Mat2 fd;
    const Vec2 dxp = mc.velocity({x.x + h, x.y});
    const Vec2 dxm = mc.velocity({x.x - h, x.y});
    const Vec2 dyp = mc.velocity({x.x, x.y + h});
    const Vec2 dym = mc.velocity({x.x, x.y - h});
    fd(0, 0) = (dxp.x - dxm.x) / (2 * h);
    fd(1, 0) = (dxp.y - dxm.y) / (2 * h);
    fd(0, 1) = (dyp.x - dym.x) / (2 * h);
    fd(1, 1) = (dyp.y - dym.y) / (2 * h);
    const Mat2 diff = g - fd;
    CHECK(diff.frobenius() <= 1e-6 * g.frobenius());
  }
}

TEST_CASE("pressure exponent collapse where p = 2") {
  auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.0);
  // at (1,1) the exponent field hits p = 2, so rho_q = 1e-4 there
  CHECK(mc.rho_q({1, 1}) == doctest::Approx(1e-4).epsilon(1e-10));
  // case 2 with beta = gamma = 1 keeps rho_q tiny and nonnegative where p >= 2
  auto mc2 = ManufacturedCase::make(2, 1.0, 1.0, 1.0, 2.0);
  for (double t : {0.1, 0.3, 0.6, 0.9}) {
    const Vec2 x{t, t * 0.5};
    if (mc2.exponent()(x) >= 2.0) CHECK(mc2.rho_q(x) >= 0.0);
  }
}

TEST_CASE("mean shift") {
  SUBCASE("integration oracle: modular recovers a closed-form integral") {
    Triangulation m = unit_square_initial();
    for (int i = 0; i < 6; ++i) m = refine_red(m);
    const ExponentField p2 = constant_exponent(2.0);
    const double val =
        modular(m, pointwise_exponent(p2), [](int, Vec2 x) { return x.norm(); }, 10);
    CHECK(val == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  }
  SUBCASE("near-constant integrand has mean near one") {
    auto mc = ManufacturedCase::make(2, 1.0, 1.0, 1.0, 2.0);  // rho_q in [1e-4, 1.5e-4]
    CHECK(mc.mean_shift() == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("pressure has zero mean after the shift") {
    auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.0);
    Triangulation m = unit_square_initial();
    for (int i = 0; i < 8; ++i) m = refine_red(m);
    const QuadratureRule& qr = rule(10);
    double mean = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) {
      const ElementGeometry& g = m.geometry(t);
      for (int q = 0; q < qr.size(); ++q)
        mean += qr.weights[q] * 2.0 * g.area * mc.pressure(g.map(qr.points[q].l1, qr.points[q].l2));
    }
    CHECK(std::abs(mean) <= 1e-8);
  }
  SUBCASE("level-7 and level-8 quadratures of the shift integrand agree") {
    auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.0);
    const QuadratureRule& qr = rule(10);
    auto shift_at = [&](int levels) {
      Triangulation m = unit_square_initial();
      for (int i = 0; i < levels; ++i) m = refine_red(m);
      double total = 0.0;
      for (int t = 0; t < m.n_triangles(); ++t) {
        const ElementGeometry& g = m.geometry(t);
        for (int q = 0; q < qr.size(); ++q)
          total += qr.weights[q] * 2.0 * g.area *
                   mc.pressure_unshifted(g.map(qr.points[q].l1, qr.points[q].l2));
      }
      return total;
    };
    const double s7 = shift_at(7);
    const double s8 = mc.mean_shift();
    CHECK(std::abs(s7 - s8) <= 1e-6);
    CHECK(s8 == doctest::Approx(shift_at(8)).epsilon(1e-14));
  }
}

TEST_CASE("electric field of the electrode pair") {
  SUBCASE("hand value at the origin") {
    const Vec2 e = ERScenario::field_E({0, 0});
    CHECK(e.x == doctest::Approx(-3.2).epsilon(1e-15));
    CHECK(e.y == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("divergence and curl vanish pointwise") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int tested = 0;
    while (tested < 100) {
      const Vec2 x{dist(rng), dist(rng)};
      const double dl = (x - ERScenario::electrode(-1)).norm();
      const double dr = (x - ERScenario::electrode(+1)).norm();
      if (dl < ERScenario::hole_radius || dr < ERScenario::hole_radius) continue;
      ++tested;
      const Mat2 g = ERScenario::grad_E(x);
      CHECK(std::abs(g.trace()) <= 1e-10 * (1.0 + g.frobenius()));        // div E = 0
      CHECK(std::abs(g(0, 1) - g(1, 0)) <= 1e-10 * (1.0 + g.frobenius()));  // curl E = 0
    }
  }
  SUBCASE("gradient matches finite differences") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    int tested = 0;
    while (tested < 30) {
      const Vec2 x{dist(rng), dist(rng)};
      const double dl = (x - ERScenario::electrode(-1)).norm();
      const double dr = (x - ERScenario::electrode(+1)).norm();
      if (dl < 2.0 * ERScenario::hole_radius || dr < 2.0 * ERScenario::hole_radius) continue;
      ++tested;
      const double h = 1e-7;
      const Mat2 g = ERScenario::grad_E(x);
      Mat2 fd;
      const Vec2 xp = ERScenario::field_E({x.x + h, x.y});
      const Vec2 xm = ERScenario::field_E({x.x - h, x.y});
      const Vec2 yp = ERScenario::field_E({x.x, x.y + h});
      const Vec2 ym = ERScenario::field_E({x.x, x.y - h});
      fd(0, 0) = (xp.x - xm.x) / (2 * h);
      fd(1, 0) = (xp.y - xm.y) / (2 * h);
      fd(0, 1) = (yp.x - ym.x) / (2 * h);
      fd(1, 1) = (yp.y - ym.y) / (2 * h);
      CHECK((g - fd).frobenius() <= 1e-6 * g.frobenius());
    }
  }
  SUBCASE("material function") {
    CHECK(ERScenario::p_hat(0.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ERScenario::p_hat(1e9) > 2.0);
    CHECK(ERScenario::p_hat(1e9) < 2.0 + 1e-6);
    double prev = 5.0;
    for (double t = 0.0; t < 20.0; t += 0.25) {
      const double v = ERScenario::p_hat(t);
      CHECK(v < prev);
      prev = v;
    }
  }
  SUBCASE("evaluation inside an electrode is a domain error") {
    CHECK_THROWS_AS((void)ERScenario::field_E(ERScenario::electrode(+1)), std::domain_error);
    CHECK_THROWS_AS((void)ERScenario::grad_E(ERScenario::electrode(-1)), std::domain_error);
  }
  SUBCASE("force with the field is mechanical force plus the dipole term") {
    const Vec2 x{0.1, -0.4};
    ERScenario sc;
    const Vec2 f0 = sc.force(x, false);
    CHECK(f0.x == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(f0.y == 0.0);
    const Vec2 f1 = sc.force(x, true);
    const Vec2 E = ERScenario::field_E(x);
    const Mat2 G = ERScenario::grad_E(x);
    CHECK(f1.x == doctest::Approx(f0.x + G(0, 0) * E.x + G(0, 1) * E.y).epsilon(1e-13));
    CHECK(f1.y == doctest::Approx(f0.y + G(1, 0) * E.x + G(1, 1) * E.y).epsilon(1e-13));
  }
}

TEST_CASE("convergence study driver on a short ladder") {
  auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.0);
  StudyOptions opts;
  opts.compute_stability = true;
  const StudyResult res = run_convergence_study(mc, MixedPair::taylor_hood(), 3, opts);
  REQUIRE_FALSE(res.aborted);
  REQUIRE(res.records.size() == 4);
  CHECK_FALSE(res.records[0].eoc_v.has_value());
  for (int i = 1; i <= 3; ++i) {
    CHECK(res.records[i].eoc_v.has_value());
    CHECK(res.records[i].h == doctest::Approx(std::pow(0.5, i)).epsilon(1e-15));
  }
  // errors decrease and the stability proxy stays bounded
  for (int i = 1; i <= 3; ++i) {
    CHECK(res.records[i].e_v < res.records[i - 1].e_v);
    CHECK(res.records[i].converged);
    CHECK(res.records[i].stability > 0.0);
  }
  CHECK(res.records[0].theory_v == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(res.records[0].theory_q == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("aborted studies flag partial results") {
  auto mc = ManufacturedCase::make(1, 1.0, 1.0, 1.0, 2.5);
  StudyOptions opts;
  opts.newton.max_iter = 1;  // cannot converge on the nonlinear problem
  const StudyResult res = run_convergence_study(mc, MixedPair::mini(), 2, opts);
  CHECK(res.aborted);
  CHECK_FALSE(res.abort_reason.empty());
  CHECK(res.records.size() >= 1);
  CHECK_FALSE(res.records.back().converged);
}

TEST_CASE("vtk round trip") {
  const Triangulation m = refine_red(unit_square_initial());
  VtkGrid g;
  g.points = m.vertices();
  g.cells.assign(m.triangles().begin(), m.triangles().end());
  std::vector<Vec2> vel(m.n_vertices());
  std::vector<double> pres(m.n_vertices());
  std::vector<double> exponent(m.n_triangles());
  for (int i = 0; i < m.n_vertices(); ++i) {
    vel[i] = {std::sin(1.0 + i), std::cos(2.0 + i)};
    pres[i] = 0.1 * i - 0.5;
  }
  for (int t = 0; t < m.n_triangles(); ++t) exponent[t] = 2.0 + 0.01 * t;
  g.point_vectors["velocity"] = vel;
  g.point_scalars["pressure"] = pres;
  g.cell_scalars["exponent"] = exponent;

  const std::string path = std::filesystem::temp_directory_path() / "pxf_roundtrip.vtk";
  write_vtk(path, "round trip", g);
  const VtkGrid r = read_vtk(path);
  REQUIRE(r.points.size() == g.points.size());
  REQUIRE(r.cells.size() == g.cells.size());
  for (size_t i = 0; i < g.points.size(); ++i) {
    CHECK(r.points[i].x == g.points[i].x);
    CHECK(r.points[i].y == g.points[i].y);
  }
  for (size_t t = 0; t < g.cells.size(); ++t) CHECK(r.cells[t] == g.cells[t]);
  REQUIRE(r.point_vectors.count("velocity"));
  REQUIRE(r.point_scalars.count("pressure"));
  REQUIRE(r.cell_scalars.count("exponent"));
  for (size_t i = 0; i < vel.size(); ++i) {
    CHECK(r.point_vectors.at("velocity")[i].x == vel[i].x);
    CHECK(r.point_scalars.at("pressure")[i] == pres[i]);
  }
  for (size_t t = 0; t < exponent.size(); ++t) CHECK(r.cell_scalars.at("exponent")[t] == exponent[t]);
  std::filesystem::remove(path);
}
