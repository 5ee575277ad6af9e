#include <doctest.h>

#include <cmath>

#include "pxflow/quadrature.hpp"

using namespace pxf;

namespace {

// exact integral of lambda0^a lambda1^b lambda2^c over the reference triangle
double monomial_exact(int a, int b, int c) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

}  // namespace

TEST_CASE("rules integrate barycentric monomials exactly up to their degree") {
  for (int degree = 1; degree <= 12; ++degree) {
    const QuadratureRule& r = rule(degree);
    CHECK(r.degree >= degree);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));

    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        const int c = degree - a - b;
        double num = 0.0;
        for (int q = 0; q < r.size(); ++q)
          num += r.weights[q] * std::pow(r.points[q].l0, a) * std::pow(r.points[q].l1, b) *
                 std::pow(r.points[q].l2, c);
        const double exact = monomial_exact(a, b, c);
        CHECK(num == doctest::Approx(exact).epsilon(1e-12));
      }
  }
}

TEST_CASE("degree-1 rule is the centroid rule") {
  const QuadratureRule& r = rule(1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0].l0 == doctest::Approx(1.0 / 3.0));
  CHECK(r.weights[0] == doctest::Approx(0.5));
}

TEST_CASE("degree-4 rule hits the l1^2 l2^2 oracle") {
  const QuadratureRule& r = rule(4);
  double num = 0.0;
  for (int q = 0; q < r.size(); ++q)
    num += r.weights[q] * r.points[q].l1 * r.points[q].l1 * r.points[q].l2 * r.points[q].l2;
  CHECK(num == doctest::Approx(1.0 / 180.0).epsilon(1e-14));  // 2!2!0!/6!
}

TEST_CASE("requested degrees out of range are rejected") {
  CHECK_THROWS_AS((void)rule(0), std::invalid_argument);
  CHECK_THROWS_AS((void)rule(13), std::invalid_argument);
}

TEST_CASE("rule points are interior") {
  for (int degree : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}) {
    const QuadratureRule& r = rule(degree);
    for (const auto& p : r.points) {
      CHECK(p.l0 > 0.0);
      CHECK(p.l1 > 0.0);
      CHECK(p.l2 > 0.0);
      CHECK(p.l0 + p.l1 + p.l2 == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("map_to_element") {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}, {2.3, 0.4}, {1.7, 2.9}};
  const Triangulation m(v, {{0, 1, 2}, {1, 3, 4}});

  SUBCASE("identity on the reference element") {
    const QuadratureRule& r = rule(5);
    const MappedQuadrature q = map_to_element(r, m.geometry(0));
    for (int i = 0; i < r.size(); ++i) {
      CHECK(q.points[i].x == doctest::Approx(r.points[i].l1).epsilon(1e-15));
      CHECK(q.points[i].y == doctest::Approx(r.points[i].l2).epsilon(1e-15));
    }
  }
  SUBCASE("weights sum to the element area; centroid identity") {
    for (int t : {0, 1}) {
      const ElementGeometry& g = m.geometry(t);
      const MappedQuadrature q = map_to_element(rule(4), g);
      double wsum = 0.0, xint = 0.0;
      for (size_t i = 0; i < q.points.size(); ++i) {
        wsum += q.weights[i];
        xint += q.weights[i] * q.points[i].x;
      }
      CHECK(wsum == doctest::Approx(g.area).epsilon(1e-14));
      CHECK(xint == doctest::Approx(g.area * g.barycenter.x).epsilon(1e-13));
    }
  }
  SUBCASE("degenerate element is rejected") {
    ElementGeometry g = m.geometry(0);
    g.area = 0.0;
    CHECK_THROWS_AS((void)map_to_element(rule(2), g), MeshError);
  }
}
