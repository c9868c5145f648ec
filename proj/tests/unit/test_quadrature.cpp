#include <catch2/catch_amalgamated.hpp>

#include "disperkit/quadrature.hpp"

using namespace disperkit;
using Catch::Approx;

TEST_CASE("GLL order 4 matches the classical values", "[quadrature]") {
  QuadratureRule r = gll_rule(4);
  double s = std::sqrt(3.0 / 7.0);
  double nodes[5] = {-1.0, -s, 0.0, s, 1.0};
  double weights[5] = {0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1};
  for (int i = 0; i < 5; ++i) {
    CHECK(r.points(i) == Approx(nodes[i]).margin(1e-13));
    CHECK(r.weights(i) == Approx(weights[i]).epsilon(1e-13));
  }
}

TEST_CASE("GLL integrates polynomials up to degree 2p-1", "[quadrature]") {
  for (int p : {2, 4, 6}) {
    QuadratureRule r = gll_rule(p);
    for (int deg = 0; deg <= 2 * p - 1; ++deg) {
      double num = 0.0;
      for (int q = 0; q <= p; ++q) num += r.weights(q) * std::pow(r.points(q), deg);
      double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(num == Approx(exact).margin(1e-12));
    }
  }
}

TEST_CASE("Gauss rule n=3 and exactness to degree 2n-1", "[quadrature]") {
  QuadratureRule r = gauss_rule(3);
  double s = std::sqrt(0.6);
  CHECK(r.points(0) == Approx(-s).margin(1e-14));
  CHECK(r.points(1) == Approx(0.0).margin(1e-14));
  CHECK(r.points(2) == Approx(s).margin(1e-14));
  CHECK(r.weights(0) == Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(r.weights(1) == Approx(8.0 / 9.0).epsilon(1e-14));
  for (int n : {2, 3, 5, 8}) {
    QuadratureRule g = gauss_rule(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double num = 0.0;
      for (int q = 0; q < n; ++q) num += g.weights(q) * std::pow(g.points(q), deg);
      double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(num == Approx(exact).margin(1e-12));
    }
  }
}

TEST_CASE("Lagrange derivative matrix differentiates polynomials", "[quadrature]") {
  QuadratureRule r = gll_rule(4);
  Eigen::MatrixXd d = lagrange_derivative_matrix(r.points);
  Eigen::VectorXd f(5), expect(5);
  for (int i = 0; i < 5; ++i) {
    double x = r.points(i);
    f(i) = x * x * x - 2.0 * x;
    expect(i) = 3.0 * x * x - 2.0;
  }
  Eigen::VectorXd got = d * f;
  for (int i = 0; i < 5; ++i) CHECK(got(i) == Approx(expect(i)).margin(1e-12));
}

TEST_CASE("quad9 shape functions are interpolatory", "[quadrature]") {
  double n[9], dxi[9], deta[9];
  double pts[3] = {-1.0, 0.0, 1.0};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) {
      quad9::shape(pts[a], pts[b], n, dxi, deta);
      for (int id = 0; id < 9; ++id)
        CHECK(n[id] == Approx(id == 3 * b + a ? 1.0 : 0.0).margin(1e-14));
    }
}
