#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace disperkit {

struct QuadratureRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

namespace detail {

// Legendre P_n(x) and its derivative by recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int m = 2; m <= n; ++m) {
    double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

// Gauss-Lobatto-Legendre nodes and weights on [-1, 1] for polynomial order p
// (p+1 points, endpoints included).
inline QuadratureRule gll_rule(int order) {
  if (order < 1) throw std::invalid_argument("gll_rule: order must be >= 1");
  int n = order + 1;
  Eigen::VectorXd x(n), w(n);
  x(0) = -1.0;
  x(n - 1) = 1.0;
  // Interior nodes are roots of P'_p; Newton from Chebyshev-Lobatto guesses.
  for (int j = 1; j < n - 1; ++j) {
    double xi = -std::cos(M_PI * j / order);
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre(order, xi);
      // f = P'_p, f' = P''_p = (2 x P'_p - p(p+1) P_p) / (1 - x^2)
      double f = dp;
      double fp = (2.0 * xi * dp - order * (order + 1.0) * p) / (1.0 - xi * xi);
      double step = f / fp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x(j) = xi;
  }
  for (int j = 0; j < n; ++j) {
    auto [p, dp] = detail::legendre(order, x(j));
    (void)dp;
    w(j) = 2.0 / (order * (order + 1.0) * p * p);
  }
  return {x, w};
}

// Gauss-Legendre rule with n points (exact to degree 2n-1).
inline QuadratureRule gauss_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
  Eigen::VectorXd x(n), w(n);
  for (int j = 0; j < n; ++j) {
    double xi = std::cos(M_PI * (4.0 * j + 3.0) / (4.0 * n + 2.0));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre(n, xi);
      double step = p / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    auto [p, dp] = detail::legendre(n, xi);
    (void)p;
    x(j) = xi;
    w(j) = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  // ascending for reproducibility
  std::vector<int> idx(n);
  for (int j = 0; j < n; ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) < x(b); });
  Eigen::VectorXd xs(n), ws(n);
  for (int j = 0; j < n; ++j) {
    xs(j) = x(idx[j]);
    ws(j) = w(idx[j]);
  }
  return {xs, ws};
}

// Derivative matrix D(i,j) = l_j'(x_i) for the Lagrange basis on the given nodes.
inline Eigen::MatrixXd lagrange_derivative_matrix(const Eigen::VectorXd& nodes) {
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd b(n);  // barycentric weights
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) prod *= nodes(j) - nodes(m);
    b(j) = 1.0 / prod;
  }
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (b(j) / b(i)) / (nodes(i) - nodes(j));
      rowsum += d(i, j);
    }
    d(i, i) = -rowsum;
  }
  return d;
}

// Values of the Lagrange basis on `nodes` at point x.
inline Eigen::VectorXd lagrange_values(const Eigen::VectorXd& nodes, double x) {
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) prod *= (x - nodes(m)) / (nodes(j) - nodes(m));
    v(j) = prod;
  }
  return v;
}

namespace quad9 {

// 1D quadratic Lagrange basis on {-1, 0, 1}.
inline void shape1d(double x, double n[3], double dn[3]) {
  n[0] = 0.5 * x * (x - 1.0);
  n[1] = 1.0 - x * x;
  n[2] = 0.5 * x * (x + 1.0);
  dn[0] = x - 0.5;
  dn[1] = -2.0 * x;
  dn[2] = x + 0.5;
}

// Tensor-product quad9 shape functions; local node a*3+b... node index = 3*b + a
// with a along xi, b along eta.
inline void shape(double xi, double eta, double n[9], double dxi[9], double deta[9]) {
  double na[3], da[3], nb[3], db[3];
  shape1d(xi, na, da);
  shape1d(eta, nb, db);
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) {
      int id = 3 * b + a;
      n[id] = na[a] * nb[b];
      dxi[id] = da[a] * nb[b];
      deta[id] = na[a] * db[b];
    }
}

}  // namespace quad9

}  // namespace disperkit
