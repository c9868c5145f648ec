#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "disperkit/eigensolve.hpp"

namespace disperkit {

// MAC between two M-normalized eigenvectors: |q_a^H M q_b|^2.
inline double mac(const Eigen::VectorXcd& qa, const Eigen::VectorXcd& qb, const SpMat& m) {
  if (qa.size() != qb.size() || qa.size() != m.rows())
    throw std::invalid_argument("mac: dimension mismatch");
  Eigen::VectorXcd mqb = m * qb;
  double na = std::real(cxd(qa.adjoint() * (m * qa).eval()));
  double nb = std::real(cxd(qb.adjoint() * mqb));
  if (std::abs(na - 1.0) > 1e-6 || std::abs(nb - 1.0) > 1e-6)
    throw std::invalid_argument("mac: inputs must be M-normalized");
  return std::norm(cxd(qa.adjoint() * mqb));
}

// Rotation-invariant subspace MAC: |Q_a^H M Q_b|_F^2 / max(d_a, d_b).
// Reduces to mac() for d_a = d_b = 1.
inline double subspace_mac(const Eigen::MatrixXcd& qa, const Eigen::MatrixXcd& qb,
                           const SpMat& m) {
  if (qa.rows() != qb.rows() || qa.rows() != m.rows())
    throw std::invalid_argument("subspace_mac: dimension mismatch");
  Eigen::MatrixXcd mqb = m * qb;
  Eigen::MatrixXcd ga = qa.adjoint() * (m * qa).eval();
  Eigen::MatrixXcd gb = qb.adjoint() * mqb;
  auto dev = [](const Eigen::MatrixXcd& g) {
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  };
  if (dev(ga) > 1e-6 || dev(gb) > 1e-6)
    throw std::invalid_argument("subspace_mac: bases must be M-orthonormal");
  double d = static_cast<double>(std::max(qa.cols(), qb.cols()));
  return (qa.adjoint() * mqb).squaredNorm() / d;
}

// Object-level MAC matrix between two mode sets (objects are singletons or
// degenerate clusters; dimension mismatch is normalized by the larger d).
inline Eigen::MatrixXd mac_matrix(const ModeSet& left, const ModeSet& right, const SpMat& m) {
  if (left.vectors.rows() != right.vectors.rows() || left.vectors.rows() != m.rows())
    throw std::invalid_argument("mac_matrix: mode sets have mismatched DOF layout");
  Eigen::MatrixXcd mqr = m * right.vectors;
  for (int c = 0; c < left.vectors.cols(); ++c) {
    double n = std::real(cxd(left.vectors.col(c).adjoint() * (m * left.vectors.col(c)).eval()));
    if (std::abs(n - 1.0) > 1e-6)
      throw std::invalid_argument("mac_matrix: left set is not M-normalized");
  }
  for (int c = 0; c < right.vectors.cols(); ++c) {
    double n = std::real(cxd(right.vectors.col(c).adjoint() * mqr.col(c)));
    if (std::abs(n - 1.0) > 1e-6)
      throw std::invalid_argument("mac_matrix: right set is not M-normalized");
  }
  Eigen::MatrixXcd s = left.vectors.adjoint() * mqr;  // mode-level inner products
  int nl = static_cast<int>(left.objects.size());
  int nr = static_cast<int>(right.objects.size());
  Eigen::MatrixXd out(nl, nr);
  for (int i = 0; i < nl; ++i) {
    for (int j = 0; j < nr; ++j) {
      double sum = 0.0;
      for (int a : left.objects[i])
        for (int b : right.objects[j]) sum += std::norm(s(a, b));
      out(i, j) = sum / std::max(left.objects[i].size(), right.objects[j].size());
    }
  }
  return out;
}

// Cost matrix of the assignment problem: C_ij = 1 - MAC.
inline Eigen::MatrixXd cost_matrix(const ModeSet& left, const ModeSet& right, const SpMat& m) {
  return Eigen::MatrixXd::Ones(left.objects.size(), right.objects.size()) -
         mac_matrix(left, right, m);
}

namespace detail {

// Shortest-augmenting-path assignment for rows <= cols; ties resolve to the
// lowest column index, rows are inserted in order.
inline std::vector<int> assign_rows(const Eigen::MatrixXd& a) {
  int n = static_cast<int>(a.rows()), m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> res(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j]) res[p[j] - 1] = j - 1;
  return res;
}

}  // namespace detail

// Optimal injective assignment of min(R, C) pairs minimizing total cost.
// Returns, per row, the assigned column or -1.
inline std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  if (cost.size() == 0) return std::vector<int>(cost.rows(), -1);
  if (!cost.allFinite()) throw std::invalid_argument("hungarian: cost entries must be finite");
  if (cost.rows() <= cost.cols()) return detail::assign_rows(cost);
  std::vector<int> cols = detail::assign_rows(cost.transpose());
  std::vector<int> res(cost.rows(), -1);
  for (size_t j = 0; j < cols.size(); ++j)
    if (cols[j] >= 0) res[cols[j]] = static_cast<int>(j);
  return res;
}

// MAC separation D_i = min(D_row, D_col) per matched left object; unmatched
// objects get NaN. The max over an empty competitor set is 0.
inline std::vector<double> mac_separation(const Eigen::MatrixXd& macm,
                                          const std::vector<int>& assignment) {
  int nl = static_cast<int>(macm.rows()), nr = static_cast<int>(macm.cols());
  std::vector<double> d(nl, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < nl; ++i) {
    int j = assignment[i];
    if (j < 0) continue;
    double self = macm(i, j);
    double row_comp = 0.0, col_comp = 0.0;
    for (int jj = 0; jj < nr; ++jj)
      if (jj != j) row_comp = std::max(row_comp, macm(i, jj));
    for (int ii = 0; ii < nl; ++ii)
      if (ii != i) col_comp = std::max(col_comp, macm(ii, j));
    d[i] = std::min(self - row_comp, self - col_comp);
  }
  return d;
}

// A posteriori tracking error indicator: 1 - min_i D_i, in [0, 2].
inline double error_indicator(const std::vector<double>& ds) {
  double dmin = std::numeric_limits<double>::infinity();
  for (double d : ds)
    if (!std::isnan(d)) dmin = std::min(dmin, d);
  if (!std::isfinite(dmin))
    throw std::invalid_argument("error_indicator: no matched objects in interval");
  return 1.0 - dmin;
}

// Everything the matcher knows about one wavenumber interval.
struct IntervalMatch {
  double k_left = 0.0, k_right = 0.0;
  Eigen::MatrixXd mac;          // object-level MAC values
  std::vector<int> assignment;  // left object -> right object, -1 if unmatched
  std::vector<double> separations;
  double epsilon = 0.0;
};

inline IntervalMatch match_interval(const ModeSet& left, const ModeSet& right, const SpMat& m) {
  IntervalMatch out;
  out.k_left = left.k;
  out.k_right = right.k;
  out.mac = mac_matrix(left, right, m);
  out.assignment = hungarian(Eigen::MatrixXd::Ones(out.mac.rows(), out.mac.cols()) - out.mac);
  out.separations = mac_separation(out.mac, out.assignment);
  out.epsilon = error_indicator(out.separations);
  return out;
}

}  // namespace disperkit
