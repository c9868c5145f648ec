// Synthetic SAFE-shaped matrix families with known closed-form behaviour.
#pragma once

#include <random>

#include "disperkit/assembly.hpp"

namespace synthetic {

inline disperkit::SpMat to_sparse(const Eigen::MatrixXd& d) {
  disperkit::SpMat s = d.sparseView(1.0, 0.0);
  s.makeCompressed();
  return s;
}

inline disperkit::SafeMatrices from_dense(const Eigen::MatrixXd& k1, const Eigen::MatrixXd& k2,
                                          const Eigen::MatrixXd& k3, const Eigen::MatrixXd& m) {
  disperkit::SafeMatrices out;
  out.n = static_cast<int>(k1.rows());
  out.K1 = to_sparse(k1);
  out.K2 = to_sparse(k2);
  out.K3 = to_sparse(k3);
  out.M = to_sparse(m);
  return out;
}

// Two-state avoided crossing: K(k) = [[d1 + t1 k^2, w], [w, d2 + t2 k^2]].
// Diagonals cross at k* = sqrt((d2-d1)/(t1-t2)); the coupling w keeps the
// true eigenvalues apart by 2|w| at the closest approach.
struct TwoStateFamily {
  double d1, d2, w, t1, t2;

  double k_star() const { return std::sqrt((d2 - d1) / (t1 - t2)); }
  double min_gap() const { return 2.0 * std::abs(w); }
  // half-width over which |a-c| grows to the size of the gap
  double veering_width() const { return std::abs(w) / (std::abs(t1 - t2) * k_star()); }

  double a(double k) const { return d1 + t1 * k * k; }
  double c(double k) const { return d2 + t2 * k * k; }

  std::pair<double, double> eigenvalues(double k) const {
    double half = 0.5 * (a(k) + c(k));
    double disc = 0.5 * std::sqrt(std::pow(a(k) - c(k), 2) + 4.0 * w * w);
    return {half - disc, half + disc};
  }

  // analytic eigenvectors (real symmetric 2x2), lower eigenvalue first
  std::pair<Eigen::Vector2d, Eigen::Vector2d> eigenvectors(double k) const {
    double lo = eigenvalues(k).first;
    Eigen::Vector2d v1;
    if (std::abs(w) > 0) {
      v1 << w, lo - a(k);
      v1.normalize();
    } else {
      v1 = a(k) <= c(k) ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    }
    Eigen::Vector2d v2(-v1.y(), v1.x());
    return {v1, v2};
  }

  disperkit::SafeMatrices matrices() const {
    Eigen::Matrix2d k1;
    k1 << d1, w, w, d2;
    Eigen::Matrix2d k3 = Eigen::Vector2d(t1, t2).asDiagonal();
    return from_dense(k1, Eigen::Matrix2d::Zero(), k3, Eigen::Matrix2d::Identity());
  }
};

// Width chosen so a ~0.25 grid step half-resolves the eigenvector exchange:
// that is the regime where the error indicator must fire.
inline TwoStateFamily default_two_state() { return {4.0, 2.0, 0.1, 0.2, 1.0}; }

// The same two-state interaction embedded among four well-separated spectator
// modes (6 DOFs total).
inline disperkit::SafeMatrices embedded_veering(const TwoStateFamily& f) {
  Eigen::MatrixXd k1 = Eigen::MatrixXd::Zero(6, 6);
  Eigen::MatrixXd k3 = Eigen::MatrixXd::Zero(6, 6);
  double spect_d[4] = {0.5, 9.0, 14.0, 20.0};
  double spect_t[4] = {0.05, 0.3, 0.1, 0.02};
  for (int i = 0; i < 4; ++i) {
    k1(i, i) = spect_d[i];
    k3(i, i) = spect_t[i];
  }
  k1(4, 4) = f.d1;
  k1(5, 5) = f.d2;
  k1(4, 5) = k1(5, 4) = f.w;
  k3(4, 4) = f.t1;
  k3(5, 5) = f.t2;
  return from_dense(k1, Eigen::MatrixXd::Zero(6, 6), k3, Eigen::MatrixXd::Identity(6, 6));
}

// Two decoupled 2x2 blocks whose eigenvalue curves cross: a symmetry-protected
// true crossing (the inter-block coupling is exactly zero).
inline disperkit::SafeMatrices block_crossing() {
  Eigen::MatrixXd k1 = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd k3 = Eigen::MatrixXd::Zero(4, 4);
  k1.block<2, 2>(0, 0) << 1.0, 0.3, 0.3, 2.0;
  k3.block<2, 2>(0, 0) << 0.5, 0.1, 0.1, 0.6;
  k1.block<2, 2>(2, 2) << 3.0, 0.2, 0.2, 4.5;
  k3.block<2, 2>(2, 2) << 0.05, 0.01, 0.01, 0.06;
  return from_dense(k1, Eigen::MatrixXd::Zero(4, 4), k3, Eigen::MatrixXd::Identity(4, 4));
}

// Well-separated monotone spectrum; nothing to refine.
inline disperkit::SafeMatrices separated_family() {
  Eigen::VectorXd d(5), t(5);
  d << 0.5, 2.0, 5.0, 9.0, 14.0;
  t << 0.3, 0.5, 0.7, 0.9, 1.1;
  return from_dense(Eigen::MatrixXd(d.asDiagonal()), Eigen::MatrixXd::Zero(5, 5),
                    Eigen::MatrixXd(t.asDiagonal()), Eigen::MatrixXd::Identity(5, 5));
}

// Random Hermitian SAFE family (K1, K3 sym PSD, K2 skew, M SPD) with n DOFs.
inline disperkit::SafeMatrices random_family(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto randm = [&](int rows, int cols) {
    Eigen::MatrixXd r(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r(i, j) = g(rng);
    return r;
  };
  Eigen::MatrixXd r1 = randm(n, n), r2 = randm(n, n), r3 = randm(n, n), rm = randm(n, n);
  Eigen::MatrixXd k1 = r1.transpose() * r1 / n;
  Eigen::MatrixXd k2 = r2 - r2.transpose();
  Eigen::MatrixXd k3 = r3.transpose() * r3 / n;
  Eigen::MatrixXd m = rm.transpose() * rm / n + Eigen::MatrixXd::Identity(n, n);
  return from_dense(k1, k2, k3, m);
}

}  // namespace synthetic
