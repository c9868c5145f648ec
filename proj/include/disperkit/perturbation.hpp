#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "disperkit/eigensolve.hpp"

namespace disperkit {

namespace detail {

inline void require_simple(const ModeSet& set, int i, double eps_eig) {
  double floor_val = 1e-9 * std::max(1.0, set.lambdas.cwiseAbs().maxCoeff());
  for (int j = 0; j < set.mode_count(); ++j) {
    if (j == i) continue;
    if (relative_gap(set.lambdas(i), set.lambdas(j), floor_val) <= eps_eig)
      throw std::invalid_argument("perturbation: mode " + std::to_string(i) +
                                  " is degenerate with mode " + std::to_string(j));
  }
}

}  // namespace detail

// Coupling term q_j^H K' q_i between two modes.
inline cxd coupling(const ModeSet& set, int i, int j, const Eigen::MatrixXcd& kprime) {
  if (i == j) throw std::invalid_argument("coupling: requires i != j");
  return cxd(set.vectors.col(j).adjoint() * kprime * set.vectors.col(i));
}

// Finite coupling coefficient c_ij = q_i^H K' q_j / (lambda_j - lambda_i),
// defined only away from degeneracy.
struct CouplingCoefficient {
  int i = -1, j = -1;
  cxd value;
};

inline CouplingCoefficient coupling_coefficient(const ModeSet& set, int i, int j,
                                                const Eigen::MatrixXcd& kprime,
                                                double eps_eig = 1e-6) {
  if (i == j) throw std::invalid_argument("coupling_coefficient: requires i != j");
  double floor_val = 1e-9 * std::max(1.0, set.lambdas.cwiseAbs().maxCoeff());
  if (detail::relative_gap(set.lambdas(i), set.lambdas(j), floor_val) <= eps_eig)
    throw std::invalid_argument("coupling_coefficient: modes " + std::to_string(i) + " and " +
                                std::to_string(j) + " are degenerate");
  cxd num = cxd(set.vectors.col(i).adjoint() * kprime * set.vectors.col(j));
  return {i, j, num / (set.lambdas(j) - set.lambdas(i))};
}

// Eigenvector derivative expanded over the retained spectrum:
// q_i' = sum_{j != i} (q_j^H K' q_i) / (lambda_i - lambda_j) q_j.
// Satisfies q_i^H M q_i' = 0 by construction. Mode i must be non-degenerate.
inline Eigen::VectorXcd eigvec_derivative(const ModeSet& set, int i,
                                          const Eigen::MatrixXcd& kprime,
                                          double eps_eig = 1e-6) {
  detail::require_simple(set, i, eps_eig);
  Eigen::VectorXcd w = kprime * set.vectors.col(i);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(set.vectors.rows());
  for (int j = 0; j < set.mode_count(); ++j) {
    if (j == i) continue;
    cxd num = cxd(set.vectors.col(j).adjoint() * w);
    out += (num / (set.lambdas(i) - set.lambdas(j))) * set.vectors.col(j);
  }
  return out;
}

// ||q_i'||_M = sqrt(sum_{j != i} |q_j^H K' q_i|^2 / (lambda_i - lambda_j)^2).
inline double derivative_norm(const ModeSet& set, int i, const Eigen::MatrixXcd& kprime,
                              double eps_eig = 1e-6) {
  detail::require_simple(set, i, eps_eig);
  Eigen::VectorXcd w = kprime * set.vectors.col(i);
  double sum = 0.0;
  for (int j = 0; j < set.mode_count(); ++j) {
    if (j == i) continue;
    double gap = set.lambdas(i) - set.lambdas(j);
    sum += std::norm(cxd(set.vectors.col(j).adjoint() * w)) / (gap * gap);
  }
  return std::sqrt(sum);
}

// Effective 2x2 Hermitian model: eigenvectors frozen at k0, contracted against
// K(k). The contractions are quadratic in k, so nine scalars suffice.
class TwoStateModel {
 public:
  TwoStateModel(const SafeMatrices& m, const ModeSet& set, int i, int j)
      : i_(i), j_(j), k0_(set.k) {
    const Eigen::VectorXcd qi = set.vectors.col(i);
    const Eigen::VectorXcd qj = set.vectors.col(j);
    auto quad = [&](const SpMat& mat, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
      return cxd(a.adjoint() * (mat * b).eval());
    };
    s1ii_ = quad(m.K1, qi, qi);
    s2ii_ = quad(m.K2, qi, qi);
    s3ii_ = quad(m.K3, qi, qi);
    s1jj_ = quad(m.K1, qj, qj);
    s2jj_ = quad(m.K2, qj, qj);
    s3jj_ = quad(m.K3, qj, qj);
    s1ij_ = quad(m.K1, qi, qj);
    s2ij_ = quad(m.K2, qi, qj);
    s3ij_ = quad(m.K3, qi, qj);
  }

  double reference_k() const { return k0_; }
  int mode_i() const { return i_; }
  int mode_j() const { return j_; }

  double a(double k) const { return std::real(s1ii_ + cxd(0, k) * s2ii_ + k * k * s3ii_); }
  double c(double k) const { return std::real(s1jj_ + cxd(0, k) * s2jj_ + k * k * s3jj_); }
  cxd b(double k) const { return s1ij_ + cxd(0, k) * s2ij_ + k * k * s3ij_; }
  cxd b_derivative(double k) const { return cxd(0, 1) * s2ij_ + 2.0 * k * s3ij_; }

 private:
  int i_, j_;
  double k0_;
  cxd s1ii_, s2ii_, s3ii_, s1jj_, s2jj_, s3jj_, s1ij_, s2ij_, s3ij_;
};

// Closed-form eigenvalues (a+c)/2 -+ sqrt((a-c)^2 + 4|b|^2)/2, lo <= hi.
inline std::pair<double, double> two_state_eigenvalues(const TwoStateModel& model, double k) {
  double a = model.a(k), c = model.c(k);
  double disc = std::sqrt((a - c) * (a - c) + 4.0 * std::norm(model.b(k)));
  return {0.5 * (a + c) - 0.5 * disc, 0.5 * (a + c) + 0.5 * disc};
}

struct StepBoundEstimate {
  double k = 0.0;
  int mode = -1;
  double c1 = 0.0, c2 = 0.0;
  double delta0 = 0.0;
  double delta_k_max = 0.0;
};

// Local admissible-step construction: C1 = 2||q_i'||^2, C2 = 2 max|c_ij|^2,
// delta_k_max = min(delta0, 1/sqrt(C1 + C2)).
inline StepBoundEstimate estimate_step_bound(const ModeSet& set, int i,
                                             const Eigen::MatrixXcd& kprime, double delta0,
                                             double eps_eig = 1e-6) {
  if (!(delta0 > 0.0)) throw std::invalid_argument("estimate_step_bound: delta0 must be > 0");
  detail::require_simple(set, i, eps_eig);
  StepBoundEstimate out;
  out.k = set.k;
  out.mode = i;
  out.delta0 = delta0;
  double dn = derivative_norm(set, i, kprime, eps_eig);
  out.c1 = 2.0 * dn * dn;
  Eigen::VectorXcd w = kprime * set.vectors.col(i);
  double cmax = 0.0;
  for (int j = 0; j < set.mode_count(); ++j) {
    if (j == i) continue;
    double cij = std::abs(cxd(set.vectors.col(j).adjoint() * w)) /
                 std::abs(set.lambdas(j) - set.lambdas(i));
    cmax = std::max(cmax, cij);
  }
  out.c2 = 2.0 * cmax * cmax;
  double total = out.c1 + out.c2;
  out.delta_k_max = total > 0.0 ? std::min(delta0, 1.0 / std::sqrt(total)) : delta0;
  return out;
}

}  // namespace disperkit
