#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace disperkit {

using Mat6 = Eigen::Matrix<double, 6, 6>;

// Elastic material in Voigt notation [11, 22, 33, 23, 13, 12] with
// engineering shear strains. Stiffness in Pa, density in kg/m^3.
struct Material {
  Mat6 stiffness = Mat6::Zero();
  double density = 0.0;

  void validate() const {
    if (!(density > 0.0))
      throw std::invalid_argument("material: density must be positive");
    double scale = stiffness.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || (stiffness - stiffness.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("material: stiffness must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat6> es(stiffness, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("material: stiffness must be positive definite");
  }
};

inline Mat6 isotropic_stiffness(double E, double nu) {
  if (!(E > 0.0))
    throw std::invalid_argument("isotropic_stiffness: E must be positive");
  if (!(nu > -1.0 && nu < 0.5))
    throw std::invalid_argument("isotropic_stiffness: nu must lie in (-1, 0.5)");
  double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  double mu = E / (2.0 * (1.0 + nu));
  Mat6 c = Mat6::Zero();
  c(0, 0) = c(1, 1) = c(2, 2) = lambda + 2.0 * mu;
  c(0, 1) = c(0, 2) = c(1, 0) = c(1, 2) = c(2, 0) = c(2, 1) = lambda;
  c(3, 3) = c(4, 4) = c(5, 5) = mu;
  return c;
}

inline Material make_isotropic(double E, double nu, double rho) {
  Material m{isotropic_stiffness(E, nu), rho};
  m.validate();
  return m;
}

// Axis 1 is the fiber axis; G23 follows from E2 and nu23.
inline Material transversely_isotropic_stiffness(double E1, double E2, double G12,
                                                 double nu12, double nu23, double rho) {
  if (!(E1 > 0.0 && E2 > 0.0 && G12 > 0.0))
    throw std::invalid_argument("transversely_isotropic_stiffness: moduli must be positive");
  double G23 = E2 / (2.0 * (1.0 + nu23));
  Mat6 s = Mat6::Zero();
  s(0, 0) = 1.0 / E1;
  s(1, 1) = s(2, 2) = 1.0 / E2;
  s(0, 1) = s(1, 0) = s(0, 2) = s(2, 0) = -nu12 / E1;
  s(1, 2) = s(2, 1) = -nu23 / E2;
  s(3, 3) = 1.0 / G23;
  s(4, 4) = 1.0 / G12;
  s(5, 5) = 1.0 / G12;
  Eigen::FullPivLU<Mat6> lu(s);
  if (!lu.isInvertible())
    throw std::invalid_argument("transversely_isotropic_stiffness: singular compliance");
  Mat6 c = lu.inverse();
  c = 0.5 * (c + c.transpose()).eval();
  Material m{c, rho};
  m.validate();
  return m;
}

namespace detail {

// Voigt pair for index 0..5 in [11, 22, 33, 23, 13, 12] order.
inline constexpr int voigt_i[6] = {0, 1, 2, 1, 0, 0};
inline constexpr int voigt_j[6] = {0, 1, 2, 2, 2, 1};

inline int voigt_index(int i, int j) {
  static constexpr int map[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return map[i][j];
}

}  // namespace detail

// Rotates the stiffness about the plate-normal (z) axis by theta degrees,
// via the full fourth-order tensor transform.
inline Mat6 rotate_stiffness(const Mat6& c, double theta_deg) {
  double t = theta_deg * M_PI / 180.0;
  double cs = std::cos(t), sn = std::sin(t);
  Eigen::Matrix3d a;  // columns: material axes expressed in the global frame
  a << cs, -sn, 0.0,
       sn, cs, 0.0,
       0.0, 0.0, 1.0;
  Mat6 out = Mat6::Zero();
  for (int I = 0; I < 6; ++I) {
    int i = detail::voigt_i[I], j = detail::voigt_j[I];
    for (int J = I; J < 6; ++J) {
      int k = detail::voigt_j[J], l = detail::voigt_i[J];
      double sum = 0.0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
              sum += a(i, p) * a(j, q) * a(k, r) * a(l, s) *
                     c(detail::voigt_index(p, q), detail::voigt_index(r, s));
      out(I, J) = sum;
      out(J, I) = sum;
    }
  }
  return out;
}

}  // namespace disperkit
