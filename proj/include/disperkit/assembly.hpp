#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <fstream>
#include <vector>

#include "disperkit/mesh.hpp"
#include "disperkit/quadrature.hpp"

namespace disperkit {

using SpMat = Eigen::SparseMatrix<double>;
using cxd = std::complex<double>;

struct Scales {
  double a = 1.0;    // characteristic length (m)
  double c_T = 1.0;  // characteristic velocity (m/s)
};

// Dimensionless SAFE matrix family: K(k) = K1 + i k K2 + k^2 K3 against M,
// with eigenvalues lambda = (omega a / c_T)^2 at dimensionless k = (wavenumber a).
struct SafeMatrices {
  SpMat K1, K2, K3, M;
  int n = 0;
  Scales scales;
};

namespace detail {

// Accumulates element kernels. Voigt strain order [xx, yy, zz, yz, xz, xy];
// dof order (ux, uy, uz) per node. epsilon = (B0 + i k B1) q.
struct ElementKernels {
  Eigen::MatrixXd k1, k2, k3, m;
};

inline void accumulate_point(const Eigen::MatrixXd& b0, const Eigen::MatrixXd& b1,
                             const Eigen::MatrixXd& nmat, const Mat6& c, double rho,
                             double w, ElementKernels& out) {
  out.k1.noalias() += w * b0.transpose() * c * b0;
  out.k3.noalias() += w * b1.transpose() * c * b1;
  out.k2.noalias() += w * b0.transpose() * c * b1;  // skew part taken once per element
  out.m.noalias() += (w * rho) * nmat.transpose() * nmat;
}

inline ElementKernels line_gll_kernels(const CrossSectionMesh& mesh, const Element& el,
                                       const Mat6& c, double rho, size_t eidx) {
  int nn = static_cast<int>(el.nodes.size());
  int order = nn - 1;
  int ndof = 3 * nn;
  QuadratureRule gll = gll_rule(order);
  Eigen::MatrixXd d = lagrange_derivative_matrix(gll.points);

  double z0 = mesh.nodes[el.nodes.front()].y();
  double z1 = mesh.nodes[el.nodes.back()].y();
  double jac = 0.5 * (z1 - z0);
  if (!(jac > 0.0))
    throw std::runtime_error("assemble: element " + std::to_string(eidx) +
                             " has non-positive Jacobian");

  ElementKernels out{Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof),
                     Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof)};
  Eigen::MatrixXd b0(6, ndof), b1(6, ndof), nmat(3, ndof);
  for (int q = 0; q < nn; ++q) {
    b0.setZero();
    b1.setZero();
    nmat.setZero();
    for (int a = 0; a < nn; ++a) {
      double nv = (a == q) ? 1.0 : 0.0;  // collocated GLL quadrature
      double dz = d(q, a) / jac;
      b0(2, 3 * a + 2) = dz;  // e_zz = duz/dz
      b0(3, 3 * a + 1) = dz;  // g_yz = duy/dz
      b0(4, 3 * a + 0) = dz;  // g_xz += dux/dz
      b1(0, 3 * a + 0) = nv;  // e_xx = ik ux
      b1(4, 3 * a + 2) = nv;  // g_xz += ik uz
      b1(5, 3 * a + 1) = nv;  // g_xy = ik uy
      nmat(0, 3 * a + 0) = nv;
      nmat(1, 3 * a + 1) = nv;
      nmat(2, 3 * a + 2) = nv;
    }
    accumulate_point(b0, b1, nmat, c, rho, gll.weights(q) * jac, out);
  }
  return out;
}

inline ElementKernels quad9_kernels(const CrossSectionMesh& mesh, const Element& el,
                                    const Mat6& c, double rho, int quad_n, size_t eidx) {
  int ndof = 27;
  QuadratureRule g = gauss_rule(quad_n);
  ElementKernels out{Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof),
                     Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof)};
  Eigen::MatrixXd b0(6, ndof), b1(6, ndof), nmat(3, ndof);
  double nv[9], dxi[9], deta[9];
  for (int qa = 0; qa < quad_n; ++qa) {
    for (int qb = 0; qb < quad_n; ++qb) {
      quad9::shape(g.points(qa), g.points(qb), nv, dxi, deta);
      Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();  // d(y,z)/d(xi,eta)
      for (int a = 0; a < 9; ++a) {
        const Eigen::Vector2d& p = mesh.nodes[el.nodes[a]];
        jac(0, 0) += dxi[a] * p.x();
        jac(0, 1) += deta[a] * p.x();
        jac(1, 0) += dxi[a] * p.y();
        jac(1, 1) += deta[a] * p.y();
      }
      double det = jac.determinant();
      if (!(det > 0.0))
        throw std::runtime_error("assemble: element " + std::to_string(eidx) +
                                 " has non-positive Jacobian");
      Eigen::Matrix2d inv = jac.inverse();
      b0.setZero();
      b1.setZero();
      nmat.setZero();
      for (int a = 0; a < 9; ++a) {
        double dy = inv(0, 0) * dxi[a] + inv(1, 0) * deta[a];
        double dz = inv(0, 1) * dxi[a] + inv(1, 1) * deta[a];
        b0(1, 3 * a + 1) = dy;  // e_yy
        b0(2, 3 * a + 2) = dz;  // e_zz
        b0(3, 3 * a + 1) = dz;  // g_yz = duy/dz + duz/dy
        b0(3, 3 * a + 2) = dy;
        b0(4, 3 * a + 0) = dz;  // g_xz += dux/dz
        b0(5, 3 * a + 0) = dy;  // g_xy += dux/dy
        b1(0, 3 * a + 0) = nv[a];
        b1(4, 3 * a + 2) = nv[a];
        b1(5, 3 * a + 1) = nv[a];
        nmat(0, 3 * a + 0) = nv[a];
        nmat(1, 3 * a + 1) = nv[a];
        nmat(2, 3 * a + 2) = nv[a];
      }
      accumulate_point(b0, b1, nmat, c, rho, g.weights(qa) * g.weights(qb) * det, out);
    }
  }
  return out;
}

}  // namespace detail

// Assembles the dimensionless SAFE family. Stiffnesses are scaled by
// 1/(rho_ref c_T^2) and densities by 1/rho_ref where rho_ref is the first
// material's density; mesh coordinates are already normalized by a.
inline SafeMatrices assemble(const CrossSectionMesh& mesh, const Scales& scales,
                             int quad9_order = 3) {
  mesh.validate();
  if (mesh.materials.empty()) throw std::invalid_argument("assemble: mesh has no materials");
  double rho_ref = mesh.materials.front().density;
  double c_scale = 1.0 / (rho_ref * scales.c_T * scales.c_T);

  int n = mesh.dof_count();
  std::vector<Eigen::Triplet<double>> t1, t2, t3, tm;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    Mat6 c = mesh.materials[el.material].stiffness * c_scale;
    double rho = mesh.materials[el.material].density / rho_ref;
    detail::ElementKernels ker =
        el.kind == ElementKind::LineGLL
            ? detail::line_gll_kernels(mesh, el, c, rho, e)
            : detail::quad9_kernels(mesh, el, c, rho, quad9_order, e);
    // exact symmetry/skewness at the element level carries to the global matrices
    Eigen::MatrixXd k1 = 0.5 * (ker.k1 + ker.k1.transpose());
    Eigen::MatrixXd k3 = 0.5 * (ker.k3 + ker.k3.transpose());
    Eigen::MatrixXd k2 = ker.k2 - ker.k2.transpose().eval();
    Eigen::MatrixXd m = 0.5 * (ker.m + ker.m.transpose());
    int nn = static_cast<int>(el.nodes.size());
    for (int a = 0; a < nn; ++a) {
      for (int b = 0; b < nn; ++b) {
        for (int da = 0; da < 3; ++da) {
          for (int db = 0; db < 3; ++db) {
            int i = 3 * el.nodes[a] + da, j = 3 * el.nodes[b] + db;
            int li = 3 * a + da, lj = 3 * b + db;
            if (k1(li, lj) != 0.0) t1.emplace_back(i, j, k1(li, lj));
            if (k2(li, lj) != 0.0) t2.emplace_back(i, j, k2(li, lj));
            if (k3(li, lj) != 0.0) t3.emplace_back(i, j, k3(li, lj));
            if (m(li, lj) != 0.0) tm.emplace_back(i, j, m(li, lj));
          }
        }
      }
    }
  }
  SafeMatrices out;
  out.n = n;
  out.scales = scales;
  out.K1.resize(n, n);
  out.K2.resize(n, n);
  out.K3.resize(n, n);
  out.M.resize(n, n);
  out.K1.setFromTriplets(t1.begin(), t1.end());
  out.K2.setFromTriplets(t2.begin(), t2.end());
  out.K3.setFromTriplets(t3.begin(), t3.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  return out;
}

// K(k) = K1 + i k K2 + k^2 K3, Hermitian by construction.
inline Eigen::MatrixXcd stiffness_at(const SafeMatrices& m, double k) {
  Eigen::MatrixXd re = Eigen::MatrixXd(m.K1) + (k * k) * Eigen::MatrixXd(m.K3);
  Eigen::MatrixXd im = k * Eigen::MatrixXd(m.K2);
  Eigen::MatrixXcd out(m.n, m.n);
  out.real() = re;
  out.imag() = im;
  return out;
}

// K'(k) = i K2 + 2 k K3.
inline Eigen::MatrixXcd stiffness_derivative_at(const SafeMatrices& m, double k) {
  Eigen::MatrixXd re = (2.0 * k) * Eigen::MatrixXd(m.K3);
  Eigen::MatrixXd im = Eigen::MatrixXd(m.K2);
  Eigen::MatrixXcd out(m.n, m.n);
  out.real() = re;
  out.imag() = im;
  return out;
}

// Debug export: one `i j value` line per stored entry.
inline void write_triplets(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_triplets: cannot open " + path);
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      out << it.row() << " " << it.col() << " " << detail::format_double(it.value()) << "\n";
}

}  // namespace disperkit
