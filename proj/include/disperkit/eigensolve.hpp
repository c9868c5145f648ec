#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <mutex>
#include <numeric>
#include <vector>

#include "disperkit/assembly.hpp"

#if defined(DISPERKIT_USE_LAPACKE)
#define LAPACK_COMPLEX_CPP
#include <complex>
#include <lapacke.h>
#endif

#if defined(DISPERKIT_USE_LAPACKE)
extern "C" void openblas_set_num_threads(int);
#endif

namespace disperkit {

// Dense Hermitian eigendecomposition, eigenvalues ascending.
inline void hermitian_eig(Eigen::MatrixXcd& a, Eigen::VectorXd& evals) {
  int n = static_cast<int>(a.rows());
  evals.resize(n);
#if defined(DISPERKIT_USE_LAPACKE)
  // one BLAS thread per solve: parallelism lives at the wavenumber level and
  // results stay bit-reproducible
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
  lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'V', 'L', n,
                                  reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                  evals.data());
  if (info != 0)
    throw std::runtime_error("hermitian_eig: zheev failed with info " + std::to_string(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  evals = es.eigenvalues();
  a = es.eigenvectors();
#endif
}

// All eigenpairs retained at one wavenumber. Columns of `vectors` are
// M-orthonormal; `objects` partitions the retained indices into singletons and
// degenerate clusters (contiguous in the eigenvalue ordering).
struct ModeSet {
  double k = 0.0;
  Eigen::VectorXd lambdas;   // ascending
  Eigen::MatrixXcd vectors;  // n x M
  std::vector<std::vector<int>> objects;

  int mode_count() const { return static_cast<int>(lambdas.size()); }
  double omega(int i) const { return std::sqrt(std::max(lambdas(i), 0.0)); }

  Eigen::MatrixXcd object_basis(const std::vector<int>& obj) const {
    Eigen::MatrixXcd b(vectors.rows(), obj.size());
    for (size_t c = 0; c < obj.size(); ++c) b.col(c) = vectors.col(obj[c]);
    return b;
  }

  void reset_singletons() {
    objects.clear();
    for (int i = 0; i < mode_count(); ++i) objects.push_back({i});
  }
};

// Deterministic pointwise phase convention: the largest-magnitude entry of each
// column is made real and positive. MAC values are unaffected.
inline void fix_phase(ModeSet& set) {
  for (int c = 0; c < set.vectors.cols(); ++c) {
    int imax = 0;
    double best = 0.0;
    for (int r = 0; r < set.vectors.rows(); ++r) {
      double m = std::norm(set.vectors(r, c));
      if (m > best) {
        best = m;
        imax = r;
      }
    }
    cxd v = set.vectors(imax, c);
    double mag = std::abs(v);
    if (mag > 0.0) set.vectors.col(c) *= std::conj(v) / mag;
  }
}

// Generalized Hermitian solver with the M-reduction precomputed once:
// M = L L^T, A_i = L^-1 K_i L^-T, so each wavenumber costs one dense
// Hermitian eigensolve plus a triangular back-substitution.
class ModeSolver {
 public:
  explicit ModeSolver(const SafeMatrices& m) : m_(&m) {
    Eigen::MatrixXd mass(m.M);
    llt_.compute(mass);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("solve_modes: mass matrix is not positive definite");
    a1_ = reduce(Eigen::MatrixXd(m.K1));
    a2_ = reduce(Eigen::MatrixXd(m.K2));
    a3_ = reduce(Eigen::MatrixXd(m.K3));
    a1_ = 0.5 * (a1_ + a1_.transpose()).eval();
    a3_ = 0.5 * (a3_ + a3_.transpose()).eval();
    a2_ = 0.5 * (a2_ - a2_.transpose()).eval();
    upper_c_ = Eigen::MatrixXd(llt_.matrixU()).cast<cxd>();
    shift_ = 1e-12 * Eigen::MatrixXd(m.K1).trace() / m.n;
  }

  const SafeMatrices& matrices() const { return *m_; }

  // Retains every mode with omega <= omega_max.
  ModeSet solve(double k, double omega_max) const {
    if (!std::isfinite(k) || k < 0.0)
      throw std::invalid_argument("solve_modes: k must be finite and nonnegative");
    int n = m_->n;
    Eigen::MatrixXcd a(n, n);
    a.real() = a1_ + (k * k) * a3_;
    a.imag() = k * a2_;
    a.diagonal().array() += shift_;  // keeps rigid modes visible as near-zero branches
    Eigen::VectorXd evals;
    hermitian_eig(a, evals);

    double lam_max = omega_max * omega_max;
    int retained = 0;
    while (retained < n && evals(retained) <= lam_max) ++retained;
    if (retained == 0 && n > 0) retained = 1;  // never return an empty window

    ModeSet set;
    set.k = k;
    set.lambdas = evals.head(retained);
    // back-transform and re-orthonormalize in the M inner product
    Eigen::MatrixXcd q = a.leftCols(retained);
    upper_c_.triangularView<Eigen::Upper>().solveInPlace(q);
    Eigen::MatrixXcd g = q.adjoint() * (m_->M * q).eval();
    Eigen::LLT<Eigen::MatrixXcd> gllt(g);
    if (gllt.info() != Eigen::Success)
      throw std::runtime_error("solve_modes: re-orthonormalization failed at k=" +
                               std::to_string(k));
    Eigen::MatrixXcd qh = q.adjoint();
    gllt.matrixL().solveInPlace(qh);
    set.vectors = qh.adjoint();
    fix_phase(set);
    set.reset_singletons();
    return set;
  }

 private:
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& kmat) const {
    Eigen::MatrixXd x = kmat;
    llt_.matrixL().solveInPlace(x);
    Eigen::MatrixXd xt = x.transpose();
    llt_.matrixL().solveInPlace(xt);
    return xt.transpose();
  }

  const SafeMatrices* m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd a1_, a2_, a3_;
  Eigen::MatrixXcd upper_c_;
  double shift_ = 0.0;
};

inline ModeSet solve_modes(const SafeMatrices& m, double k, double omega_max) {
  return ModeSolver(m).solve(k, omega_max);
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline double relative_gap(double li, double lj, double floor_val) {
  return std::abs(li - lj) / std::max({std::abs(li), std::abs(lj), floor_val});
}

}  // namespace detail

// Merges modes into degenerate clusters when the relative eigenvalue gap is
// below eps_eig AND the K' coupling is negligible (symmetry protection).
// Near-degenerate veering pairs have significant coupling and stay separate.
inline ModeSet cluster_degenerate(const ModeSet& set, const Eigen::MatrixXcd& kprime,
                                  double eps_eig, double coupling_tol) {
  ModeSet out = set;
  int m = set.mode_count();
  out.objects.clear();
  if (m == 0) return out;
  double kp_norm = kprime.norm();
  double floor_val = 1e-9 * std::max(1.0, set.lambdas.cwiseAbs().maxCoeff());
  detail::UnionFind uf(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (detail::relative_gap(set.lambdas(i), set.lambdas(j), floor_val) > eps_eig) break;
      cxd c = set.vectors.col(i).adjoint() * kprime * set.vectors.col(j);
      if (std::abs(c) < coupling_tol * kp_norm) uf.unite(i, j);
    }
  }
  std::vector<std::vector<int>> groups(m);
  for (int i = 0; i < m; ++i) groups[uf.find(i)].push_back(i);
  for (auto& g : groups)
    if (!g.empty()) out.objects.push_back(std::move(g));
  return out;
}

}  // namespace disperkit
