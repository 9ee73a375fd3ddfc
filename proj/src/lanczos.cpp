#include <cmath>
#include <random>

#include "neelgap/spectra.hpp"

namespace neelgap {

LanczosResult lanczos_ground(const SparseMatrix& H, LanczosOptions options) {
  const Eigen::Index n = H.rows();
  if (n == 0) throw DomainError("empty matrix");
  LanczosResult out;
  if (n == 1) {
    out.energy = H.coeff(0, 0).real();
    out.vector = DenseVector::Ones(1);
    out.converged = true;
    return out;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  DenseVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
  v.normalize();

  const int kmax = static_cast<int>(std::min<Eigen::Index>(options.max_iterations, n));
  DenseMatrix Q(n, kmax);
  std::vector<double> alpha, beta;
  Q.col(0) = v;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kmax; ++k) {
    DenseVector w = H * Q.col(k);
    const double a = Q.col(k).dot(w).real();
    alpha.push_back(a);
    w -= a * Q.col(k);
    if (k > 0) w -= beta.back() * Q.col(k - 1);
    // two passes of full reorthogonalisation
    for (int pass = 0; pass < 2; ++pass) {
      const DenseVector proj = Q.leftCols(k + 1).adjoint() * w;
      w -= Q.leftCols(k + 1) * proj;
    }
    const double b = w.norm();

    const int m = k + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
    const double e = tri.eigenvalues()(0);
    const double residual = b * std::abs(tri.eigenvectors()(m - 1, 0));
    out.iterations = m;
    const bool done = residual < options.tolerance * std::max(1.0, std::abs(e)) ||
                      (std::abs(e - previous) < options.tolerance * 1e-2 && residual < 1e-8) || b < 1e-14 ||
                      m == kmax;
    previous = e;
    if (done) {
      out.energy = e;
      out.vector = Q.leftCols(m) * tri.eigenvectors().col(0).cast<cplx>();
      out.vector.normalize();
      out.converged = residual < std::max(options.tolerance * std::max(1.0, std::abs(e)), 1e-10) || b < 1e-14;
      return out;
    }
    beta.push_back(b);
    Q.col(k + 1) = w / b;
  }
  return out;
}

}  // namespace neelgap
