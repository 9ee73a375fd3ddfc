#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "doctest.h"
#include "neelgap/thermal.hpp"

using namespace neelgap;

namespace {

Lattice make(int d, int L, double S = 0.5) { return build_lattice(LatticeSpec{d, L, Spin::from_double(S)}); }

// (1/Z) int_0^1 Tr[X^dag e^{-s beta H} Y e^{-(1-s) beta H}] ds by composite Simpson on matrix exponentials
cplx duhamel_by_quadrature(const DenseMatrix& H, double beta, const DenseMatrix& X, const DenseMatrix& Y, int n) {
  const Eigen::MatrixXd Hr = H.real();
  const double shift = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Hr).eigenvalues()(0);
  const Eigen::MatrixXd Hs = Hr - shift * Eigen::MatrixXd::Identity(Hr.rows(), Hr.cols());
  const double Z = (-beta * Hs).exp().trace();
  const double h = 1.0 / n;
  const Eigen::MatrixXd step = (-h * beta * Hs).exp();
  std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(n) + 1);
  powers[0] = Eigen::MatrixXd::Identity(Hr.rows(), Hr.cols());
  for (int k = 1; k <= n; ++k) powers[k] = powers[k - 1] * step;
  const DenseMatrix Xd = X.adjoint();
  cplx total{0.0, 0.0};
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const DenseMatrix left = powers[k].cast<cplx>();
    const DenseMatrix right = powers[n - k].cast<cplx>();
    total += w * (Xd * left * Y * right).trace();
  }
  return total * h / 3.0 / Z;
}

}  // namespace

TEST_CASE("Gibbs weights and log partition function") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  const auto es = diagonalize_by_sector(f, 0.3);
  for (double beta : {0.5, 1.0, 5.0, 200.0}) {
    const auto g = gibbs_state(es, beta, 0.3);
    CHECK(g.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    const Eigen::MatrixXd H = DenseMatrix(f.hamiltonian(0.3).matrix).real();
    if (beta < 10.0) CHECK(g.log_Z == doctest::Approx(std::log((-beta * H).exp().trace())).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gibbs_state(es, 0.0, 0.3), DomainError);
}

TEST_CASE("free energy and entropy") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  const auto es = diagonalize_by_sector(f, 0.2);
  const double beta = 1.3;
  const auto g = gibbs_state(es, beta, 0.2);
  const auto fe = free_energy_entropy(g);
  const double U = thermal_expectation(g, f.hamiltonian(0.2)).real();
  CHECK(fe.F == doctest::Approx(-g.log_Z / beta).epsilon(1e-12));
  CHECK(fe.F == doctest::Approx(U - fe.entropy / beta).epsilon(1e-12));
  // dF/dT = -S through a central difference in beta
  const double h = 1e-4;
  const double Fp = free_energy_entropy(gibbs_state(es, beta + h, 0.2)).F;
  const double Fm = free_energy_entropy(gibbs_state(es, beta - h, 0.2)).F;
  const double dF_dbeta = (Fp - Fm) / (2 * h);
  CHECK(fe.entropy == doctest::Approx(beta * beta * dF_dbeta).epsilon(1e-6));
}

TEST_CASE("Gibbs variational principle over product trial states") {
  const auto lat = make(2, 1);
  const OperatorFactory f(lat);
  const auto g = gibbs_state(diagonalize_by_sector(f, 0.5), 1.0, 0.5);
  std::mt19937_64 rng(11);
  std::vector<DenseMatrix> trials;
  for (int k = 0; k < 20; ++k) trials.push_back(random_product_density(f.space(), rng));
  trials.push_back(g.density());
  const auto r = gibbs_variational_check(g, trials);
  CHECK(r.pass);
  CHECK(r.slack == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("Duhamel inner product against quadrature") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  const double B = 0.4;
  const auto g = gibbs_state(diagonalize_by_sector(f, B), 2.0, B);
  const DenseMatrix H(f.hamiltonian(B).matrix);
  const auto p = momentum_at(lat, {1});
  const auto X = f.fourier_spin(p, 2);
  const auto Y = f.fourier_spin(p, 2);
  const cplx oracle = duhamel_by_quadrature(H, 2.0, DenseMatrix(X.matrix), DenseMatrix(Y.matrix), 2000);
  CHECK(std::abs(duhamel_pair(g, X, Y) - oracle) < 1e-9);
  CHECK(duhamel_inner(g, X) == doctest::Approx(oracle.real()).epsilon(1e-9));
}

TEST_CASE("Duhamel of a conserved quantity is the plain expectation") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  const auto g = gibbs_state(diagonalize_by_sector(f, 0.0), 1.0, 0.0);
  const auto Sz = f.total_spin(3);
  CHECK(duhamel_inner(g, Sz) == doctest::Approx(thermal_expectation(g, product(Sz, Sz, "Sz^2")).real()).epsilon(1e-12));
}

TEST_CASE("Bogoliubov chain holds") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  const double B = 0.3;
  const auto g = gibbs_state(diagonalize_by_sector(f, B), 1.0, B);
  const auto C = f.total_spin(1);
  const auto A = f.staggered_sy(region(lat, 1));
  const auto r = bogoliubov_chain(g, f.hamiltonian(B), C, A);
  CHECK(r.all_pass());
}

TEST_CASE("structure factor bounds on the four-site ring") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  for (double B : {0.0, 0.3}) {
    const auto es = diagonalize_by_sector(f, B);
    for (double beta : {0.5, 1.0, 5.0}) {
      const auto g = gibbs_state(es, beta, B);
      for (const auto& p : momentum_grid(lat).points) {
        const auto s = structure_quantities(g, f, p);
        CHECK(s.all_pass());
        CHECK(s.b <= s.g + 1e-12);
        CHECK(s.corr == doctest::Approx(s.corr_reverse).epsilon(1e-10));
      }
    }
    const auto gs = ground_sector(es);
    for (const auto& p : momentum_grid(lat).points) CHECK(zero_temperature_structure(gs, f, B, p).all_pass());
  }
}

TEST_CASE("Plancherel reconstruction") {
  const auto lat = make(2, 1);
  const OperatorFactory f(lat);
  const auto es = diagonalize_by_sector(f, 0.2);
  const auto g = gibbs_state(es, 0.7, 0.2);
  const auto gs = ground_sector(es);
  for (std::size_t y = 0; y < lat.num_sites(); ++y) {
    CHECK(plancherel_check(thermal_functional(g), f, 0, y).pass);
    CHECK(plancherel_check(ground_functional(gs), f, 0, y).pass);
  }
}

TEST_CASE("two-site magnetization curve") {
  const auto lat = make(1, 1);
  const OperatorFactory f(lat);
  const std::vector<double> grid{0.1, 0.5, 1.0, 2.0};
  const auto curve = magnetization_curve(f, std::nullopt, grid);
  for (const auto& pt : curve) {
    CHECK(pt.m == doctest::Approx(pt.B / (2.0 * std::sqrt(0.25 + pt.B * pt.B))).epsilon(1e-10));
  }
  CHECK_THROWS_AS(magnetization_curve(f, 1.0, {0.5, 0.1}), DomainError);
}
