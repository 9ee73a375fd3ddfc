#include <cmath>
#include <random>

#include "doctest.h"
#include "neelgap/verifier.hpp"

using namespace neelgap;

namespace {

Lattice make(int d, int L, double S = 0.5) { return build_lattice(LatticeSpec{d, L, Spin::from_double(S)}); }

}  // namespace

TEST_CASE("variational magnetization") {
  const auto lat = make(1, 2);
  const OperatorFactory f(lat);
  std::mt19937_64 rng(3);
  auto trials = haar_trials(static_cast<Eigen::Index>(f.space().dimension()), 10, rng);
  const auto gp = solve_ground(f, 0.5, {});
  trials.push_back(pure_density(gp.gs.vectors.col(0)));
  const auto r = check_variational_magnetization(lat, 0.5, trials);
  CHECK(r.all_pass());
  CHECK_THROWS_AS(check_variational_magnetization(lat, 0.0, trials), DomainError);
}

TEST_CASE("KLS chain and every intermediate step") {
  for (auto [d, L] : {std::pair{1, 2}, {1, 3}, {2, 1}}) {
    const auto lat = make(d, L);
    for (double B : {0.05, 0.5}) {
      for (double eps : {0.0, 0.1, 0.25}) {
        const auto r = check_kls(lat, B, 1, eps);
        CHECK(r.all_pass());
        CHECK(r.steps.size() >= 10);
      }
    }
  }
}

TEST_CASE("KLS at B = 0 has a vanishing left-hand side") {
  const auto r = check_kls(make(1, 2), 0.0, 1, 0.1);
  CHECK(r.lhs < 1e-20);
  CHECK(r.pass);
}

TEST_CASE("susceptibility bound and second-order formula") {
  const auto lat = make(1, 3);
  const auto r = check_susceptibility_bound(lat, 0.3, ramp_field(lat, 1).values);
  CHECK(r.all_pass());
  std::vector<double> zero(lat.num_sites(), 0.0);
  const auto z = check_susceptibility_bound(lat, 0.3, zero);
  CHECK(z.lhs == doctest::Approx(0.0));
  CHECK(std::find(z.flags.begin(), z.flags.end(), "zero-field-f") != z.flags.end());
}

TEST_CASE("reflection-positivity energy bound") {
  const auto lat = make(2, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<double>> fs(30, std::vector<double>(lat.num_sites()));
  for (auto& v : fs)
    for (auto& x : v) x = u(rng);
  CHECK(check_rp_energy(lat, 0.2, fs).all_pass());
}

TEST_CASE("commutator identity measures c = 2 x degree") {
  const auto r = check_commutator_identity(make(1, 3), 1, 0.4);
  CHECK(r.all_pass());
  // c multiplies (i/|Omega_R|) O, so it comes out real
  CHECK(r.intermediates.at("c_re") == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.intermediates.at("c_im") == doctest::Approx(0.0).epsilon(1e-12));
  // side 2: each site has a single distinct neighbour
  const auto two = check_commutator_identity(make(1, 1), 1, 0.4);
  CHECK(two.intermediates.at("c_re") == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("negative control: tilted bond axis breaks the commutator identity") {
  VerifierOptions opts;
  opts.operators.inject_defect = true;
  const auto r = check_commutator_identity(make(1, 3), 1, 0.4, opts);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("double commutator on two-site clusters") {
  const Spin half{1};
  const std::vector<int> Rs{2, 4, 8};
  const auto r = check_double_commutator_scaling(1, Rs, half, -1.0, 0.15);
  CHECK(r.first_order.pass);
  CHECK(r.plateau.pass);
  CHECK(r.decomposition.pass);
  CHECK(r.plateau.intermediates.at("bonds") > 0);

  // oracle: [[aX + bY, S.S], aX + bY] = (a - b)^2 [[X, S.S], X]; k = ||[[X, S.S], X]|| for spin 1/2
  const auto sm = spin_matrices(half);
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  auto kron = [](const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return out;
  };
  const DenseMatrix X = kron(sm.s1, id);
  const DenseMatrix SS = kron(sm.s1, sm.s1) + kron(sm.s2, sm.s2) + kron(sm.s3, sm.s3);
  const DenseMatrix XS = X * SS - SS * X;
  const double k = operator_norm(DenseMatrix(XS * X - X * XS));
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    const int R = Rs[i];
    // f on a line: 1 up to R+1, linear to 0 at 2R+1; c_z = 2 f_z + f_{z-1} + f_{z+1}
    auto fl = [R](int x) {
      const int a = std::abs(x);
      if (a <= R + 1) return 1.0;
      if (a <= 2 * R) return 1.0 - static_cast<double>(a - (R + 1)) / R;
      return 0.0;
    };
    auto c = [&](int z) { return 2.0 * fl(z) + fl(z - 1) + fl(z + 1); };
    double expected = 0.0;
    for (int x = -2 * R - 1; x < 2 * R + 1; ++x) expected += k * std::pow(c(x) - c(x + 1), 2);
    CHECK(r.scaling.values[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(check_double_commutator_scaling(1, {4}, half, -1.0, 0.15), DomainError);
}

TEST_CASE("trial state chain") {
  for (auto [d, L] : {std::pair{1, 2}, {1, 3}, {2, 1}}) {
    const auto t = check_trial_state(make(d, L), 0.3, 1, 0.1, CutoffParams{});
    CHECK(t.all_pass());
    REQUIRE(t.ratio.has_value());
    CHECK(*t.ratio > 0.0);
  }
  CHECK_THROWS_AS(check_trial_state(make(1, 2), 0.3, 1, 0.0, CutoffParams{}), DomainError);
}

TEST_CASE("spectral windows") {
  const auto w = check_spectral_windows(make(1, 3), 0.2, 1, 0.1, WindowSpec{});
  CHECK(w.all_pass());
  CHECK(w.gap > 0.0);
  CHECK(w.w1 + w.w2 + w.w3 == doctest::Approx(w.total).epsilon(1e-10));
  CHECK_THROWS_AS(check_spectral_windows(make(1, 3), 0.2, 1, 0.1, WindowSpec{0.6, 0.5}), DomainError);
}

TEST_CASE("transverse decay at finite and zero temperature") {
  const auto lat = make(1, 3);
  for (auto beta : {std::optional<double>{1.0}, std::optional<double>{}}) {
    const auto r = check_transverse_decay(lat, beta, 0.3, {1, 2});
    CHECK(r.all_pass());
    CHECK(r.K_measured.size() == 2);
    CHECK(r.correlations.size() == lat.num_sites());
    CHECK(r.structure.size() == lat.num_sites());
  }
}

TEST_CASE("solve_ground falls back to the full basis when S3 is not conserved") {
  const auto lat = make(1, 2);
  OperatorOptions o;
  o.inject_defect = true;
  const OperatorFactory f(lat, o);
  const auto gp = solve_ground(f, 0.2, {});
  CHECK_FALSE(gp.sector_blocked);
  CHECK(gp.es.size() == 16);
}
