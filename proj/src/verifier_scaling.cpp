#include <algorithm>
#include <cmath>
#include <limits>

#include "neelgap/verifier.hpp"

namespace neelgap {

namespace {

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DenseMatrix comm(const DenseMatrix& a, const DenseMatrix& b) { return a * b - b * a; }

}  // namespace

DoubleCommutatorReport check_double_commutator_scaling(int d, const std::vector<int>& R_values, Spin spin,
                                                      double predicted_exponent, double exponent_tolerance) {
  if (R_values.size() < 2) throw DomainError("double-commutator scaling needs at least two R values");
  const auto sm = spin_matrices(spin);
  const Eigen::Index k = spin.local_dim();
  const DenseMatrix id = DenseMatrix::Identity(k, k);
  const DenseMatrix X1 = kron(sm.s1, id);
  const DenseMatrix Y1 = kron(id, sm.s1);
  const DenseMatrix T = X1 + Y1;
  const DenseMatrix SS = kron(sm.s1, sm.s1) + kron(sm.s2, sm.s2) + kron(sm.s3, sm.s3);

  DoubleCommutatorReport out;
  out.scaling.name = "double-commutator-sum";
  out.scaling.predicted_exponent = predicted_exponent;
  out.scaling.exponent_tolerance = exponent_tolerance;
  double worst_cross = 0.0, worst_plateau = 0.0, worst_split = 0.0, scale = 1.0;
  int plateau_bonds = 0;
  double plateau_single = 0.0;  // ||[H1', S_x.S_y]|| on plateau bonds, recorded

  for (int R : R_values) {
    if (R < 1) throw DomainError("R must be positive");
    // L = 2R + 2 keeps Omega_{2R+1} strictly inside the box; no Hilbert space is built
    const Lattice lattice(LatticeSpec{d, 2 * R + 2, spin}, LatticeLimits{std::nullopt});
    const auto f = ramp_field(lattice, R).values;
    auto weight = [&](std::size_t z) {
      double c = 0.0;
      for (std::size_t w : lattice.neighbours(z)) c += f[z] + f[w];
      return c;
    };
    auto spread = [&](std::size_t z) {
      double c = 0.0;
      for (std::size_t w : lattice.neighbours(z)) c += f[w] - f[z];
      return c;
    };
    double total = 0.0, largest = 0.0;
    for (const auto& bond : lattice.bonds()) {
      if (lattice.sup_norm(bond.a) > 2 * R + 1 || lattice.sup_norm(bond.b) > 2 * R + 1) continue;
      // on the two-site cluster H1' reduces to c_x S1_x + c_y S1_y
      const double cx = weight(bond.a), cy = weight(bond.b);
      const DenseMatrix H1 = cx * X1 + cy * Y1;
      const DenseMatrix dc = comm(comm(H1, SS), H1);
      const double norm = operator_norm(dc);
      total += norm;
      largest = std::max(largest, norm);
      scale = std::max(scale, norm);

      const double two_deg_fx = 2.0 * static_cast<double>(lattice.neighbours(bond.a).size()) * f[bond.a];
      const DenseMatrix delta = (cx - two_deg_fx) * X1 + (cy - two_deg_fx) * Y1;
      worst_cross = std::max(worst_cross, operator_norm(DenseMatrix(comm(comm(delta, SS), T))));
      worst_split = std::max(worst_split, operator_norm(DenseMatrix(dc - comm(comm(delta, SS), delta))));
      bool flat = f[bond.a] == f[bond.b] && spread(bond.a) == 0.0 && spread(bond.b) == 0.0;
      if (flat) {
        ++plateau_bonds;
        worst_plateau = std::max(worst_plateau, norm);
        plateau_single = std::max(plateau_single, operator_norm(DenseMatrix(comm(H1, SS))));
      }
    }
    out.scaling.R_values.push_back(R);
    out.scaling.values.push_back(total);
    out.max_bond_norm.push_back(largest);
    out.max_bond_norm_times_R2.push_back(largest * R * R);
  }
  out.scaling.fit();
  out.first_order = make_inequality("cross-term", "[[Delta, S.S], S1_x + S1_y] = 0", worst_cross, 0.0, 1e-12 * scale);
  out.plateau = make_inequality("plateau", "constant f near the bond gives a vanishing double commutator",
                                worst_plateau, 0.0, 1e-12 * scale);
  out.plateau.intermediates["bonds"] = plateau_bonds;
  out.plateau.intermediates["single_commutator"] = plateau_single;
  out.decomposition = make_inequality("delta-split", "[[H1', S.S], H1'] = [[Delta, S.S], Delta]", worst_split, 0.0,
                                      1e-12 * scale);
  return out;
}

bool TransverseDecayReport::all_pass() const {
  const bool b = std::all_of(bounds.begin(), bounds.end(), [](const InequalityReport& r) { return r.all_pass(); });
  const bool s = std::all_of(structure.begin(), structure.end(), [](const StructureReport& r) { return r.all_pass(); });
  return b && s && (!scaling || !scaling->pass || *scaling->pass);
}

TransverseDecayReport check_transverse_decay(const Lattice& lattice, std::optional<double> beta, double B,
                                             const std::vector<int>& R_values, const VerifierOptions& options) {
  if (R_values.empty()) throw DomainError("no R values given");
  if (beta && !(*beta > 0.0)) throw DomainError("beta must be positive");
  const OperatorFactory factory(lattice, options.operators);
  const auto gp = solve_ground(factory, B, options);
  const auto H = factory.hamiltonian(B);
  const int d = lattice.dim();
  const double tol = options.tolerance;

  TransverseDecayReport out;
  out.beta = beta;
  out.B = B;
  if (!gp.sector_blocked) out.flags.push_back("sector-conservation-broken");
  std::optional<GibbsState> gibbs;
  if (beta) gibbs = gibbs_state(gp.es, *beta, B);
  const Expectation expect = beta ? thermal_functional(*gibbs) : ground_functional(gp.gs);

  std::vector<double> used_R;
  for (int R : R_values) {
    if (options.allow_clip && R > lattice.half_side()) {
      throw DomainError("R=" + std::to_string(R) + " exceeds the half side");
    }
    const auto reg = region(lattice, R, options.allow_clip);
    const auto ramp = ramp_field(lattice, R, options.allow_clip);
    const auto A = factory.staggered_sy(reg);
    const auto O_R = factory.order_parameter(&reg);
    const double size = static_cast<double>(reg.sites.size());
    const double m_s = expect(O_R).real() / size;
    const double a2 = expect(product(A, A, "A^2")).real();
    const double Rm = static_cast<double>(R);

    InequalityReport r;
    double K = 0.0;
    if (beta) {
      OperatorSum cs;
      for (std::size_t x = 0; x < lattice.num_sites(); ++x) {
        if (ramp.values[x] != 0.0) cs.add(ramp.values[x], x, factory.spins().s1);
      }
      const auto C = factory.assemble(cs, BasisTag::full(), "sum f S1");
      auto chain = bogoliubov_chain(*gibbs, H, C, A, tol);
      const double dc = chain.intermediates["double_commutator"];
      K = dc / std::pow(Rm, d - 2);
      r = make_inequality("transverse-decay", "|m_s|^2 <= beta K R^{d-2} <A_R^2>, K = <[C,[H,C]]>/R^{d-2}",
                          m_s * m_s, *beta * K * std::pow(Rm, d - 2) * a2, tol * std::max(1.0, m_s * m_s));
      const cplx ca = expect(commutator(C, A));
      r.steps.push_back(make_inequality("commutator", "<[C,A_R]> = i m_s", std::abs(ca - cplx{0.0, m_s}), 0.0,
                                        1e-10 * std::max(1.0, std::abs(ca))));
      r.steps.push_back(std::move(chain));
    } else {
      const auto bf = factory.boundary_field(ramp.values);
      auto chain = kls_chain(gp.es, gp.gs, H, bf.h1, A, 0.0, tol);
      const SparseMatrix target = (cplx{0.0, 1.0} / size) * O_R.matrix;
      const SparseMatrix ca = commutator(bf.h1, A).matrix;
      // c from <target, [H1', A]> / <target, target>
      cplx num{0.0, 0.0};
      const SparseMatrix prod = SparseMatrix(target.adjoint()) * ca;
      for (Eigen::Index i = 0; i < prod.rows(); ++i) num += prod.coeff(i, i);
      const cplx c = num / target.squaredNorm();
      const double c2 = std::norm(c);
      const double bound_value = chain.rhs / c2;
      K = bound_value / (std::pow(Rm, d - 1) * std::max(a2, 1e-300));
      r = make_inequality("transverse-decay", "|m_s|^2 <= K R^{d-1} w(A_R^2), KLS at eps = 0 divided by c^2",
                          m_s * m_s, bound_value, tol * std::max(1.0, m_s * m_s));
      r.intermediates["c"] = std::sqrt(c2);
      r.steps.push_back(make_inequality("proportionality", "[H1', A_R] = c (i/|Omega_R|) O(Omega_R)",
                                        max_abs(ca - c * target), 0.0, 1e-12));
      r.steps.push_back(std::move(chain));
    }
    r.intermediates["R"] = R;
    r.intermediates["m_s"] = m_s;
    r.intermediates["A2"] = a2;
    r.intermediates["K"] = K;
    if (reg.clipped || ramp.clipped) r.flags.push_back("clipped");
    out.bounds.push_back(std::move(r));
    out.K_measured.push_back(K);
    used_R.push_back(R);
  }

  // <S2_0 S2_x> against torus distance from the origin
  const std::size_t origin = lattice.index_of(std::vector<int>(static_cast<std::size_t>(d), 0));
  const auto s0 = factory.spin_op(origin, 2);
  for (std::size_t x = 0; x < lattice.num_sites(); ++x) {
    const auto& a = lattice.site(origin).coords;
    const auto& b = lattice.site(x).coords;
    int dist = 0;
    for (int i = 0; i < d; ++i) {
      const int raw = std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
      dist = std::max(dist, std::min(raw, lattice.side() - raw));
    }
    out.correlations.push_back({dist, x, expect(product(s0, factory.spin_op(x, 2), "S2_0 S2_x")).real()});
  }
  std::size_t far = origin;
  for (const auto& pt : out.correlations) {
    if (pt.distance > out.correlations[far].distance) far = pt.site;
  }
  out.bounds.push_back(plancherel_check(expect, factory, origin, far));

  for (const auto& p : momentum_grid(lattice).points) {
    out.structure.push_back(beta ? structure_quantities(*gibbs, factory, p)
                                 : zero_temperature_structure(gp.gs, factory, B, p));
  }

  std::size_t positive = 0;
  for (double k : out.K_measured) positive += k > 0.0 ? 1 : 0;
  if (positive >= 2) {
    ScalingReport s;
    s.name = "transverse-K";
    s.predicted_exponent = 0.0;
    s.exponent_tolerance = 0.0;  // recorded only, no exponent is asserted
    s.R_values = used_R;
    s.values = out.K_measured;
    s.fit();
    out.scaling = s;
  }
  return out;
}

}  // namespace neelgap
