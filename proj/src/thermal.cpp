#include "neelgap/thermal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace neelgap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DenseMatrix energy_frame(const EigenSystem& es, const OperatorHandle& op) {
  if (!op.basis.is_full() || op.dim() != es.size()) throw DomainError("'" + op.label + "' is not a full-space operator");
  const DenseMatrix av = op.matrix * es.vectors;
  return es.vectors.adjoint() * av;
}

// phi_mn = (w_m - w_n) / (beta (E_n - E_m)), evaluated from the lower level so
// that expm1 keeps it accurate for nearly degenerate pairs
double duhamel_kernel(const GibbsState& gs, Eigen::Index m, Eigen::Index n) {
  const double Em = gs.es.values(m);
  const double En = gs.es.values(n);
  if (std::abs(En - Em) < 1e-12 * std::max(1.0, std::abs(Em))) return gs.weights(m);
  const Eigen::Index lo = Em < En ? m : n;
  const double x = gs.beta * std::abs(En - Em);
  return gs.weights(lo) * (-std::expm1(-x)) / x;
}

}  // namespace

GibbsState gibbs_state(const EigenSystem& es, double beta, double B, GibbsOptions options) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("Gibbs state needs a finite beta > 0");
  if (!es.basis.is_full()) throw DomainError("Gibbs state needs a full-space eigensystem");
  if (es.size() == 0) throw DomainError("empty eigensystem");
  const double e_min = es.values.minCoeff();
  const double e_max = es.values.maxCoeff();
  if (!options.log_domain && beta * (e_max - e_min) > 700.0) {
    throw DomainError("beta times spectral width exceeds 700; enable log-domain weights");
  }

  GibbsState gs;
  gs.beta = beta;
  gs.B = B;
  gs.es = es;
  const double shift = options.log_domain ? e_min : 0.0;
  gs.weights = (-beta * (es.values.array() - shift)).exp().matrix();
  const double total = gs.weights.sum();
  gs.log_Z = std::log(total) - beta * shift;
  gs.weights /= total;
  return gs;
}

DenseMatrix GibbsState::density() const {
  return es.vectors * weights.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

cplx thermal_expectation(const GibbsState& gs, const OperatorHandle& op) {
  if (!op.basis.is_full() || op.dim() != gs.es.size()) {
    throw DomainError("'" + op.label + "' is not a full-space operator");
  }
  const DenseMatrix av = op.matrix * gs.es.vectors;
  cplx total{0.0, 0.0};
  for (Eigen::Index n = 0; n < gs.es.size(); ++n) total += gs.weights(n) * gs.es.vectors.col(n).dot(av.col(n));
  return total;
}

cplx thermal_expectation(const GibbsState& gs, const DenseMatrix& op) {
  if (op.rows() != gs.es.size()) throw DomainError("dimension mismatch in thermal expectation");
  const DenseMatrix av = op * gs.es.vectors;
  cplx total{0.0, 0.0};
  for (Eigen::Index n = 0; n < gs.es.size(); ++n) total += gs.weights(n) * gs.es.vectors.col(n).dot(av.col(n));
  return total;
}

FreeEnergy free_energy_entropy(const GibbsState& gs) {
  FreeEnergy out;
  out.F = -gs.log_Z / gs.beta;
  for (Eigen::Index n = 0; n < gs.weights.size(); ++n) {
    const double w = gs.weights(n);
    if (w > 0.0) out.entropy -= w * std::log(w);
  }
  return out;
}

InequalityReport gibbs_variational_check(const GibbsState& gs, const std::vector<DenseMatrix>& trials,
                                         double tolerance) {
  const FreeEnergy fe = free_energy_entropy(gs);
  InequalityReport report;
  report.name = "gibbs-variational";
  report.anchor = "F <= Tr(sigma H) - S(sigma)/beta";
  report.lhs = fe.F;
  report.rhs = std::numeric_limits<double>::infinity();
  report.tolerance = tolerance;
  const auto dim = gs.es.size();
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const DenseMatrix& sigma = trials[t];
    if (sigma.rows() != dim || sigma.cols() != dim) throw DomainError("trial density has the wrong dimension");
    if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("trial density is not Hermitian");
    if (std::abs(sigma.trace() - 1.0) > 1e-10) throw DomainError("trial density does not have unit trace");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(sigma, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd p = solver.eigenvalues();
    if (p.minCoeff() < -1e-12) throw DomainError("trial density is not positive semidefinite");
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p(i) > 0.0) entropy -= p(i) * std::log(p(i));
    }
    const DenseMatrix se = gs.es.vectors.adjoint() * sigma * gs.es.vectors;
    double energy = 0.0;
    for (Eigen::Index n = 0; n < dim; ++n) energy += gs.es.values(n) * se(n, n).real();
    const double rhs = energy - entropy / gs.beta;
    report.rhs = std::min(report.rhs, rhs);
  }
  report.intermediates["trials"] = static_cast<double>(trials.size());
  report.intermediates["entropy"] = fe.entropy;
  report.intermediates["beta"] = gs.beta;
  return report.settle();
}

DenseMatrix random_product_density(const HilbertSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const int k = space.local_dim();
  DenseMatrix total = DenseMatrix::Ones(1, 1);
  for (std::size_t site = 0; site < space.num_sites(); ++site) {
    DenseMatrix g(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
    }
    DenseMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    // site i carries weight (2S+1)^i, so later sites are the slower index
    DenseMatrix next(total.rows() * k, total.cols() * k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) next.block(a * total.rows(), b * total.cols(), total.rows(), total.cols()) = rho(a, b) * total;
    }
    total = std::move(next);
  }
  return total;
}

cplx duhamel_pair(const GibbsState& gs, const OperatorHandle& X, const OperatorHandle& Y) {
  const DenseMatrix xe = energy_frame(gs.es, X);
  const DenseMatrix ye = energy_frame(gs.es, Y);
  cplx total{0.0, 0.0};
  for (Eigen::Index n = 0; n < xe.cols(); ++n) {
    for (Eigen::Index m = 0; m < xe.rows(); ++m) {
      const cplx t = std::conj(xe(m, n)) * ye(m, n);
      if (t == cplx{0.0, 0.0}) continue;
      total += t * duhamel_kernel(gs, m, n);
    }
  }
  return total;
}

double duhamel_inner(const GibbsState& gs, const OperatorHandle& A) {
  const DenseMatrix ae = energy_frame(gs.es, A);
  double total = 0.0;
  for (Eigen::Index n = 0; n < ae.cols(); ++n) {
    for (Eigen::Index m = 0; m < ae.rows(); ++m) {
      const double a2 = std::norm(ae(m, n));
      if (a2 == 0.0) continue;
      total += a2 * duhamel_kernel(gs, m, n);
    }
  }
  return total;
}

Expectation thermal_functional(const GibbsState& gs) {
  return [&gs](const OperatorHandle& op) { return thermal_expectation(gs, op); };
}

Expectation ground_functional(const GroundSector& gs) {
  return [&gs](const OperatorHandle& op) { return ground_expectation(gs, op); };
}

bool StructureReport::all_pass() const {
  for (const auto& r : bounds) {
    if (!r.pass) return false;
  }
  return true;
}

namespace {

struct StructureCore {
  OperatorHandle sp, sm;
  double g = 0.0, c = 0.0, corr = 0.0, corr_reverse = 0.0;
};

StructureCore structure_core(const Expectation& expect, const OperatorFactory& factory, const OperatorHandle& H,
                             const Momentum& p) {
  StructureCore core;
  core.sp = factory.fourier_spin(p, 2);
  core.sm = adjoint(core.sp);
  core.corr = expect(product(core.sp, core.sm, "S2_p S2_-p")).real();
  core.corr_reverse = expect(product(core.sm, core.sp, "S2_-p S2_p")).real();
  core.g = 0.5 * (core.corr + core.corr_reverse);
  const auto inner = commutator(H, core.sp);
  core.c = expect(commutator(core.sm, inner)).real();
  return core;
}

void fill_common(StructureReport& r, const StructureCore& core, const OperatorFactory& factory, const Momentum& p,
                 double B) {
  r.p = p;
  r.S = factory.lattice().spin().value();
  r.B = B;
  r.g = core.g;
  r.c = core.c;
  r.corr = core.corr;
  r.corr_reverse = core.corr_reverse;
  r.singular = std::abs(p.eps_prime) < 1e-14;
  const double base = 4.0 * r.S * r.S * p.eps;
  if (B == 0.0) {
    r.K_empirical = kNaN;
    r.c_bar = base;
  } else {
    r.K_empirical = (r.c - base) / std::abs(B);
    r.c_bar = base + std::max(0.0, r.K_empirical) * std::abs(B);
  }
}

}  // namespace

StructureReport structure_quantities(const GibbsState& gs, const OperatorFactory& factory, const Momentum& p,
                                     double tolerance) {
  const auto H = factory.hamiltonian(gs.B);
  const auto core = structure_core(thermal_functional(gs), factory, H, p);
  StructureReport r;
  fill_common(r, core, factory, p, gs.B);
  r.beta = gs.beta;
  r.b = duhamel_inner(gs, core.sp);
  const double beta = gs.beta;

  r.bounds.push_back(make_inequality("duhamel-below-g", "b_p <= g_p", r.b, r.g, tolerance));
  r.bounds.push_back(make_inequality("adjointness", "<S_p S_-p> <= 2 g_p", r.corr, 2.0 * r.g, tolerance));
  const double fb = 4.0 * r.g * r.g / (4.0 * r.g + beta * r.c);
  r.bounds.push_back(make_inequality("falk-bruch", "4 g^2/(4g + beta c) <= b_p", fb, r.b, tolerance));
  r.bounds.push_back(make_inequality("g-from-b-and-c", "g_p <= (b + sqrt(b^2 + beta b c))/2", r.g,
                                     0.5 * (r.b + std::sqrt(r.b * r.b + beta * r.b * r.c)), tolerance));
  if (gs.B == 0.0) {
    r.bounds.push_back(make_inequality("c-bound", "c_p <= 4 S^2 eps_p", r.c, 4.0 * r.S * r.S * p.eps, tolerance));
  }
  if (!r.singular) {
    r.bounds.push_back(
        make_inequality("infrared", "b_p <= 1/(2 beta eps'_p)", r.b, 1.0 / (2.0 * beta * p.eps_prime), tolerance));
    auto corr_bound = make_inequality("correlation", "<S_p S_-p> <= 1/(beta eps'_p) + sqrt(cbar/(2 eps'_p))", r.corr,
                                      1.0 / (beta * p.eps_prime) + std::sqrt(r.c_bar / (2.0 * p.eps_prime)), tolerance);
    corr_bound.intermediates["c_bar"] = r.c_bar;
    r.bounds.push_back(corr_bound);
  }
  return r;
}

StructureReport zero_temperature_structure(const GroundSector& gs, const OperatorFactory& factory, double B,
                                           const Momentum& p, double tolerance) {
  if (!gs.basis.is_full()) throw DomainError("zero-temperature structure needs a full-space ground sector");
  const auto H = factory.hamiltonian(B);
  const auto core = structure_core(ground_functional(gs), factory, H, p);
  StructureReport r;
  fill_common(r, core, factory, p, B);
  r.b = kNaN;
  r.bounds.push_back(make_inequality("adjointness", "<S_p S_-p> <= 2 g_p", r.corr, 2.0 * r.g, tolerance));
  if (B == 0.0) {
    r.bounds.push_back(make_inequality("c-bound", "c_p <= 4 S^2 eps_p", r.c, 4.0 * r.S * r.S * p.eps, tolerance));
  }
  if (!r.singular) {
    auto corr_bound = make_inequality("correlation", "omega(S_p S_-p) <= sqrt(cbar/(2 eps'_p))", r.corr,
                                      std::sqrt(r.c_bar / (2.0 * p.eps_prime)), tolerance);
    corr_bound.intermediates["c_bar"] = r.c_bar;
    r.bounds.push_back(corr_bound);
  }
  return r;
}

std::string structure_csv_header() {
  std::ostringstream os;
  // momentum components share one column, separated by ';', so mixed dimensions fit one file
  os << "d,L,S,beta,B,p,g,b,c,rhs_infrared,rhs_c,rhs_g,rhs_correlation,slack_infrared,slack_c,slack_g,slack_correlation,"
        "slack_falk_bruch";
  return os.str();
}

std::string structure_csv_row(const StructureReport& r, int d, int L) {
  auto find = [&](const std::string& name) -> const InequalityReport* {
    for (const auto& b : r.bounds) {
      if (b.name == name) return &b;
    }
    return nullptr;
  };
  auto put = [](std::ostringstream& os, double v) {
    os << ',';
    if (std::isfinite(v)) os << v;
  };
  std::ostringstream os;
  os.precision(12);
  os << d << ',' << L << ',' << r.S << ',';
  if (r.beta) os << *r.beta;
  else os << "inf";
  os << ',' << r.B;
  os << ',';
  for (std::size_t i = 0; i < r.p.p.size(); ++i) os << (i ? ";" : "") << r.p.p[i];
  put(os, r.g);
  put(os, r.b);
  put(os, r.c);
  const char* names[] = {"infrared", "c-bound", "g-from-b-and-c", "correlation"};
  for (const char* n : names) {
    const auto* b = find(n);
    put(os, b ? b->rhs : kNaN);
  }
  for (const char* n : names) {
    const auto* b = find(n);
    put(os, b ? b->slack : kNaN);
  }
  const auto* fb = find("falk-bruch");
  put(os, fb ? fb->slack : kNaN);
  return os.str();
}

InequalityReport plancherel_check(const Expectation& expect, const OperatorFactory& factory, std::size_t x,
                                  std::size_t y, double rel_tol) {
  const auto& lattice = factory.lattice();
  const auto grid = momentum_grid(lattice);
  const auto& sx = lattice.site(x);
  const auto& sy = lattice.site(y);
  cplx total{0.0, 0.0};
  for (const auto& p : grid.points) {
    double phase = 0.0;
    for (int i = 0; i < lattice.dim(); ++i) phase += p.p[i] * (sx.coords[i] - sy.coords[i]);
    const auto sp = factory.fourier_spin(p, 2);
    total += std::polar(1.0, phase) * expect(product(sp, adjoint(sp), "S2_p S2_-p"));
  }
  total /= static_cast<double>(lattice.num_sites());
  const cplx direct = expect(product(factory.spin_op(x, 2), factory.spin_op(y, 2), "S2_x S2_y"));
  auto r = make_identity("plancherel", "(1/|Lambda|) sum_p e^{ip(x-y)} <S_p S_-p> = <S2_x S2_y>", total.real(),
                         direct.real(), rel_tol);
  r.intermediates["imag_sum"] = total.imag();
  r.intermediates["distance_sup"] = static_cast<double>(
      [&] {
        int best = 0;
        for (int i = 0; i < lattice.dim(); ++i) {
          int delta = std::abs(sx.coords[i] - sy.coords[i]);
          best = std::max(best, std::min(delta, lattice.side() - delta));
        }
        return best;
      }());
  return r;
}

InequalityReport bogoliubov_chain(const GibbsState& gs, const OperatorHandle& H, const OperatorHandle& C,
                                  const OperatorHandle& A, double tolerance) {
  const double beta = gs.beta;
  const cplx ca = thermal_expectation(gs, commutator(C, A));
  const double lhs = std::norm(ca);
  const auto cdag = adjoint(C);
  const double dc = thermal_expectation(gs, commutator(C, commutator(H, cdag))).real();
  const double bA = duhamel_inner(gs, A);
  const auto adag = adjoint(A);
  const double anti =
      thermal_expectation(gs, sum(product(A, adag, "A A^dag"), product(adag, A, "A^dag A"), "{A,A^dag}")).real();

  // <[X^dag, Y]> = beta (X, [H,Y])_D with X = A^dag, Y = C
  const cplx via_duhamel = beta * duhamel_pair(gs, adag, commutator(H, C));
  const cplx direct = thermal_expectation(gs, commutator(A, C));

  InequalityReport r = make_inequality("bogoliubov", "|<[C,A]>|^2 <= (beta/2) <{A,A^dag}> <[C,[H,C^dag]]>", lhs,
                                       0.5 * beta * anti * dc, tolerance);
  r.intermediates["duhamel_A"] = bA;
  r.intermediates["double_commutator"] = dc;
  r.intermediates["anticommutator"] = anti;
  r.intermediates["beta"] = beta;
  r.steps.push_back(make_inequality("duhamel-step", "|<[C,A]>|^2 <= beta (A,A)_D <[C,[H,C^dag]]>", lhs, beta * bA * dc,
                                    tolerance));
  r.steps.push_back(make_inequality("symmetrize-step", "(A,A)_D <= <{A,A^dag}>/2", beta * bA * dc,
                                    0.5 * beta * anti * dc, tolerance));
  const double diff = std::abs(direct - via_duhamel);
  r.steps.push_back(make_inequality("duhamel-identity", "<[A,C]> = beta (A^dag, [H,C])_D", diff, 0.0,
                                    1e-9 * std::max(1.0, std::abs(direct))));
  return r;
}

std::vector<MagnetizationPoint> magnetization_curve(const OperatorFactory& factory, std::optional<double> beta,
                                                    const std::vector<double>& B_grid) {
  for (std::size_t i = 1; i < B_grid.size(); ++i) {
    if (!(B_grid[i] > B_grid[i - 1])) throw DomainError("field grid must be strictly ascending");
  }
  const auto O = factory.order_parameter();
  const double volume = static_cast<double>(factory.lattice().num_sites());
  std::vector<MagnetizationPoint> out;
  for (double B : B_grid) {
    if (!std::isfinite(B)) throw DomainError("field grid must be finite");
    const auto es = diagonalize_by_sector(factory, B);
    double value = 0.0;
    if (beta) {
      value = thermal_expectation(gibbs_state(es, *beta, B), O).real();
    } else {
      value = ground_expectation(ground_sector(es), O).real();
    }
    out.push_back({B, value / volume});
  }
  return out;
}

}  // namespace neelgap
