#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "neelgap/report.hpp"
#include "neelgap/spectra.hpp"
#include "neelgap/thermal.hpp"

namespace neelgap {

struct VerifierOptions {
  OperatorOptions operators;
  DiagonalizeOptions diagonalize;
  double tolerance = 1e-9;
  /// Evaluate region/ramp on the box when Omega_2R does not fit (reports are flagged).
  bool allow_clip = true;
};

/// Hamiltonian spectrum plus ground sector for one (lattice, B).
struct GroundProblem {
  EigenSystem es;
  GroundSector gs;
  bool sector_blocked = true;  // false when H broke S3 conservation and was solved whole
};

GroundProblem solve_ground(const OperatorFactory& factory, double B, const VerifierOptions& options);

DenseMatrix pure_density(const DenseVector& v);
/// count Haar-random pure-state densities of dimension dim.
std::vector<DenseMatrix> haar_trials(Eigen::Index dim, int count, std::mt19937_64& rng);

/// omega_B(O)/|Lambda| >= omega(O)/|Lambda| + [E0(0) - omega(H0)]/(B |Lambda|) for every trial omega.
InequalityReport check_variational_magnetization(const Lattice& lattice, double B,
                                                 const std::vector<DenseMatrix>& trials,
                                                 const VerifierOptions& options = {});

/// |omega([C,A])|^2 against sqrt(D(C)) sqrt(kappa {C,C*} + [[C*,H],C]) (A h^eps A* + A* h^eps A)
/// with C the boundary-field operator of the ramp and A the staggered S2 average;
/// every intermediate Schwarz step is attached as a sub-report.
InequalityReport check_kls(const Lattice& lattice, double B, int R, double epsilon,
                           const VerifierOptions& options = {});
/// Same chain for arbitrary operators.
InequalityReport kls_chain(const EigenSystem& es, const GroundSector& gs, const OperatorHandle& H,
                           const OperatorHandle& C, const OperatorHandle& A, double epsilon, double tolerance);

/// omega(H1' Pex h^-1 H1') <= (1/2) sum_bonds (f_x + f_y)^2 plus the second-order
/// perturbation formula checked against finite differences of the ground energy.
InequalityReport check_susceptibility_bound(const Lattice& lattice, double B, const std::vector<double>& f,
                                            const VerifierOptions& options = {}, double fd_step = 1e-3);

/// E0(B, f) >= E0(B, 0) for every sample.
InequalityReport check_rp_energy(const Lattice& lattice, double B, const std::vector<std::vector<double>>& f_samples,
                                 const VerifierOptions& options = {});

/// [H1', A_R] = c (i/|Omega_R|) O^(Omega_R) for a measured scalar c.
InequalityReport check_commutator_identity(const Lattice& lattice, int R, double B,
                                           const VerifierOptions& options = {});

struct DoubleCommutatorReport {
  ScalingReport scaling;
  std::vector<double> max_bond_norm;  // per R, largest single-bond norm
  std::vector<double> max_bond_norm_times_R2;
  InequalityReport first_order;       // the f_x-proportional cross term vanishes
  InequalityReport plateau;           // bonds with constant f around them give 0
  InequalityReport decomposition;     // full double commutator equals its Delta-Delta part
};

/// Sum over bonds in Omega_{2R+1} of ||[[H1', S_x.S_y], H1']||, each term evaluated on
/// its two-site cluster. Needs at least two R values.
DoubleCommutatorReport check_double_commutator_scaling(int d, const std::vector<int>& R_values, Spin spin,
                                                      double predicted_exponent, double exponent_tolerance);

struct TrialStateReport {
  int R = 0;
  double epsilon = 0.0;
  double B = 0.0;
  int q = 0;
  double numerator = 0.0;    // omega(A h^{1+eps} A)
  double denominator = 0.0;  // omega(A h^eps A)
  std::optional<double> ratio;
  bool degenerate = false;
  double staggered_magnetization = 0.0;  // omega(O^(Omega_R))/|Omega_R|
  std::vector<std::string> flags;
  std::vector<InequalityReport> checks;

  bool all_pass() const;
};

TrialStateReport check_trial_state(const Lattice& lattice, double B, int R, double epsilon,
                                   const CutoffParams& cutoff, const VerifierOptions& options = {});

struct WindowSpec {
  /// Window edges eps' and eps'' as fractions of the measured gap.
  double lower = 0.25;
  double upper_margin = 0.25;
};

struct SpectralWindowReport {
  double gap = 0.0;
  double eps_prime = 0.0;
  double eps_double_prime = 0.0;
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  double total = 0.0;  // omega(A_R^2)
  int q = 0;
  std::vector<std::string> flags;
  std::vector<InequalityReport> checks;

  bool all_pass() const;
};

SpectralWindowReport check_spectral_windows(const Lattice& lattice, double B, int R, double epsilon,
                                            const WindowSpec& windows, const VerifierOptions& options = {});

struct CorrelationPoint {
  int distance = 0;  // sup-norm torus distance from the origin site
  std::size_t site = 0;
  double value = 0.0;  // <S2_0 S2_x>
};

struct TransverseDecayReport {
  std::optional<double> beta;
  double B = 0.0;
  std::vector<InequalityReport> bounds;  // one per R
  std::vector<double> K_measured;        // per R
  std::optional<ScalingReport> scaling;
  std::vector<CorrelationPoint> correlations;
  std::vector<StructureReport> structure;  // thermal runs only
  std::vector<std::string> flags;

  bool all_pass() const;
};

TransverseDecayReport check_transverse_decay(const Lattice& lattice, std::optional<double> beta, double B,
                                             const std::vector<int>& R_values, const VerifierOptions& options = {});

}  // namespace neelgap
