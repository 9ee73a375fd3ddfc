#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "neelgap/report.hpp"
#include "neelgap/spectra.hpp"

namespace neelgap {

struct GibbsOptions {
  /// Shift energies by E0 before exponentiating. Without it, beta times the
  /// spectral width must stay below 700.
  bool log_domain = true;
};

/// e^{-beta H}/Z held in the eigenbasis of H.
struct GibbsState {
  double beta = 0.0;
  double B = 0.0;
  EigenSystem es;
  Eigen::VectorXd weights;  // Boltzmann weights, sum to 1
  double log_Z = 0.0;

  double Z() const { return std::exp(log_Z); }
  DenseMatrix density() const;
};

GibbsState gibbs_state(const EigenSystem& es, double beta, double B, GibbsOptions options = {});

cplx thermal_expectation(const GibbsState& gs, const OperatorHandle& op);
cplx thermal_expectation(const GibbsState& gs, const DenseMatrix& op);

struct FreeEnergy {
  double F = 0.0;
  double entropy = 0.0;
};

FreeEnergy free_energy_entropy(const GibbsState& gs);

/// F <= Tr(sigma H) - S(sigma)/beta for every trial density.
InequalityReport gibbs_variational_check(const GibbsState& gs, const std::vector<DenseMatrix>& trials,
                                         double tolerance = 1e-10);

/// Tensor product of random single-site density matrices.
DenseMatrix random_product_density(const HilbertSpace& space, std::mt19937_64& rng);

/// (X, Y)_D = (1/Z) int_0^1 ds Tr[X^dag e^{-s beta H} Y e^{-(1-s) beta H}]
cplx duhamel_pair(const GibbsState& gs, const OperatorHandle& X, const OperatorHandle& Y);
/// (A, A)_D; real and non-negative.
double duhamel_inner(const GibbsState& gs, const OperatorHandle& A);

/// Expectation functional shared by the thermal and ground-state paths.
using Expectation = std::function<cplx(const OperatorHandle&)>;
Expectation thermal_functional(const GibbsState& gs);
Expectation ground_functional(const GroundSector& gs);

struct StructureReport {
  Momentum p;
  double S = 0.0;
  std::optional<double> beta;  // empty at zero temperature
  double B = 0.0;
  double g = 0.0;
  double b = 0.0;  // Duhamel function; zero temperature leaves it unset (nan)
  double c = 0.0;
  double corr = 0.0;          // <S2_p S2_-p>
  double corr_reverse = 0.0;  // <S2_-p S2_p>
  bool singular = false;      // eps'_p = 0
  double K_empirical = 0.0;   // (c - 4 S^2 eps_p)/|B|, nan at B = 0
  double c_bar = 0.0;         // 4 S^2 eps_p + max(0, K) |B|
  std::vector<InequalityReport> bounds;

  bool all_pass() const;
};

StructureReport structure_quantities(const GibbsState& gs, const OperatorFactory& factory, const Momentum& p,
                                     double tolerance = 1e-10);
StructureReport zero_temperature_structure(const GroundSector& gs, const OperatorFactory& factory, double B,
                                           const Momentum& p, double tolerance = 1e-10);

std::string structure_csv_header();
std::string structure_csv_row(const StructureReport& r, int d, int L);

/// (1/|Lambda|) sum_p e^{ip(x-y)} <S2_p S2_-p> against <S2_x S2_y>.
InequalityReport plancherel_check(const Expectation& expect, const OperatorFactory& factory, std::size_t x,
                                  std::size_t y, double rel_tol = 1e-9);

/// |<[C,A]>|^2 <= beta (A,A)_D <[C,[H,C^dag]]> <= (beta/2) <{A,A^dag}> <[C,[H,C^dag]]>
InequalityReport bogoliubov_chain(const GibbsState& gs, const OperatorHandle& H, const OperatorHandle& C,
                                  const OperatorHandle& A, double tolerance = 1e-9);

struct MagnetizationPoint {
  double B = 0.0;
  double m = 0.0;
};

/// m(B) = <O>/|Lambda| per field value; beta empty means ground state.
std::vector<MagnetizationPoint> magnetization_curve(const OperatorFactory& factory, std::optional<double> beta,
                                                    const std::vector<double>& B_grid);

}  // namespace neelgap
