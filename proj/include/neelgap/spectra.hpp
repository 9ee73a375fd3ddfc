#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neelgap/operators.hpp"

namespace neelgap {

/// Full spectral decomposition. Eigenvalues ascending, eigenvectors as
/// orthonormal columns in `basis`. When assembled from sector blocks,
/// `sectors` records 2*Sz of every eigenpair.
struct EigenSystem {
  Eigen::VectorXd values;
  DenseMatrix vectors;
  BasisTag basis;
  std::vector<int> sectors;

  Eigen::Index size() const { return values.size(); }
};

struct DiagonalizeOptions {
  Eigen::Index dense_cap = 4096;  // per block
};

EigenSystem diagonalize(const OperatorHandle& op, DiagonalizeOptions options = {});

/// Diagonalize H(B) sector by sector and embed the result in the full basis.
EigenSystem diagonalize_by_sector(const OperatorFactory& factory, double B, DiagonalizeOptions options = {});
/// Same, for an arbitrary full-space operator that conserves total S3.
EigenSystem diagonalize_by_sector(const OperatorFactory& factory, const OperatorHandle& full,
                                  DiagonalizeOptions options = {});

/// max_n ||H v_n - lambda_n v_n||.
double max_residual(const OperatorHandle& op, const EigenSystem& es);
/// max |V^dag V - 1|.
double orthonormality_defect(const EigenSystem& es);

/// Eigenvalue CSV export: "index,sector,value" (sector empty when unknown).
std::string eigenvalues_csv(const EigenSystem& es);

double default_degeneracy_tol(double E0);

/// Eigenspace at the bottom of the spectrum.
struct GroundSector {
  double E0 = 0.0;
  int q = 0;
  double tol = 0.0;
  bool near_degenerate = false;  // q changes when tol moves by a decade
  BasisTag basis;
  DenseMatrix vectors;  // dim x q, the first q eigenvectors

  DenseMatrix projector() const;
  DenseMatrix excited_projector() const;
};

GroundSector ground_sector(const EigenSystem& es, std::optional<double> tol = std::nullopt);

/// Tr(P0 op)/q.
cplx ground_expectation(const GroundSector& gs, const OperatorHandle& op);
cplx ground_expectation(const GroundSector& gs, const DenseMatrix& op);

using SpectralFunction = std::function<double(double)>;

/// s^a on s >= 0 with 0^0 = 1; negative arguments are clamped to 0.
SpectralFunction power_function(double a);

/// phi(H - E0) = sum_n phi(lambda_n - E0)|n><n|; with excited_only the ground
/// sector is dropped exactly (composition with Pex).
DenseMatrix spectral_matrix(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                            bool excited_only = false);
DenseVector spectral_apply(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                           const DenseVector& v, bool excited_only = false);
/// phi(H - E0) * op
DenseMatrix spectral_apply(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                           const DenseMatrix& op, bool excited_only = false);

/// Eigenbasis view used to evaluate ground-state sandwiches
/// omega(X phi(H - E0) Y) without forming phi(H - E0) explicitly.
class EnergyFrame {
 public:
  EnergyFrame(const EigenSystem& es, const GroundSector& gs);

  const EigenSystem& eigensystem() const { return *es_; }
  const GroundSector& ground() const { return *gs_; }
  Eigen::Index dim() const { return es_->size(); }
  double excitation(Eigen::Index n) const { return es_->values(n) - gs_->E0; }

  /// V^dag A V
  DenseMatrix transform(const OperatorHandle& op) const;
  DenseMatrix transform(const DenseMatrix& op) const;

  /// (1/q) sum_{g ground} sum_n L(g,n) phi(E_n - E0) R(n,g); L and R in the energy basis.
  cplx sandwich(const DenseMatrix& left, const SpectralFunction& phi, const DenseMatrix& right,
                bool excited_only = false) const;

 private:
  const EigenSystem* es_;
  const GroundSector* gs_;
};

/// sup_{t >= 0} (t^{1-2 eps} - t), attained at t* = (1-2eps)^{1/(2eps)}.
double kappa(double epsilon);
double kappa_argmax(double epsilon);

struct CutoffParams {
  double epsilon = 0.1;
  double gamma1 = 0.5;
  double gamma2 = 1.0;
  double M1 = 2.0;
  double M2 = 0.1;
  int R = 1;
  int d = 1;
};

/// Smooth energy cutoffs eta, g1_hat, g_hat, h_hat built for one parameter set.
/// The constructor samples every defining inequality on a dense grid and
/// throws DomainError naming the first violated constraint.
class CutoffFamily {
 public:
  explicit CutoffFamily(CutoffParams params, int samples = 10000);

  const CutoffParams& params() const { return params_; }
  double eta(double s) const;
  double g1(double s) const;
  double g(double s) const;
  double h(double s) const;
  double bump(double s) const;
  double bump_height() const { return bump_height_; }
  double bump_width() const { return bump_width_; }
  /// M2 / R^{d-1}
  double h_bound() const;

  struct GridCheck {
    double worst_eta_tail = 0.0;  // max_s eta^2 (1 - g1^2) - M1 s
    double worst_h = 0.0;         // max_s h - M2/R^{d-1}
    double worst_order = 0.0;     // max_s g - eta g1
    double min_g = 0.0;
    double max_g_outside = 0.0;   // max of g on s <= 0 or s >= gamma2
  };
  GridCheck check_grid(double s_max, int samples) const;

 private:
  CutoffParams params_;
  double bump_height_ = 0.0;
  double bump_width_ = 0.0;
};

/// Smooth step rising from 0 at t<=0 to 1 at t>=1, built from exp(-1/t).
double smooth_step(double t);

/// <m|tau_g(A)|n> = g_hat(E_m - E_n) <m|A|n>, returned in the basis of `es`.
OperatorHandle filtered_operator(const EigenSystem& es, const SpectralFunction& g_hat, const OperatorHandle& A);
/// Energy-basis version of the same matrix.
DenseMatrix filtered_energy_matrix(const EigenSystem& es, const SpectralFunction& g_hat, const DenseMatrix& A_energy);

struct LanczosOptions {
  int max_iterations = 300;
  double tolerance = 1e-12;
  std::uint64_t seed = 7;
};

struct LanczosResult {
  double energy = 0.0;
  DenseVector vector;
  int iterations = 0;
  bool converged = false;
};

/// Lowest eigenpair of a Hermitian sparse matrix, full reorthogonalisation.
LanczosResult lanczos_ground(const SparseMatrix& H, LanczosOptions options = {});

}  // namespace neelgap
