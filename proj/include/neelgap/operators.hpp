#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "neelgap/lattice.hpp"

namespace neelgap {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

struct SpinMatrices {
  Spin spin;
  DenseMatrix s1, s2, s3;  // S3 = diag(S, S-1, ..., -S)

  const DenseMatrix& component(int axis) const;
};

SpinMatrices spin_matrices(Spin spin);
SpinMatrices spin_matrices(double s);

/// Product basis of a lattice. A basis state is encoded as a mixed-radix
/// integer whose digit at site i (weight (2S+1)^i) is k = S - m_i.
class HilbertSpace {
 public:
  HilbertSpace(std::size_t num_sites, Spin spin);

  std::size_t num_sites() const { return num_sites_; }
  Spin spin() const { return spin_; }
  int local_dim() const { return spin_.local_dim(); }
  std::uint64_t dimension() const { return dimension_; }

  int digit(std::uint64_t state, std::size_t site) const {
    return static_cast<int>((state / powers_[site]) % static_cast<std::uint64_t>(local_dim()));
  }
  std::uint64_t with_digit(std::uint64_t state, std::size_t site, int k) const {
    return state + (static_cast<std::int64_t>(k) - digit(state, site)) * static_cast<std::int64_t>(powers_[site]);
  }
  /// 2 * sum_i m_i for the encoded configuration.
  int twice_sz(std::uint64_t state) const;

 private:
  std::size_t num_sites_;
  Spin spin_;
  std::uint64_t dimension_;
  std::vector<std::uint64_t> powers_;
};

/// Configurations with fixed total S3, in ascending encoded order.
class SectorBasis {
 public:
  SectorBasis(const HilbertSpace& space, int twice_sz);

  int twice_sz() const { return twice_sz_; }
  std::size_t dimension() const { return states_.size(); }
  const std::vector<std::uint64_t>& states() const { return states_; }
  std::optional<std::size_t> index_of(std::uint64_t state) const;

 private:
  int twice_sz_;
  std::vector<std::uint64_t> states_;
};

/// All attainable values of 2*Sz_total, descending.
std::vector<int> sector_labels(const HilbertSpace& space);

struct BasisTag {
  enum class Kind { Full, Sector };
  Kind kind = Kind::Full;
  int twice_sz = 0;

  static BasisTag full() { return {}; }
  static BasisTag sector(int twice_sz) { return {Kind::Sector, twice_sz}; }
  bool is_full() const { return kind == Kind::Full; }
  std::string describe() const;
  friend bool operator==(const BasisTag&, const BasisTag&) = default;
};

struct OperatorHandle {
  SparseMatrix matrix;
  BasisTag basis;
  std::string label;
  bool hermitian = false;

  Eigen::Index dim() const { return matrix.rows(); }
};

/// max |A_ij - conj(A_ji)|.
double hermiticity_defect(const SparseMatrix& m);
OperatorHandle make_handle(SparseMatrix m, BasisTag basis, std::string label);

struct LocalFactor {
  std::size_t site;
  DenseMatrix op;
};

struct ProductTerm {
  cplx coeff{1.0, 0.0};
  std::vector<LocalFactor> factors;  // distinct sites
};

/// Sum of products of on-site operators plus a multiple of the identity.
struct OperatorSum {
  std::vector<ProductTerm> terms;
  cplx scalar{0.0, 0.0};

  void add(cplx coeff, std::size_t site, const DenseMatrix& op);
  void add(cplx coeff, std::size_t a, const DenseMatrix& op_a, std::size_t b, const DenseMatrix& op_b);
};

struct OperatorOptions {
  /// Cap on full-space builds.
  std::uint64_t max_full_dim = std::uint64_t{1} << 18;
  /// Negative-control hook: tilts the bond-level transverse axis so the
  /// Hamiltonian and boundary field pick up a spurious S3 admixture.
  bool inject_defect = false;
  double defect_strength = 0.05;
};

struct BoundaryField {
  OperatorHandle h1;  // sum_bonds (S1_x + S1_y)(f_x + f_y)
  double h2 = 0.0;    // sum_bonds (f_x + f_y)^2
};

/// Builds every operator on one lattice. Immutable after construction.
class OperatorFactory {
 public:
  explicit OperatorFactory(const Lattice& lattice, OperatorOptions options = {});

  const Lattice& lattice() const { return *lattice_; }
  const HilbertSpace& space() const { return space_; }
  const SpinMatrices& spins() const { return spins_; }
  const OperatorOptions& options() const { return options_; }

  const SectorBasis& sector(int twice_sz) const;
  std::uint64_t basis_dim(BasisTag basis) const;

  OperatorHandle assemble(const OperatorSum& sum, BasisTag basis, std::string label) const;

  OperatorHandle identity(BasisTag basis = BasisTag::full()) const;
  OperatorHandle spin_op(std::size_t site, int axis, BasisTag basis = BasisTag::full()) const;
  OperatorHandle total_spin(int axis, BasisTag basis = BasisTag::full()) const;

  /// sum over bonds S_x . S_y
  OperatorHandle heisenberg(BasisTag basis = BasisTag::full()) const;
  OperatorHandle bond_dot(std::size_t a, std::size_t b, BasisTag basis = BasisTag::full()) const;
  /// H0 - B O
  OperatorHandle hamiltonian(double B, BasisTag basis = BasisTag::full()) const;
  /// Staggered S3 sum over the whole lattice or a region.
  OperatorHandle order_parameter(const Region* region = nullptr, BasisTag basis = BasisTag::full()) const;
  /// (1/|Omega_R|) sum_{x in Omega_R} sign(x) S2_x; full space only.
  OperatorHandle staggered_sy(const Region& region) const;
  BoundaryField boundary_field(const std::vector<double>& f) const;
  /// The three-term field Hamiltonian, assembled from the completed square.
  OperatorHandle field_hamiltonian(double B, const std::vector<double>& f) const;
  /// |Lambda|^{-1/2} sum_x e^{-ipx} S^{(axis)}_x; full space only.
  OperatorHandle fourier_spin(const Momentum& p, int axis) const;

 private:
  DenseMatrix bond_axis1() const;

  const Lattice* lattice_;
  OperatorOptions options_;
  HilbertSpace space_;
  SpinMatrices spins_;
  mutable std::vector<std::optional<SectorBasis>> sectors_;
};

// Free-function entry points; each builds a default factory.
OperatorHandle build_hamiltonian(const Lattice& lattice, double B, OperatorOptions options = {});
OperatorHandle build_order_parameter(const Lattice& lattice, const Region* region = nullptr,
                                     OperatorOptions options = {});
OperatorHandle build_staggered_sy(const Lattice& lattice, int R, bool allow_clip = false,
                                  OperatorOptions options = {});
BoundaryField build_boundary_field(const Lattice& lattice, const RampField& f, OperatorOptions options = {});
OperatorHandle build_field_hamiltonian(const Lattice& lattice, double B, const std::vector<double>& f,
                                       OperatorOptions options = {});
OperatorHandle fourier_spin(const Lattice& lattice, const std::vector<double>& p, int axis,
                            OperatorOptions options = {});

OperatorHandle commutator(const OperatorHandle& a, const OperatorHandle& b);
OperatorHandle adjoint(const OperatorHandle& a);
OperatorHandle scaled(const OperatorHandle& a, cplx factor, std::string label);
OperatorHandle sum(const OperatorHandle& a, const OperatorHandle& b, std::string label);
OperatorHandle product(const OperatorHandle& a, const OperatorHandle& b, std::string label);

/// Largest singular value (largest |eigenvalue| for Hermitian input).
double operator_norm(const OperatorHandle& a);
double operator_norm(const DenseMatrix& a);
/// Largest elementwise modulus.
double max_abs(const SparseMatrix& m);

/// Restriction of a full-space sector-conserving operator onto one sector.
OperatorHandle restrict_to_sector(const OperatorFactory& factory, const OperatorHandle& full, int twice_sz);
/// max modulus of matrix elements connecting different total-S3 sectors.
double sector_leakage(const HilbertSpace& space, const SparseMatrix& full);

/// Triplet text dump: one "row col re im" line per stored nonzero.
std::string to_triplet_text(const OperatorHandle& op);

}  // namespace neelgap
