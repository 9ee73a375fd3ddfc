#include "neelgap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace neelgap {

namespace {

constexpr cplx kI{0.0, 1.0};

// Column-wise nonzeros of a small local matrix.
using SparseColumns = std::vector<std::vector<std::pair<int, cplx>>>;

SparseColumns columns_of(const DenseMatrix& m) {
  SparseColumns cols(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > 0.0) cols[c].emplace_back(static_cast<int>(r), m(r, c));
    }
  }
  return cols;
}

}  // namespace

const DenseMatrix& SpinMatrices::component(int axis) const {
  switch (axis) {
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    default: throw DomainError("spin component must be 1, 2 or 3");
  }
}

SpinMatrices spin_matrices(Spin spin) {
  if (spin.two_s < 1) throw DomainError("spin magnitude must be >= 1/2");
  const int n = spin.local_dim();
  const double s = spin.value();
  SpinMatrices out{spin, DenseMatrix::Zero(n, n), DenseMatrix::Zero(n, n), DenseMatrix::Zero(n, n)};
  DenseMatrix raise = DenseMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = s - k;
    out.s3(k, k) = m;
    if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const DenseMatrix lower = raise.adjoint();
  out.s1 = 0.5 * (raise + lower);
  out.s2 = (raise - lower) / (2.0 * kI);
  return out;
}

SpinMatrices spin_matrices(double s) { return spin_matrices(Spin::from_double(s)); }

HilbertSpace::HilbertSpace(std::size_t num_sites, Spin spin) : num_sites_(num_sites), spin_(spin) {
  const double bits = static_cast<double>(num_sites) * std::log2(static_cast<double>(spin.local_dim()));
  if (bits > 62.0) throw CapacityError("Hilbert space too large to index");
  powers_.resize(num_sites);
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < num_sites; ++i) {
    powers_[i] = p;
    p *= static_cast<std::uint64_t>(spin.local_dim());
  }
  dimension_ = p;
}

int HilbertSpace::twice_sz(std::uint64_t state) const {
  int total = 0;
  for (std::size_t i = 0; i < num_sites_; ++i) total += spin_.two_s - 2 * digit(state, i);
  return total;
}

SectorBasis::SectorBasis(const HilbertSpace& space, int twice_sz) : twice_sz_(twice_sz) {
  for (std::uint64_t s = 0; s < space.dimension(); ++s) {
    if (space.twice_sz(s) == twice_sz) states_.push_back(s);
  }
  if (states_.empty()) throw DomainError("empty total-S3 sector " + std::to_string(twice_sz) + "/2");
}

std::optional<std::size_t> SectorBasis::index_of(std::uint64_t state) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<int> sector_labels(const HilbertSpace& space) {
  const int max = space.spin().two_s * static_cast<int>(space.num_sites());
  std::vector<int> out;
  for (int t = max; t >= -max; t -= 2) out.push_back(t);
  return out;
}

std::string BasisTag::describe() const {
  if (is_full()) return "full";
  std::ostringstream os;
  os << "sector(" << twice_sz << "/2)";
  return os.str();
}

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

double hermiticity_defect(const SparseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  SparseMatrix diff = m - SparseMatrix(m.adjoint());
  return max_abs(diff);
}

OperatorHandle make_handle(SparseMatrix m, BasisTag basis, std::string label) {
  m.prune(cplx{0.0, 0.0}, 0.0);
  m.makeCompressed();
  OperatorHandle h{std::move(m), basis, std::move(label), false};
  h.hermitian = hermiticity_defect(h.matrix) <= 1e-12;
  return h;
}

void OperatorSum::add(cplx coeff, std::size_t site, const DenseMatrix& op) {
  terms.push_back(ProductTerm{coeff, {LocalFactor{site, op}}});
}

void OperatorSum::add(cplx coeff, std::size_t a, const DenseMatrix& op_a, std::size_t b, const DenseMatrix& op_b) {
  if (a == b) {
    terms.push_back(ProductTerm{coeff, {LocalFactor{a, op_a * op_b}}});
  } else {
    terms.push_back(ProductTerm{coeff, {LocalFactor{a, op_a}, LocalFactor{b, op_b}}});
  }
}

OperatorFactory::OperatorFactory(const Lattice& lattice, OperatorOptions options)
    : lattice_(&lattice),
      options_(options),
      space_(lattice.num_sites(), lattice.spin()),
      spins_(spin_matrices(lattice.spin())),
      sectors_(sector_labels(space_).size()) {}

const SectorBasis& OperatorFactory::sector(int twice_sz) const {
  const int max = space_.spin().two_s * static_cast<int>(space_.num_sites());
  if (twice_sz > max || twice_sz < -max || (max - twice_sz) % 2 != 0) {
    throw DomainError("no total-S3 sector " + std::to_string(twice_sz) + "/2");
  }
  auto& slot = sectors_[static_cast<std::size_t>((max - twice_sz) / 2)];
  if (!slot) slot.emplace(space_, twice_sz);
  return *slot;
}

std::uint64_t OperatorFactory::basis_dim(BasisTag basis) const {
  return basis.is_full() ? space_.dimension() : sector(basis.twice_sz).dimension();
}

OperatorHandle OperatorFactory::assemble(const OperatorSum& sum, BasisTag basis, std::string label) const {
  const bool full = basis.is_full();
  if (full && space_.dimension() > options_.max_full_dim) {
    throw CapacityError("full-space dimension " + std::to_string(space_.dimension()) + " exceeds cap " +
                      std::to_string(options_.max_full_dim));
  }
  const SectorBasis* sec = full ? nullptr : &sector(basis.twice_sz);
  const auto dim = static_cast<Eigen::Index>(full ? space_.dimension() : sec->dimension());

  struct PreparedFactor {
    std::size_t site;
    SparseColumns cols;
  };
  std::vector<std::pair<cplx, std::vector<PreparedFactor>>> prepared;
  prepared.reserve(sum.terms.size());
  for (const auto& t : sum.terms) {
    std::vector<PreparedFactor> fs;
    for (const auto& f : t.factors) fs.push_back(PreparedFactor{f.site, columns_of(f.op)});
    prepared.emplace_back(t.coeff, std::move(fs));
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * (prepared.size() / 2 + 2));
  std::vector<std::pair<std::uint64_t, cplx>> frontier, next, column;
  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint64_t source = full ? static_cast<std::uint64_t>(col) : sec->states()[col];
    if (sum.scalar != cplx{0.0, 0.0}) triplets.emplace_back(col, col, sum.scalar);
    column.clear();
    for (const auto& [coeff, factors] : prepared) {
      frontier.assign(1, {source, coeff});
      for (const auto& f : factors) {
        next.clear();
        for (const auto& [state, amp] : frontier) {
          const int k = space_.digit(state, f.site);
          for (const auto& [k2, v] : f.cols[k]) next.emplace_back(space_.with_digit(state, f.site, k2), amp * v);
        }
        frontier.swap(next);
        if (frontier.empty()) break;
      }
      column.insert(column.end(), frontier.begin(), frontier.end());
    }
    if (full) {
      for (const auto& [target, amp] : column) triplets.emplace_back(static_cast<Eigen::Index>(target), col, amp);
      continue;
    }
    // single terms may leave the sector (S1 S1, S2 S2); only their sum has to stay inside
    std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < column.size();) {
      const std::uint64_t target = column[i].first;
      cplx amp{0.0, 0.0};
      for (; i < column.size() && column[i].first == target; ++i) amp += column[i].second;
      auto row = sec->index_of(target);
      if (!row) {
        if (std::abs(amp) > 1e-14) {
          throw DomainError("operator '" + label + "' does not conserve total S3 in " + basis.describe());
        }
        continue;
      }
      triplets.emplace_back(static_cast<Eigen::Index>(*row), col, amp);
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return make_handle(std::move(m), basis, std::move(label));
}

DenseMatrix OperatorFactory::bond_axis1() const {
  if (!options_.inject_defect) return spins_.s1;
  return spins_.s1 + options_.defect_strength * spins_.s3;
}

OperatorHandle OperatorFactory::identity(BasisTag basis) const {
  OperatorSum s;
  s.scalar = 1.0;
  return assemble(s, basis, "identity");
}

OperatorHandle OperatorFactory::spin_op(std::size_t site, int axis, BasisTag basis) const {
  OperatorSum s;
  s.add(1.0, site, spins_.component(axis));
  return assemble(s, basis, "S" + std::to_string(axis) + "_" + std::to_string(site));
}

OperatorHandle OperatorFactory::total_spin(int axis, BasisTag basis) const {
  OperatorSum s;
  for (std::size_t i = 0; i < space_.num_sites(); ++i) s.add(1.0, i, spins_.component(axis));
  return assemble(s, basis, "sum_x S" + std::to_string(axis) + "_x");
}

OperatorHandle OperatorFactory::bond_dot(std::size_t a, std::size_t b, BasisTag basis) const {
  OperatorSum s;
  const DenseMatrix x = bond_axis1();
  s.add(1.0, a, x, b, x);
  s.add(1.0, a, spins_.s2, b, spins_.s2);
  s.add(1.0, a, spins_.s3, b, spins_.s3);
  return assemble(s, basis, "S_" + std::to_string(a) + ".S_" + std::to_string(b));
}

OperatorHandle OperatorFactory::heisenberg(BasisTag basis) const {
  OperatorSum s;
  const DenseMatrix x = bond_axis1();
  for (const auto& bond : lattice_->bonds()) {
    s.add(1.0, bond.a, x, bond.b, x);
    s.add(1.0, bond.a, spins_.s2, bond.b, spins_.s2);
    s.add(1.0, bond.a, spins_.s3, bond.b, spins_.s3);
  }
  return assemble(s, basis, "H0");
}

OperatorHandle OperatorFactory::hamiltonian(double B, BasisTag basis) const {
  OperatorSum s;
  const DenseMatrix x = bond_axis1();
  for (const auto& bond : lattice_->bonds()) {
    s.add(1.0, bond.a, x, bond.b, x);
    s.add(1.0, bond.a, spins_.s2, bond.b, spins_.s2);
    s.add(1.0, bond.a, spins_.s3, bond.b, spins_.s3);
  }
  if (B != 0.0) {
    for (const auto& site : lattice_->sites()) s.add(-B * site.sign, site.index, spins_.s3);
  }
  std::ostringstream label;
  label << "H(B=" << B << ")";
  return assemble(s, basis, label.str());
}

OperatorHandle OperatorFactory::order_parameter(const Region* region, BasisTag basis) const {
  OperatorSum s;
  if (region) {
    for (std::size_t i : region->sites) s.add(static_cast<double>(lattice_->site(i).sign), i, spins_.s3);
  } else {
    for (const auto& site : lattice_->sites()) s.add(static_cast<double>(site.sign), site.index, spins_.s3);
  }
  return assemble(s, basis, region ? "O(Omega_" + std::to_string(region->R) + ")" : "O(Lambda)");
}

OperatorHandle OperatorFactory::staggered_sy(const Region& region) const {
  OperatorSum s;
  const double w = 1.0 / static_cast<double>(region.sites.size());
  for (std::size_t i : region.sites) s.add(w * lattice_->site(i).sign, i, spins_.s2);
  return assemble(s, BasisTag::full(), "A_" + std::to_string(region.R));
}

BoundaryField OperatorFactory::boundary_field(const std::vector<double>& f) const {
  if (f.size() != lattice_->num_sites()) throw DomainError("field size does not match lattice");
  OperatorSum s;
  const DenseMatrix x = bond_axis1();
  double h2 = 0.0;
  for (const auto& bond : lattice_->bonds()) {
    const double w = f[bond.a] + f[bond.b];
    h2 += w * w;
    if (w == 0.0) continue;
    s.add(w, bond.a, x);
    s.add(w, bond.b, x);
  }
  return BoundaryField{assemble(s, BasisTag::full(), "H1'"), h2};
}

OperatorHandle OperatorFactory::field_hamiltonian(double B, const std::vector<double>& f) const {
  if (f.size() != lattice_->num_sites()) throw DomainError("field size does not match lattice");
  OperatorSum transverse;
  for (const auto& bond : lattice_->bonds()) {
    transverse.add(1.0, bond.a, spins_.s2, bond.b, spins_.s2);
    transverse.add(1.0, bond.a, spins_.s3, bond.b, spins_.s3);
  }
  for (const auto& site : lattice_->sites()) transverse.add(-B * site.sign, site.index, spins_.s3);
  SparseMatrix total = assemble(transverse, BasisTag::full(), "H(B,f) part").matrix;

  // (S1_x + S1_y + f_x + f_y)^2 - (S1_x)^2 - (S1_y)^2, squared as a matrix
  const DenseMatrix x = bond_axis1();
  for (const auto& bond : lattice_->bonds()) {
    OperatorSum shifted;
    shifted.add(1.0, bond.a, x);
    shifted.add(1.0, bond.b, x);
    shifted.scalar = f[bond.a] + f[bond.b];
    const SparseMatrix t = assemble(shifted, BasisTag::full(), "shift").matrix;
    OperatorSum xa, xb;
    xa.add(1.0, bond.a, x);
    xb.add(1.0, bond.b, x);
    const SparseMatrix ma = assemble(xa, BasisTag::full(), "xa").matrix;
    const SparseMatrix mb = assemble(xb, BasisTag::full(), "xb").matrix;
    SparseMatrix sq = t * t;
    SparseMatrix a2 = ma * ma;
    SparseMatrix b2 = mb * mb;
    total += 0.5 * (sq - a2 - b2);
  }
  std::ostringstream label;
  label << "H(B=" << B << ",f)";
  return make_handle(std::move(total), BasisTag::full(), label.str());
}

OperatorHandle OperatorFactory::fourier_spin(const Momentum& p, int axis) const {
  if (static_cast<int>(p.p.size()) != lattice_->dim()) throw DomainError("momentum rank mismatch");
  OperatorSum s;
  const double norm = 1.0 / std::sqrt(static_cast<double>(lattice_->num_sites()));
  const int L = lattice_->half_side();
  for (const auto& site : lattice_->sites()) {
    // phase = -p.x computed from the integer grid index to keep e^{-i pi x} exactly +-1
    long long numer = 0;
    for (int i = 0; i < lattice_->dim(); ++i) numer += static_cast<long long>(p.n[i]) * site.coords[i];
    long long r = numer % (2LL * L);
    if (r < 0) r += 2LL * L;
    cplx phase;
    if (r == 0) {
      phase = 1.0;
    } else if (2 * r == 2LL * L) {
      phase = -1.0;
    } else if (4 * r == 2LL * L) {
      phase = cplx{0.0, -1.0};
    } else if (4 * r == 6LL * L) {
      phase = cplx{0.0, 1.0};
    } else {
      const double angle = -std::numbers::pi * static_cast<double>(r) / L;
      phase = std::polar(1.0, angle);
    }
    s.add(norm * phase, site.index, spins_.component(axis));
  }
  std::ostringstream label;
  label << "S" << axis << "_p[";
  for (std::size_t i = 0; i < p.n.size(); ++i) label << (i ? "," : "") << p.n[i];
  label << "]";
  return assemble(s, BasisTag::full(), label.str());
}

OperatorHandle build_hamiltonian(const Lattice& lattice, double B, OperatorOptions options) {
  return OperatorFactory(lattice, options).hamiltonian(B);
}

OperatorHandle build_order_parameter(const Lattice& lattice, const Region* region, OperatorOptions options) {
  return OperatorFactory(lattice, options).order_parameter(region);
}

OperatorHandle build_staggered_sy(const Lattice& lattice, int R, bool allow_clip, OperatorOptions options) {
  return OperatorFactory(lattice, options).staggered_sy(region(lattice, R, allow_clip));
}

BoundaryField build_boundary_field(const Lattice& lattice, const RampField& f, OperatorOptions options) {
  return OperatorFactory(lattice, options).boundary_field(f.values);
}

OperatorHandle build_field_hamiltonian(const Lattice& lattice, double B, const std::vector<double>& f,
                                       OperatorOptions options) {
  return OperatorFactory(lattice, options).field_hamiltonian(B, f);
}

OperatorHandle fourier_spin(const Lattice& lattice, const std::vector<double>& p, int axis,
                            OperatorOptions options) {
  if (static_cast<int>(p.size()) != lattice.dim()) throw DomainError("momentum rank mismatch");
  std::vector<int> n(p.size());
  const int L = lattice.half_side();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double scaled = p[i] * L / std::numbers::pi;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9) throw DomainError("momentum is not on the lattice grid");
    int v = static_cast<int>(rounded);
    // fold into {-L+1, ..., L}
    v = ((v + L - 1) % (2 * L) + 2 * L) % (2 * L) - L + 1;
    n[i] = v;
  }
  return OperatorFactory(lattice, options).fourier_spin(momentum_at(lattice, n), axis);
}

namespace {

void require_same_basis(const OperatorHandle& a, const OperatorHandle& b) {
  if (!(a.basis == b.basis) || a.matrix.rows() != b.matrix.rows()) {
    throw DomainError("basis mismatch: " + a.label + " in " + a.basis.describe() + " vs " + b.label + " in " +
                      b.basis.describe());
  }
}

}  // namespace

OperatorHandle commutator(const OperatorHandle& a, const OperatorHandle& b) {
  require_same_basis(a, b);
  SparseMatrix ab = a.matrix * b.matrix;
  SparseMatrix ba = b.matrix * a.matrix;
  return make_handle(ab - ba, a.basis, "[" + a.label + "," + b.label + "]");
}

OperatorHandle adjoint(const OperatorHandle& a) {
  return make_handle(SparseMatrix(a.matrix.adjoint()), a.basis, a.label + "^dag");
}

OperatorHandle scaled(const OperatorHandle& a, cplx factor, std::string label) {
  return make_handle(factor * a.matrix, a.basis, std::move(label));
}

OperatorHandle sum(const OperatorHandle& a, const OperatorHandle& b, std::string label) {
  require_same_basis(a, b);
  return make_handle(a.matrix + b.matrix, a.basis, std::move(label));
}

OperatorHandle product(const OperatorHandle& a, const OperatorHandle& b, std::string label) {
  require_same_basis(a, b);
  return make_handle(a.matrix * b.matrix, a.basis, std::move(label));
}

double operator_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

double operator_norm(const OperatorHandle& a) { return operator_norm(DenseMatrix(a.matrix)); }

OperatorHandle restrict_to_sector(const OperatorFactory& factory, const OperatorHandle& full, int twice_sz) {
  if (!full.basis.is_full()) throw DomainError("restrict_to_sector expects a full-space operator");
  const SectorBasis& sec = factory.sector(twice_sz);
  const auto n = static_cast<Eigen::Index>(sec.dimension());
  std::vector<Eigen::Triplet<cplx>> trip;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = static_cast<Eigen::Index>(sec.states()[r]);
    for (SparseMatrix::InnerIterator it(full.matrix, row); it; ++it) {
      if (auto c = sec.index_of(static_cast<std::uint64_t>(it.col()))) {
        trip.emplace_back(r, static_cast<Eigen::Index>(*c), it.value());
      }
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return make_handle(std::move(m), BasisTag::sector(twice_sz), full.label);
}

double sector_leakage(const HilbertSpace& space, const SparseMatrix& full) {
  double leak = 0.0;
  for (int k = 0; k < full.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      if (space.twice_sz(static_cast<std::uint64_t>(it.row())) != space.twice_sz(static_cast<std::uint64_t>(it.col()))) {
        leak = std::max(leak, std::abs(it.value()));
      }
    }
  }
  return leak;
}

std::string to_triplet_text(const OperatorHandle& op) {
  std::ostringstream os;
  os.precision(17);
  os << "# label: " << op.label << "\n# basis: " << op.basis.describe() << "\n# dim: " << op.matrix.rows()
     << "\n# nnz: " << op.matrix.nonZeros() << "\n# row col re im\n";
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
  return os.str();
}

}  // namespace neelgap
