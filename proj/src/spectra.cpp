#include "neelgap/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace neelgap {

namespace {

EigenSystem dense_eigensystem(const SparseMatrix& m, BasisTag basis, const DiagonalizeOptions& options,
                              const std::string& label) {
  if (m.rows() > options.dense_cap) {
    throw CapacityError("dense cap exceeded diagonalizing '" + label + "' (dim " + std::to_string(m.rows()) + ")");
  }
  if (hermiticity_defect(m) > 1e-12) throw DomainError("cannot diagonalize non-Hermitian operator '" + label + "'");

  EigenSystem es;
  es.basis = basis;
  const DenseMatrix dense(m);
  if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.real());
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(dense);
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
  }
  return es;
}

}  // namespace

EigenSystem diagonalize(const OperatorHandle& op, DiagonalizeOptions options) {
  auto es = dense_eigensystem(op.matrix, op.basis, options, op.label);
  if (!op.basis.is_full()) es.sectors.assign(static_cast<std::size_t>(es.size()), op.basis.twice_sz);
  return es;
}

namespace {

EigenSystem merge_blocks(const OperatorFactory& factory, std::vector<std::pair<int, EigenSystem>>&& blocks) {
  const auto dim = static_cast<Eigen::Index>(factory.space().dimension());
  struct Entry {
    double value;
    int sector;
    Eigen::Index block;
    Eigen::Index column;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(dim));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& es = blocks[b].second;
    for (Eigen::Index c = 0; c < es.size(); ++c) {
      entries.push_back({es.values(c), blocks[b].first, static_cast<Eigen::Index>(b), c});
    }
  }
  // sectors are visited in descending 2Sz order, so ties keep a fixed order
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  EigenSystem out;
  out.basis = BasisTag::full();
  out.values.resize(dim);
  out.vectors = DenseMatrix::Zero(dim, dim);
  out.sectors.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto& e = entries[static_cast<std::size_t>(k)];
    out.values(k) = e.value;
    out.sectors[static_cast<std::size_t>(k)] = e.sector;
    const auto& sec = factory.sector(e.sector);
    const auto& col = blocks[static_cast<std::size_t>(e.block)].second.vectors.col(e.column);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      out.vectors(static_cast<Eigen::Index>(sec.states()[static_cast<std::size_t>(r)]), k) = col(r);
    }
  }
  return out;
}

}  // namespace

EigenSystem diagonalize_by_sector(const OperatorFactory& factory, double B, DiagonalizeOptions options) {
  std::vector<std::pair<int, EigenSystem>> blocks;
  for (int label : sector_labels(factory.space())) {
    blocks.emplace_back(label, diagonalize(factory.hamiltonian(B, BasisTag::sector(label)), options));
  }
  return merge_blocks(factory, std::move(blocks));
}

EigenSystem diagonalize_by_sector(const OperatorFactory& factory, const OperatorHandle& full,
                                  DiagonalizeOptions options) {
  if (!full.basis.is_full()) throw DomainError("expected a full-space operator");
  if (sector_leakage(factory.space(), full.matrix) > 1e-12) {
    throw DomainError("operator '" + full.label + "' does not conserve total S3");
  }
  std::vector<std::pair<int, EigenSystem>> blocks;
  for (int label : sector_labels(factory.space())) {
    blocks.emplace_back(label, diagonalize(restrict_to_sector(factory, full, label), options));
  }
  return merge_blocks(factory, std::move(blocks));
}

double max_residual(const OperatorHandle& op, const EigenSystem& es) {
  const DenseMatrix hv = op.matrix * es.vectors;
  const DenseMatrix lv = es.vectors * es.values.asDiagonal();
  return (hv - lv).colwise().norm().maxCoeff();
}

double orthonormality_defect(const EigenSystem& es) {
  const DenseMatrix g = es.vectors.adjoint() * es.vectors;
  return (g - DenseMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

std::string eigenvalues_csv(const EigenSystem& es) {
  std::ostringstream os;
  os.precision(17);
  os << "index,sector,value\n";
  for (Eigen::Index k = 0; k < es.size(); ++k) {
    os << k << ',';
    if (!es.sectors.empty()) os << es.sectors[static_cast<std::size_t>(k)] * 0.5;
    os << ',' << es.values(k) << '\n';
  }
  return os.str();
}

double default_degeneracy_tol(double E0) { return 1e-8 * std::max(1.0, std::abs(E0)); }

namespace {

int count_within(const Eigen::VectorXd& values, double tol) {
  int q = 0;
  while (q < values.size() && values(q) <= values(0) + tol) ++q;
  return q;
}

}  // namespace

GroundSector ground_sector(const EigenSystem& es, std::optional<double> tol) {
  if (es.size() == 0) throw DomainError("empty eigensystem");
  GroundSector gs;
  gs.E0 = es.values(0);
  gs.tol = tol.value_or(default_degeneracy_tol(gs.E0));
  gs.q = count_within(es.values, gs.tol);
  gs.near_degenerate = count_within(es.values, gs.tol * 10.0) != gs.q || count_within(es.values, gs.tol / 10.0) != gs.q;
  gs.basis = es.basis;
  gs.vectors = es.vectors.leftCols(gs.q);
  return gs;
}

DenseMatrix GroundSector::projector() const { return vectors * vectors.adjoint(); }

DenseMatrix GroundSector::excited_projector() const {
  return DenseMatrix::Identity(vectors.rows(), vectors.rows()) - projector();
}

cplx ground_expectation(const GroundSector& gs, const OperatorHandle& op) {
  if (!(op.basis == gs.basis) || op.matrix.rows() != gs.vectors.rows()) {
    throw DomainError("basis mismatch between ground sector and '" + op.label + "'");
  }
  const DenseMatrix av = op.matrix * gs.vectors;
  return (gs.vectors.adjoint() * av).trace() / static_cast<double>(gs.q);
}

cplx ground_expectation(const GroundSector& gs, const DenseMatrix& op) {
  if (op.rows() != gs.vectors.rows()) throw DomainError("dimension mismatch in ground expectation");
  return (gs.vectors.adjoint() * op * gs.vectors).trace() / static_cast<double>(gs.q);
}

SpectralFunction power_function(double a) {
  return [a](double s) {
    if (a == 0.0) return 1.0;
    if (s <= 0.0) return a > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(s, a);
  };
}

namespace {

Eigen::VectorXd spectral_weights(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                                 bool excited_only) {
  if (es.vectors.rows() != gs.vectors.rows()) throw DomainError("ground sector does not match eigensystem");
  Eigen::VectorXd w(es.size());
  for (Eigen::Index n = 0; n < es.size(); ++n) {
    if (excited_only && n < gs.q) {
      w(n) = 0.0;
      continue;
    }
    const double s = n < gs.q ? 0.0 : es.values(n) - gs.E0;
    w(n) = phi(s);
    if (!std::isfinite(w(n))) {
      throw DomainError("spectral function is singular at retained excitation energy " + std::to_string(s));
    }
  }
  return w;
}

}  // namespace

DenseMatrix spectral_matrix(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                            bool excited_only) {
  const Eigen::VectorXd w = spectral_weights(es, gs, phi, excited_only);
  return es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

DenseVector spectral_apply(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                           const DenseVector& v, bool excited_only) {
  const Eigen::VectorXd w = spectral_weights(es, gs, phi, excited_only);
  const DenseVector coeffs = es.vectors.adjoint() * v;
  return es.vectors * (w.cast<cplx>().array() * coeffs.array()).matrix();
}

DenseMatrix spectral_apply(const EigenSystem& es, const GroundSector& gs, const SpectralFunction& phi,
                           const DenseMatrix& op, bool excited_only) {
  const Eigen::VectorXd w = spectral_weights(es, gs, phi, excited_only);
  return es.vectors * (w.cast<cplx>().asDiagonal() * (es.vectors.adjoint() * op));
}

EnergyFrame::EnergyFrame(const EigenSystem& es, const GroundSector& gs) : es_(&es), gs_(&gs) {
  if (es.vectors.rows() != gs.vectors.rows()) throw DomainError("ground sector does not match eigensystem");
}

DenseMatrix EnergyFrame::transform(const OperatorHandle& op) const {
  if (!(op.basis == es_->basis)) throw DomainError("basis mismatch transforming '" + op.label + "'");
  const DenseMatrix av = op.matrix * es_->vectors;
  return es_->vectors.adjoint() * av;
}

DenseMatrix EnergyFrame::transform(const DenseMatrix& op) const { return es_->vectors.adjoint() * op * es_->vectors; }

cplx EnergyFrame::sandwich(const DenseMatrix& left, const SpectralFunction& phi, const DenseMatrix& right,
                           bool excited_only) const {
  const Eigen::VectorXd w = spectral_weights(*es_, *gs_, phi, excited_only);
  cplx total{0.0, 0.0};
  for (int g = 0; g < gs_->q; ++g) {
    for (Eigen::Index n = 0; n < dim(); ++n) {
      if (w(n) == 0.0) continue;
      total += left(g, n) * w(n) * right(n, g);
    }
  }
  return total / static_cast<double>(gs_->q);
}

double kappa_argmax(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("kappa requires 0 < epsilon < 1/2");
  return std::pow(1.0 - 2.0 * epsilon, 1.0 / (2.0 * epsilon));
}

double kappa(double epsilon) {
  const double t = kappa_argmax(epsilon);
  return std::pow(t, 1.0 - 2.0 * epsilon) - t;
}

DenseMatrix filtered_energy_matrix(const EigenSystem& es, const SpectralFunction& g_hat, const DenseMatrix& A_energy) {
  if (A_energy.rows() != es.size()) throw DomainError("operator does not match eigensystem");
  DenseMatrix out(A_energy.rows(), A_energy.cols());
  for (Eigen::Index n = 0; n < A_energy.cols(); ++n) {
    for (Eigen::Index m = 0; m < A_energy.rows(); ++m) {
      out(m, n) = g_hat(es.values(m) - es.values(n)) * A_energy(m, n);
    }
  }
  return out;
}

OperatorHandle filtered_operator(const EigenSystem& es, const SpectralFunction& g_hat, const OperatorHandle& A) {
  if (!(A.basis == es.basis)) throw DomainError("basis mismatch filtering '" + A.label + "'");
  const DenseMatrix a_e = es.vectors.adjoint() * (A.matrix * es.vectors);
  const DenseMatrix f_e = filtered_energy_matrix(es, g_hat, a_e);
  const DenseMatrix back = es.vectors * f_e * es.vectors.adjoint();
  SparseMatrix m = back.sparseView(1.0, 1e-15);
  return make_handle(std::move(m), A.basis, "tau_g(" + A.label + ")");
}

}  // namespace neelgap
