#include "liegram/linalg.hpp"

#include "liegram/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liegram {

double RankTolerance::threshold(double sigma_max, Eigen::Index rows, Eigen::Index cols) const {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::max(absolute_floor, static_cast<double>(std::max(rows, cols)) * eps * sigma_max);
}

Subspace::Subspace(Eigen::Index ambient_dim) : basis_(ambient_dim, 0) {}

Subspace Subspace::span_of(const Eigen::MatrixXd& columns, const RankTolerance& tol) {
  const Eigen::Index n = columns.rows();
  Subspace s(n);
  if (columns.cols() == 0 || n == 0) {
    s.threshold_ = tol.absolute_floor;
    return s;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double thr = tol.threshold(sv.size() > 0 ? sv(0) : 0.0, columns.rows(), columns.cols());
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  s.basis_ = svd.matrixU().leftCols(r);
  s.threshold_ = thr;
  return s;
}

Subspace Subspace::full(Eigen::Index ambient_dim) {
  return from_orthonormal(Eigen::MatrixXd::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::from_orthonormal(Eigen::MatrixXd basis, double threshold) {
  Subspace s(basis.rows());
  s.basis_ = std::move(basis);
  s.threshold_ = threshold;
  return s;
}

Subspace Subspace::extended(const Eigen::MatrixXd& columns, const RankTolerance& tol) const {
  if (columns.rows() != ambient_dim()) throw InputError("Subspace::extended: ambient dimension mismatch");
  if (columns.cols() == 0) return *this;
  Eigen::MatrixXd stack(ambient_dim(), dim() + columns.cols());
  stack << basis_, columns;
  return span_of(stack, tol);
}

Eigen::MatrixXd Subspace::projector() const { return basis_ * basis_.transpose(); }

Eigen::MatrixXd Subspace::residual(const Eigen::MatrixXd& columns) const {
  if (columns.rows() != ambient_dim()) throw InputError("Subspace::residual: ambient dimension mismatch");
  return columns - basis_ * (basis_.transpose() * columns);
}

Subspace Subspace::orthogonal_complement() const {
  const Eigen::Index n = ambient_dim();
  if (dim() == 0) return full(n);
  if (dim() == n) return Subspace(n);
  // Full QR of the basis: trailing columns of Q span the complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return from_orthonormal(Q.rightCols(n - dim()), threshold_);
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double log_det_spd(const Eigen::MatrixXd& spd) {
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  const auto d = llt.matrixLLT().diagonal();
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw NumericalError("matrix is not positive definite");
    s += std::log(d(i));
  }
  return 2.0 * s;
}

Eigen::Index psd_rank(const Eigen::MatrixXd& sym, const RankTolerance& tol) {
  const Eigen::Index n = sym.rows();
  return n - psd_kernel(sym, tol).dim();
}

Subspace psd_kernel(const Eigen::MatrixXd& sym, const RankTolerance& tol) {
  const Eigen::Index n = sym.rows();
  if (n == 0) return Subspace(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(sym));
  const auto& ev = es.eigenvalues();
  const double top = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  const double thr = tol.threshold(top, n, n);
  Eigen::Index k = 0;
  while (k < n && ev(k) <= thr) ++k;
  return Subspace::from_orthonormal(es.eigenvectors().leftCols(k), thr);
}

}  // namespace liegram
