#pragma once

#include <Eigen/Dense>

namespace liegram {

/// Numerical-rank convention shared by every rank, null-space and span
/// computation: a singular value counts as zero when it is at most
/// max(absolute_floor, max(rows, cols) * eps * sigma_max).
struct RankTolerance {
  double absolute_floor = 1e-9;

  double threshold(double sigma_max, Eigen::Index rows, Eigen::Index cols) const;
};

/// Linear subspace of R^n held as an orthonormal basis (n x r).
class Subspace {
 public:
  explicit Subspace(Eigen::Index ambient_dim = 0);

  // Column space of `columns`, orthonormalized through an SVD.
  static Subspace span_of(const Eigen::MatrixXd& columns, const RankTolerance& tol = {});
  static Subspace full(Eigen::Index ambient_dim);
  // Caller guarantees orthonormal columns.
  static Subspace from_orthonormal(Eigen::MatrixXd basis, double threshold = 0.0);

  // Span of this subspace plus `columns`. Re-orthonormalizes the whole
  // stack with one SVD rather than Gram-Schmidt.
  Subspace extended(const Eigen::MatrixXd& columns, const RankTolerance& tol = {}) const;

  Eigen::Index dim() const { return basis_.cols(); }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  // Singular-value threshold used when the basis was extracted.
  double threshold() const { return threshold_; }

  Eigen::MatrixXd projector() const;
  // (I - P) * columns.
  Eigen::MatrixXd residual(const Eigen::MatrixXd& columns) const;
  Subspace orthogonal_complement() const;

 private:
  Eigen::MatrixXd basis_;
  double threshold_ = 0.0;
};

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

// Largest singular value; 0 for empty matrices.
double spectral_norm(const Eigen::MatrixXd& m);

double min_eigenvalue(const Eigen::MatrixXd& sym);
double max_eigenvalue(const Eigen::MatrixXd& sym);

// log det of a symmetric positive-definite matrix via Cholesky. Throws
// NumericalError if the factorization fails.
double log_det_spd(const Eigen::MatrixXd& spd);

// Numerical rank of a symmetric PSD matrix under `tol`.
Eigen::Index psd_rank(const Eigen::MatrixXd& sym, const RankTolerance& tol = {});

// Orthonormal basis of the (numerical) kernel of a symmetric PSD matrix.
Subspace psd_kernel(const Eigen::MatrixXd& sym, const RankTolerance& tol = {});

}  // namespace liegram
