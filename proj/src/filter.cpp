#include "liegram/filter.hpp"

#include "liegram/errors.hpp"
#include "liegram/linalg.hpp"

#include <cmath>

namespace liegram {

namespace {

constexpr double kUnimodularTol = 1e-6;

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& spd, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) throw NumericalError(std::string(what) + " is not positive definite");
  }
  return L;
}

double log_det_from_factor(const Eigen::MatrixXd& L) {
  return 2.0 * L.diagonal().array().log().sum();
}

// log det(I + L^-1 A L^-T) for SPD L L^T and symmetric PSD A.
double log_det_whitened(const Eigen::MatrixXd& L, const Eigen::MatrixXd& A) {
  const auto tri = L.triangularView<Eigen::Lower>();
  Eigen::MatrixXd X = tri.solve(A);
  X = tri.solve(X.transpose()).transpose();
  const Eigen::Index n = L.rows();
  return log_det_spd(symmetrized(Eigen::MatrixXd::Identity(n, n) + X));
}

// log det(I + L^T S L) = log det(I + P S) for P = L L^T.
double log_det_congruent(const Eigen::MatrixXd& L, const Eigen::MatrixXd& S) {
  const Eigen::Index n = L.rows();
  return log_det_spd(symmetrized(Eigen::MatrixXd::Identity(n, n) + L.transpose() * S * L));
}

}  // namespace

struct BeliefAccess {
  static BeliefState make(const Eigen::MatrixXd& P, std::size_t t) {
    if (P.rows() != P.cols() || P.rows() == 0) throw InputError("covariance must be square and non-empty");
    if (!P.allFinite()) throw NumericalError("covariance has non-finite entries");
    Eigen::MatrixXd sym = symmetrized(P);
    Eigen::MatrixXd L = cholesky_lower(sym, "covariance");
    const double ld = log_det_from_factor(L);
    return BeliefState(std::move(sym), std::move(L), ld, t);
  }
  static const Eigen::MatrixXd& factor(const BeliefState& b) { return b.L_; }
};

BeliefState BeliefState::from_covariance(const Eigen::MatrixXd& P, std::size_t t) {
  return BeliefAccess::make(P, t);
}

Eigen::MatrixXd BeliefState::information() const {
  const Eigen::Index n = P_.rows();
  const auto tri = L_.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd Linv = tri.solve(Eigen::MatrixXd::Identity(n, n));
  return symmetrized(Linv.transpose() * Linv);
}

double BeliefState::min_eigenvalue() const { return liegram::min_eigenvalue(P_); }

double BeliefState::min_information_eigenvalue() const { return 1.0 / max_eigenvalue(P_); }

BeliefState predict(const BeliefState& belief, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = belief.covariance().rows();
  if (F.rows() != n || F.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw InputError("predict: F and Q must be n x n");
  }
  const Eigen::MatrixXd prior = F * belief.covariance() * F.transpose() + Q;
  return BeliefAccess::make(prior, belief.time() + 1);
}

BeliefState update(const BeliefState& prior, const Eigen::MatrixXd& S) {
  const Eigen::Index n = prior.covariance().rows();
  if (S.rows() != n || S.cols() != n) throw InputError("update: S must be n x n");
  const Eigen::MatrixXd J = prior.information() + symmetrized(S);
  Eigen::LLT<Eigen::MatrixXd> llt(J);
  if (llt.info() != Eigen::Success) throw NumericalError("posterior information is not positive definite");
  return BeliefAccess::make(llt.solve(Eigen::MatrixXd::Identity(n, n)), prior.time());
}

FilterStep step_with_decomposition(const BeliefState& belief, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& S) {
  DecompositionRecord rec;
  rec.det_F = F.partialPivLu().determinant();
  rec.approximate = !(std::abs(rec.det_F - 1.0) <= kUnimodularTol);

  const Eigen::MatrixXd& L = BeliefAccess::factor(belief);
  rec.temporal_current = log_det_whitened(L, Q);
  rec.spatial_current = log_det_congruent(L, S);

  Eigen::LLT<Eigen::MatrixXd> transported(symmetrized(F * belief.covariance() * F.transpose()));
  if (transported.info() == Eigen::Success) {
    rec.temporal = log_det_whitened(transported.matrixL(), Q);
  } else {
    // Singular F: no exact split exists.
    rec.temporal = rec.temporal_current;
    rec.approximate = true;
  }

  BeliefState prior = predict(belief, F, Q);
  rec.spatial = log_det_congruent(BeliefAccess::factor(prior), S);
  BeliefState posterior = update(prior, S);

  rec.delta_log_det = posterior.log_det() - belief.log_det();
  rec.residual = rec.delta_log_det - (rec.temporal - rec.spatial);
  return {std::move(posterior), rec};
}

InformationState predict_information(const InformationState& state, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q) {
  const Eigen::Index n = state.J.rows();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(F);
  if (!lu.isInvertible()) throw NumericalError("information-form prediction needs an invertible F");
  const Eigen::MatrixXd Finv = lu.inverse();
  const Eigen::MatrixXd Jbar = symmetrized(Finv.transpose() * state.J * Finv);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + Jbar * Q;
  return {symmetrized(M.partialPivLu().solve(Jbar)), state.t + 1};
}

InformationState update_information(const InformationState& prior, const Eigen::MatrixXd& S) {
  return {symmetrized(prior.J + S), prior.t};
}

}  // namespace liegram
