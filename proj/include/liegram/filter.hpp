#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace liegram {

/// Gaussian belief over the algebra error: covariance P (SPD) at time t.
class BeliefState {
 public:
  // Throws NumericalError unless P is symmetric positive definite.
  static BeliefState from_covariance(const Eigen::MatrixXd& P, std::size_t t = 0);

  const Eigen::MatrixXd& covariance() const { return P_; }
  std::size_t time() const { return t_; }
  // 2 * sum log diag(chol(P)).
  double log_det() const { return log_det_; }
  Eigen::MatrixXd information() const;
  double min_eigenvalue() const;
  // lambda_min(P^-1) = 1 / lambda_max(P).
  double min_information_eigenvalue() const;

 private:
  BeliefState(Eigen::MatrixXd P, Eigen::MatrixXd L, double log_det, std::size_t t)
      : P_(std::move(P)), L_(std::move(L)), log_det_(log_det), t_(t) {}
  friend struct BeliefAccess;

  Eigen::MatrixXd P_;
  Eigen::MatrixXd L_;  // lower Cholesky factor of P_
  double log_det_ = 0.0;
  std::size_t t_ = 0;
};

// P_{t+1|t} = F P F^T + Q. Advances time by one.
BeliefState predict(const BeliefState& belief, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q);

// Information-form update J_post = P_prior^-1 + S, solved through Cholesky.
BeliefState update(const BeliefState& prior, const Eigen::MatrixXd& S);

/// Split of one step's log-volume change into a process-noise (temporal)
/// term and a measurement (spatial) term.
///
///   temporal = log det(I + Q (F P F^T)^-1)
///   spatial  = log det(I + P_{t+1|t} S)
///
/// With det F = 1, log det P_{t+1} - log det P_t = temporal - spatial holds
/// exactly. The *_current variants evaluate the same expressions against
/// the pre-step covariance P_t instead (log det(I + Q P_t^-1) and
/// log det(I + P_t S)); they are reported for comparison and are not
/// additive in general.
struct DecompositionRecord {
  double temporal = 0.0;
  double spatial = 0.0;
  // Direct difference of the two posterior log-dets.
  double delta_log_det = 0.0;
  // delta_log_det - (temporal - spatial).
  double residual = 0.0;
  double det_F = 1.0;
  // |det F - 1| > 1e-6: the split is not an identity for this step.
  bool approximate = false;
  double temporal_current = 0.0;
  double spatial_current = 0.0;
};

struct FilterStep {
  BeliefState posterior;
  DecompositionRecord record;
};

FilterStep step_with_decomposition(const BeliefState& belief, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& S);

/// Information-form recursion, kept as an independent route to the same
/// posteriors.
struct InformationState {
  Eigen::MatrixXd J;
  std::size_t t = 0;
};

// J_{t+1|t} = (I + Jbar Q)^-1 Jbar with Jbar = F^-T J F^-1. Q may be
// singular; F must be invertible.
InformationState predict_information(const InformationState& state, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q);
InformationState update_information(const InformationState& prior, const Eigen::MatrixXd& S);

}  // namespace liegram
