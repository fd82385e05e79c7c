#include "liegram/gramian.hpp"

#include "liegram/errors.hpp"

namespace liegram {

namespace {

void check_horizon(const ErrorSystem& sys, std::size_t T) {
  if (T < 1) throw InputError("horizon T must be at least 1");
  if (T > sys.horizon() + 1) {
    throw InputError("horizon T = " + std::to_string(T) + " exceeds the system horizon " +
                     std::to_string(sys.horizon()) + " + 1");
  }
}

std::size_t measured_factor(const Channel& channel) {
  if (!channel.factor()) throw InputError("channel '" + channel.name() + "' is not factor-local");
  return *channel.factor();
}

}  // namespace

std::string_view to_string(CouplingVerdict v) {
  switch (v) {
    case CouplingVerdict::none: return "none";
    case CouplingVerdict::partial: return "partial";
    case CouplingVerdict::full: return "full";
  }
  return "?";
}

Gramian gramian(const ErrorSystem& sys, std::span<const Channel> channels, std::size_t T) {
  check_horizon(sys, T);
  const Eigen::Index n = sys.dim();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& phi = sys.transition_from_start(t);
    W.noalias() += phi.transpose() * spatial_information(channels, n, t) * phi;
  }
  return {symmetrized(W), T, channels.size()};
}

Eigen::MatrixXd observation_coupling(const ErrorSystem& sys, std::size_t measured, std::size_t target,
                                     std::size_t t) {
  return sys.cross_block(measured, target, t);
}

Eigen::MatrixXd gramian_block(const ErrorSystem& sys, const Channel& channel, std::size_t j, std::size_t T) {
  check_horizon(sys, T);
  const std::size_t i = measured_factor(channel);
  const Eigen::Index dj = sys.factors().dim(j);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dj, dj);
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd C = observation_coupling(sys, i, j, t);
    const Eigen::MatrixXd HC = channel.local_H(t) * C;
    G.noalias() += HC.transpose() * channel.R_inverse() * HC;
  }
  return symmetrized(G);
}

Eigen::MatrixXd excitation_gramian(const ErrorSystem& sys, const Channel& channel, std::size_t T) {
  const std::size_t i = measured_factor(channel);
  return gramian_block(sys, channel, i, T);
}

bool is_persistently_exciting(const ErrorSystem& sys, const Channel& channel, std::size_t T,
                              std::optional<double> threshold) {
  const Eigen::MatrixXd G = excitation_gramian(sys, channel, T);
  const double thr = threshold.value_or(1e-9 * G.trace());
  return min_eigenvalue(G) > thr;
}

CrossFactorAnalysis cross_factor_analysis(const ErrorSystem& sys, const Channel& channel, std::size_t j,
                                          std::size_t T, const RankTolerance& tol) {
  check_horizon(sys, T);
  const std::size_t i = measured_factor(channel);
  const Eigen::Index dj = sys.factors().dim(j);

  CrossFactorAnalysis out;
  out.measured_factor = i;
  out.target_factor = j;
  out.horizon = T;

  Subspace reachable(dj);
  for (std::size_t t = 0; t < T; ++t) {
    reachable = reachable.extended(observation_coupling(sys, i, j, t).transpose(), tol);
  }
  out.reachable = reachable;
  out.verdict = reachable.is_zero()  ? CouplingVerdict::none
                : reachable.is_full() ? CouplingVerdict::full
                                      : CouplingVerdict::partial;

  out.block_gramian = gramian_block(sys, channel, j, T);
  const Eigen::MatrixXd& B = reachable.basis();
  out.restricted_gramian = symmetrized(B.transpose() * out.block_gramian * B);
  if (!reachable.is_zero()) {
    out.restricted_min_eigenvalue = min_eigenvalue(out.restricted_gramian);
    const double thr = tol.threshold(max_eigenvalue(out.block_gramian), dj, dj);
    out.positive_on_reachable = out.restricted_min_eigenvalue > thr;
  }

  const Eigen::MatrixXd E = excitation_gramian(sys, channel, T);
  out.persistently_exciting = min_eigenvalue(E) > 1e-9 * E.trace();
  if (out.persistently_exciting) {
    out.unexcited = Subspace(sys.factors().dim(i));
  } else {
    out.unexcited = psd_kernel(E, RankTolerance{std::max(tol.absolute_floor, 1e-9 * E.trace())});
    out.warnings.push_back("channel '" + channel.name() + "' is not persistently exciting on factor " +
                           std::to_string(i) + " over horizon " + std::to_string(T) + " (" +
                           std::to_string(out.unexcited.dim()) +
                           " unexcited directions); positive definiteness on the reachable subspace is not "
                           "guaranteed");
  }
  return out;
}

std::optional<std::size_t> observability_index(const ErrorSystem& sys, const Channel& channel, std::size_t j,
                                               std::size_t T_max, const RankTolerance& tol) {
  if (T_max < 1) throw InputError("T_max must be at least 1");
  check_horizon(sys, T_max);
  const std::size_t i = measured_factor(channel);
  Subspace reachable(sys.factors().dim(j));
  for (std::size_t T = 1; T <= T_max; ++T) {
    reachable = reachable.extended(observation_coupling(sys, i, j, T - 1).transpose(), tol);
    if (reachable.is_full()) return T;
  }
  return std::nullopt;
}

Subspace unobservable_subspace(const Gramian& W, const RankTolerance& tol) { return psd_kernel(W.W, tol); }

}  // namespace liegram
