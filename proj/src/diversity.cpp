#include "liegram/diversity.hpp"

#include "liegram/errors.hpp"

namespace liegram {

std::string_view to_string(DiversityVerdict v) {
  return v == DiversityVerdict::redundant ? "redundant" : "gain";
}

std::string_view to_string(IncrementVerdict v) {
  switch (v) {
    case IncrementVerdict::unchanged: return "unchanged";
    case IncrementVerdict::rank_increase: return "rank_increase";
    case IncrementVerdict::eigenvalue_increase: return "eigenvalue_increase";
  }
  return "?";
}

Eigen::MatrixXd propagated_rows(const ErrorSystem& sys, const Channel& channel, std::size_t T) {
  if (T < 1) throw InputError("horizon T must be at least 1");
  if (T > sys.horizon() + 1) throw InputError("horizon T exceeds the system horizon + 1");
  if (channel.state_dim() != sys.dim()) {
    throw InputError("channel '" + channel.name() + "' does not match the state dimension");
  }
  const Eigen::Index p = channel.measurement_dim();
  Eigen::MatrixXd rows(sys.dim(), p * static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    rows.middleCols(p * static_cast<Eigen::Index>(t), p) =
        sys.transition_from_start(t).transpose() * channel.H(t).transpose();
  }
  return rows;
}

PropagatedSubspace empty_propagated_subspace(const ErrorSystem& sys, std::size_t T) {
  if (T < 1) throw InputError("horizon T must be at least 1");
  return {Subspace(sys.dim()), T, {}};
}

PropagatedSubspace with_channel(const ErrorSystem& sys, PropagatedSubspace S, const Channel& channel,
                                const RankTolerance& tol) {
  S.span = S.span.extended(propagated_rows(sys, channel, S.horizon), tol);
  S.channels.push_back(channel.name());
  return S;
}

PropagatedSubspace propagated_subspace(const ErrorSystem& sys, std::span<const Channel> channels,
                                       std::size_t T, const RankTolerance& tol) {
  PropagatedSubspace S = empty_propagated_subspace(sys, T);
  for (const auto& c : channels) S = with_channel(sys, std::move(S), c, tol);
  return S;
}

DiversityCheck diversity_check(const ErrorSystem& sys, const PropagatedSubspace& S, const Channel& candidate,
                               std::optional<double> epsilon) {
  if (S.span.ambient_dim() != sys.dim()) throw InputError("propagated subspace does not match the system");
  const Eigen::MatrixXd rows = propagated_rows(sys, candidate, S.horizon);

  DiversityCheck out;
  out.epsilon = epsilon.value_or(1e-8 * spectral_norm(rows));
  const Eigen::MatrixXd innovation = S.span.residual(rows);
  out.innovation_norm = spectral_norm(innovation);

  // Innovation directions: singular directions of the residual above epsilon.
  auto directions = [&](const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return Subspace(sys.dim());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    Eigen::Index r = 0;
    while (r < svd.singularValues().size() && svd.singularValues()(r) > out.epsilon) ++r;
    return Subspace::from_orthonormal(svd.matrixU().leftCols(r), out.epsilon);
  };

  if (out.innovation_norm > out.epsilon) {
    out.verdict = DiversityVerdict::gain;
    out.innovation = directions(innovation);
  } else {
    out.verdict = DiversityVerdict::redundant;
    out.innovation = Subspace(sys.dim());
  }

  const Eigen::Index p = candidate.measurement_dim();
  Eigen::MatrixXd raw(sys.dim(), p * static_cast<Eigen::Index>(S.horizon));
  for (std::size_t t = 0; t < S.horizon; ++t) {
    raw.middleCols(p * static_cast<Eigen::Index>(t), p) = candidate.H(t).transpose();
  }
  out.raw_innovation_dim = directions(S.span.residual(raw)).dim();
  return out;
}

GramianIncrement gramian_increment(const ErrorSystem& sys, std::span<const Channel> base, const Channel& candidate,
                                   std::size_t T, const RankTolerance& tol) {
  const Gramian before = gramian(sys, base, T);
  const Gramian delta = gramian(sys, std::span<const Channel>(&candidate, 1), T);
  const Eigen::MatrixXd after = before.W + delta.W;

  GramianIncrement out;
  out.delta = delta.W;
  out.rank_before = psd_rank(before.W, tol);
  out.rank_after = psd_rank(after, tol);

  const Subspace kernel = unobservable_subspace(before, tol);
  if (!kernel.is_zero()) {
    const Eigen::MatrixXd& N = kernel.basis();
    out.kernel_gain = max_eigenvalue(symmetrized(N.transpose() * delta.W * N));
  }
  const double thr = tol.threshold(max_eigenvalue(after), sys.dim(), sys.dim());
  if (kernel.is_zero() || out.kernel_gain <= thr) {
    out.verdict = IncrementVerdict::unchanged;
  } else if (out.rank_after > out.rank_before) {
    out.verdict = IncrementVerdict::rank_increase;
  } else {
    out.verdict = IncrementVerdict::eigenvalue_increase;
  }
  return out;
}

std::vector<std::size_t> greedy_selection(const ErrorSystem& sys, std::span<const Channel> base,
                                          std::span<const Channel> candidates, std::size_t T,
                                          const RankTolerance& tol) {
  PropagatedSubspace S = propagated_subspace(sys, base, T, tol);
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (diversity_check(sys, S, candidates[k]).verdict == DiversityVerdict::gain) {
      S = with_channel(sys, std::move(S), candidates[k], tol);
      kept.push_back(k);
    }
  }
  return kept;
}

}  // namespace liegram
