#pragma once

#include "liegram/error_system.hpp"
#include "liegram/gramian.hpp"
#include "liegram/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liegram {

/// Span of the propagated measurement rows Phi(t,0)^T H_t^(k)T over t < T
/// and the contributing channels.
struct PropagatedSubspace {
  Subspace span;
  std::size_t horizon = 0;
  std::vector<std::string> channels;
};

// Stacked Phi(t,0)^T H_t^T for t < T: an n x (p*T) matrix.
Eigen::MatrixXd propagated_rows(const ErrorSystem& sys, const Channel& channel, std::size_t T);

// Empty subspace over the system's algebra at horizon T.
PropagatedSubspace empty_propagated_subspace(const ErrorSystem& sys, std::size_t T);

// One fold step: S with `channel` added.
PropagatedSubspace with_channel(const ErrorSystem& sys, PropagatedSubspace S, const Channel& channel,
                                const RankTolerance& tol = {});

PropagatedSubspace propagated_subspace(const ErrorSystem& sys, std::span<const Channel> channels,
                                       std::size_t T, const RankTolerance& tol = {});

enum class DiversityVerdict { redundant, gain };
std::string_view to_string(DiversityVerdict v);

struct DiversityCheck {
  DiversityVerdict verdict = DiversityVerdict::redundant;
  // Orthonormalized innovation directions; empty when redundant.
  Subspace innovation;
  // Spectral norm of (I - P_S) applied to the candidate's propagated rows.
  double innovation_norm = 0.0;
  double epsilon = 0.0;
  // Innovation dimension of the raw rows H_t^T alone (no propagation).
  Eigen::Index raw_innovation_dim = 0;
};

// Structural diversity check of `candidate` against S.
//
// The candidate rows are transported the same way the existing channels
// were, i.e. the innovation is (I - P_S) [Phi(t,0)^T H_t^T]_{t < S.horizon}.
// When S is invariant under Phi(t,0)^T this coincides with testing the raw
// H^T alone. Default epsilon: 1e-8 * sigma_max of the stacked candidate rows.
DiversityCheck diversity_check(const ErrorSystem& sys, const PropagatedSubspace& S, const Channel& candidate,
                               std::optional<double> epsilon = std::nullopt);

enum class IncrementVerdict { unchanged, rank_increase, eigenvalue_increase };
std::string_view to_string(IncrementVerdict v);

struct GramianIncrement {
  // sum_t Phi^T H^T R^-1 H Phi for the candidate alone.
  Eigen::MatrixXd delta;
  IncrementVerdict verdict = IncrementVerdict::unchanged;
  Eigen::Index rank_before = 0;
  Eigen::Index rank_after = 0;
  // Largest eigenvalue of N^T delta N over an orthonormal kernel basis N of
  // the base Gramian.
  double kernel_gain = 0.0;
};

// Unchanged iff the candidate leaves the kernel of the base Gramian intact;
// rank_increase iff the numerical rank grows; eigenvalue_increase when the
// kernel quadratic form becomes positive without a counted rank change.
GramianIncrement gramian_increment(const ErrorSystem& sys, std::span<const Channel> base, const Channel& candidate,
                                   std::size_t T, const RankTolerance& tol = {});

// Greedy pass over candidates in order: keep each one that passes the
// diversity check against the span built so far. Returns kept indices.
std::vector<std::size_t> greedy_selection(const ErrorSystem& sys, std::span<const Channel> base,
                                          std::span<const Channel> candidates, std::size_t T,
                                          const RankTolerance& tol = {});

}  // namespace liegram
