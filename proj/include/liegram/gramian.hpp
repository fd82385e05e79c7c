#pragma once

#include "liegram/error_system.hpp"
#include "liegram/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liegram {

struct Gramian {
  Eigen::MatrixXd W;
  std::size_t horizon = 0;
  std::size_t channel_count = 0;
};

// W_o(T) = sum_{t<T} Phi(t,0)^T S_t Phi(t,0). Requires 1 <= T <= horizon + 1.
Gramian gramian(const ErrorSystem& sys, std::span<const Channel> channels, std::size_t T);

// Block of Phi(t, 0) through which errors in factor j reach the factor i
// that a channel local to i measures: Pi_i Phi(t,0) iota_j (d_i x d_j).
// The j-block of that channel's Gramian is driven entirely by it.
Eigen::MatrixXd observation_coupling(const ErrorSystem& sys, std::size_t measured, std::size_t target,
                                     std::size_t t);

// Factor-j block of a factor-local channel's Gramian, assembled from the
// coupling blocks without forming the full Gramian:
//   sum_t C_t^T H~_t^T R^-1 H~_t C_t,  C_t = observation_coupling(i, j, t).
// Throws InputError if the channel is not factor-local.
Eigen::MatrixXd gramian_block(const ErrorSystem& sys, const Channel& channel, std::size_t j, std::size_t T);

// sum_{t<T} Phi_ii(t,0)^T H~_t^T R^-1 H~_t Phi_ii(t,0) on the measured factor.
Eigen::MatrixXd excitation_gramian(const ErrorSystem& sys, const Channel& channel, std::size_t T);

// Minimum eigenvalue of the excitation Gramian exceeds `threshold`
// (default 1e-9 * trace).
bool is_persistently_exciting(const ErrorSystem& sys, const Channel& channel, std::size_t T,
                              std::optional<double> threshold = std::nullopt);

enum class CouplingVerdict { none, partial, full };
std::string_view to_string(CouplingVerdict v);

struct CrossFactorAnalysis {
  std::size_t measured_factor = 0;
  std::size_t target_factor = 0;
  std::size_t horizon = 0;
  CouplingVerdict verdict = CouplingVerdict::none;
  // Directions of g_j that reach the measured factor within the horizon.
  Subspace reachable;
  Eigen::MatrixXd block_gramian;
  // B^T G B for the reachable basis B.
  Eigen::MatrixXd restricted_gramian;
  double restricted_min_eigenvalue = 0.0;
  // Block Gramian is positive definite on a nonzero reachable subspace.
  bool positive_on_reachable = false;
  bool persistently_exciting = false;
  // Directions of g_i the channel never excites; empty when PE.
  Subspace unexcited;
  std::vector<std::string> warnings;
};

// Coupling analysis of a channel local to factor i against target factor j.
// When the channel is not persistently exciting on g_i the result carries a
// warning and the positive-definiteness guarantee is not claimed.
CrossFactorAnalysis cross_factor_analysis(const ErrorSystem& sys, const Channel& channel, std::size_t j,
                                          std::size_t T, const RankTolerance& tol = {});

// Smallest T <= T_max with reachable(T) = g_j.
std::optional<std::size_t> observability_index(const ErrorSystem& sys, const Channel& channel, std::size_t j,
                                               std::size_t T_max, const RankTolerance& tol = {});

Subspace unobservable_subspace(const Gramian& W, const RankTolerance& tol = {});

}  // namespace liegram
