#include "liegram/errors.hpp"
#include "liegram/gramian.hpp"
#include "liegram/scenarios.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace liegram;
using liegram::testkit::Rng;

namespace {

Eigen::MatrixXd scalar(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

ErrorSystem static_system(const FactorStructure& f, const Eigen::MatrixXd& F, std::size_t horizon) {
  const Eigen::Index n = f.total_dim();
  return ErrorSystem(f, MatrixSchedule::constant(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(n, n)), horizon);
}

Channel identity_channel(const FactorStructure& f, std::size_t i) {
  const Eigen::Index d = f.dim(i);
  return Channel::local("id", f, i, MatrixSchedule::constant(Eigen::MatrixXd::Identity(d, d)),
                        Eigen::MatrixXd::Identity(d, d));
}

// SE(3) with body velocity along `first` for steps < switch_step and along
// `second` afterwards; no rotation.
ErrorSystem switching_translation(std::size_t switch_step, std::size_t horizon) {
  auto F = MatrixSchedule::generator(
      [switch_step](std::size_t t) {
        Eigen::Matrix<double, 6, 1> u = Eigen::Matrix<double, 6, 1>::Zero();
        u(t < switch_step ? 3 : 4) = 1.0;
        return se3_step_transition(u, 0.1);
      },
      horizon);
  return ErrorSystem(se3_factors(), F, MatrixSchedule::constant(Eigen::MatrixXd::Zero(6, 6)), horizon);
}

// Random 2-factor system whose off-diagonal blocks of F are either zero or
// random according to `mask` (bit 0: 0<-1, bit 1: 1<-0).
std::vector<Eigen::MatrixXd> masked_transitions(Rng& rng, const FactorStructure& f, unsigned mask, std::size_t T) {
  const Eigen::Index n = f.total_dim(), d0 = f.dim(0), d1 = f.dim(1);
  std::vector<Eigen::MatrixXd> F;
  for (std::size_t t = 0; t < T; ++t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + testkit::random_matrix(rng, n, n, 0.3);
    if (!(mask & 1u)) m.block(0, d0, d0, d1).setZero();
    if (!(mask & 2u)) m.block(d0, 0, d1, d0).setZero();
    F.push_back(m);
  }
  return F;
}

}  // namespace

TEST(Gramian, ScalarAccumulation) {
  const FactorStructure f({1});
  ErrorSystem sys = static_system(f, scalar(1), 5);
  std::vector<Channel> c = {Channel::global("y", f, MatrixSchedule::constant(scalar(1)), scalar(1))};
  EXPECT_EQ(gramian(sys, c, 1).W(0, 0), 1.0);
  EXPECT_EQ(gramian(sys, c, 3).W(0, 0), 3.0);
  EXPECT_EQ(gramian(sys, c, 3).channel_count, 1u);
}

TEST(Gramian, ZeroMeasurementGivesZero) {
  Rng rng(41);
  const FactorStructure f({2, 3});
  ErrorSystem sys = static_system(f, testkit::random_matrix(rng, 5, 5), 4);
  std::vector<Channel> c = {
      Channel::global("z", f, MatrixSchedule::constant(Eigen::MatrixXd::Zero(2, 5)), Eigen::Matrix2d::Identity())};
  EXPECT_TRUE(gramian(sys, c, 4).W.isZero(0.0));
}

TEST(Gramian, RejectsHorizonOutsideSystem) {
  const FactorStructure f({1});
  ErrorSystem sys = static_system(f, scalar(1), 3);
  std::vector<Channel> c = {Channel::global("y", f, MatrixSchedule::constant(scalar(1)), scalar(1))};
  EXPECT_THROW(gramian(sys, c, 0), InputError);
  EXPECT_THROW(gramian(sys, c, 5), InputError);
  EXPECT_NO_THROW(gramian(sys, c, 4));
}

TEST(Gramian, MatchesDoubleLoop) {
  Rng rng(42);
  const FactorStructure f({1, 2, 3});
  std::vector<Eigen::MatrixXd> F;
  for (int t = 0; t < 10; ++t) F.push_back(Eigen::MatrixXd::Identity(6, 6) + testkit::random_matrix(rng, 6, 6, 0.2));
  ErrorSystem sys(f, MatrixSchedule::table(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(6, 6)), 10);
  std::vector<std::vector<Eigen::MatrixXd>> H(2);
  std::vector<Eigen::MatrixXd> R = {testkit::random_spd(rng, 2), testkit::random_spd(rng, 3)};
  for (int t = 0; t < 10; ++t) {
    H[0].push_back(testkit::random_matrix(rng, 2, 6));
    H[1].push_back(testkit::random_matrix(rng, 3, 6));
  }
  std::vector<Channel> c = {Channel::global("a", f, MatrixSchedule::table(H[0]), R[0]),
                            Channel::global("b", f, MatrixSchedule::table(H[1]), R[1])};
  const Eigen::MatrixXd oracle = testkit::brute_force_gramian(F, H, R, 10);
  EXPECT_LT((gramian(sys, c, 10).W - oracle).norm(), 1e-9 * oracle.norm());
}

TEST(GramianBlock, DecoupledCrossBlockIsZero) {
  Rng rng(43);
  const FactorStructure f({2, 2});
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(4, 4);
  F.topLeftCorner(2, 2) = testkit::random_matrix(rng, 2, 2);
  F.bottomRightCorner(2, 2) = testkit::random_matrix(rng, 2, 2);
  ErrorSystem sys = static_system(f, F, 5);
  EXPECT_TRUE(gramian_block(sys, identity_channel(f, 0), 1, 5).isZero(0.0));
}

TEST(GramianBlock, StaticIdentityAccumulates) {
  const FactorStructure f({2, 3});
  ErrorSystem sys = static_system(f, Eigen::MatrixXd::Identity(5, 5), 4);
  EXPECT_EQ(gramian_block(sys, identity_channel(f, 1), 1, 4), Eigen::MatrixXd(4.0 * Eigen::Matrix3d::Identity()));
}

TEST(GramianBlock, AgreesWithSlicedFullGramian) {
  Rng rng(44);
  for (int k = 0; k < 50; ++k) {
    const FactorStructure f({3, 3});
    std::vector<Eigen::MatrixXd> F = masked_transitions(rng, f, 3u, 8);
    ErrorSystem sys(f, MatrixSchedule::table(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(6, 6)), 8);
    std::vector<Channel> c = {Channel::local("h", f, 1, MatrixSchedule::constant(testkit::random_matrix(rng, 2, 3)),
                                             testkit::random_spd(rng, 2))};
    const Eigen::MatrixXd W = gramian(sys, c, 8).W;
    for (std::size_t j = 0; j < 2; ++j) {
      const Eigen::MatrixXd sliced = f.projection(j) * W * f.projection(j).transpose();
      ASSERT_LT((gramian_block(sys, c[0], j, 8) - sliced).norm(), 1e-9 * std::max(1.0, sliced.norm()));
    }
  }
}

TEST(GramianBlock, RequiresLocalChannel) {
  const FactorStructure f({1, 1});
  ErrorSystem sys = static_system(f, Eigen::Matrix2d::Identity(), 2);
  const Channel g = Channel::global("g", f, MatrixSchedule::constant(Eigen::MatrixXd::Ones(1, 2)), scalar(1));
  EXPECT_THROW(gramian_block(sys, g, 0, 2), InputError);
}

TEST(PersistentExcitation, FullRankAtFirstStep) {
  const FactorStructure f({3});
  ErrorSystem sys = static_system(f, Eigen::Matrix3d::Identity(), 1);
  EXPECT_TRUE(is_persistently_exciting(sys, identity_channel(f, 0), 1));
}

TEST(PersistentExcitation, RankOneStaysDeficient) {
  const FactorStructure f({2});
  ErrorSystem sys = static_system(f, Eigen::Matrix2d::Identity(), 20);
  const Channel c = Channel::local("x", f, 0, MatrixSchedule::constant(Eigen::RowVector2d(1, 0)), scalar(1));
  for (std::size_t T = 1; T <= 21; ++T) EXPECT_FALSE(is_persistently_exciting(sys, c, T));
}

// G(1) = e1 e1^T; G(2) adds Rot^T e1 e1^T Rot = e2 e2^T, so G(2) = I.
TEST(PersistentExcitation, QuarterTurnExcitesOnSecondStep) {
  const FactorStructure f({2});
  Eigen::Matrix2d rot;
  rot << 0, -1, 1, 0;
  ErrorSystem sys = static_system(f, rot, 3);
  const Channel c = Channel::local("x", f, 0, MatrixSchedule::constant(Eigen::RowVector2d(1, 0)), scalar(1));
  EXPECT_FALSE(is_persistently_exciting(sys, c, 1));
  EXPECT_TRUE(is_persistently_exciting(sys, c, 2));
  EXPECT_LT((excitation_gramian(sys, c, 2) - Eigen::Matrix2d::Identity()).norm(), 1e-15);
}

TEST(CrossFactor, DecoupledIsNone) {
  const FactorStructure f({2, 2});
  ErrorSystem sys = static_system(f, Eigen::Matrix4d::Identity(), 5);
  const CrossFactorAnalysis a = cross_factor_analysis(sys, identity_channel(f, 0), 1, 5);
  EXPECT_EQ(a.verdict, CouplingVerdict::none);
  EXPECT_TRUE(a.reachable.is_zero());
  EXPECT_TRUE(a.block_gramian.isZero(0.0));
  EXPECT_TRUE(a.persistently_exciting);
  EXPECT_TRUE(a.warnings.empty());
}

TEST(CrossFactor, HoveringGpsSeesNoRotation) {
  ScenarioConfig cfg = preset("se3-gps", Motion::hover);
  cfg.horizon = 10;
  const ErrorSystem sys = build_system(cfg);
  const CrossFactorAnalysis a = cross_factor_analysis(sys, cfg.sensors[0], 0, 10);
  EXPECT_EQ(a.verdict, CouplingVerdict::none);
  EXPECT_EQ(unobservable_subspace(gramian(sys, cfg.sensors, 10)).dim(), 3);
}

TEST(CrossFactor, TranslatingGpsSeesTwoRotationAxes) {
  ScenarioConfig cfg = preset("se3-gps", Motion::nominal);
  cfg.horizon = 10;
  const ErrorSystem sys = build_system(cfg);
  const CrossFactorAnalysis a = cross_factor_analysis(sys, cfg.sensors[0], 0, 10);
  EXPECT_EQ(a.verdict, CouplingVerdict::partial);
  EXPECT_EQ(a.reachable.dim(), 2);
  EXPECT_TRUE(a.positive_on_reachable);
  const Subspace un = unobservable_subspace(gramian(sys, cfg.sensors, 10));
  ASSERT_EQ(un.dim(), 1);
  // The blind direction is rotation about the axis of travel.
  EXPECT_NEAR(std::abs(un.basis()(0, 0)), 1.0, 1e-9);
}

TEST(CrossFactor, NonExcitingChannelIsFlagged) {
  const FactorStructure f({2, 1});
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  F(0, 2) = 1.0;
  ErrorSystem sys = static_system(f, F, 4);
  const Channel c = Channel::local("x", f, 0, MatrixSchedule::constant(Eigen::RowVector2d(1, 0)), scalar(1));
  const CrossFactorAnalysis a = cross_factor_analysis(sys, c, 1, 4);
  EXPECT_FALSE(a.persistently_exciting);
  EXPECT_EQ(a.unexcited.dim(), 1);
  EXPECT_EQ(a.warnings.size(), 1u);
  EXPECT_EQ(a.verdict, CouplingVerdict::full);
}

TEST(ObservabilityIndex, DecoupledHasNone) {
  const FactorStructure f({2, 2});
  ErrorSystem sys = static_system(f, Eigen::Matrix4d::Identity(), 10);
  EXPECT_FALSE(observability_index(sys, identity_channel(f, 0), 1, 10).has_value());
}

TEST(ObservabilityIndex, TranslationAxisChangeCompletesRotation) {
  const ErrorSystem sys = switching_translation(1, 10);
  const Channel gps = sensors::se3_gps();
  // C_1 involves only the first axis, C_2 the second as well.
  EXPECT_EQ(cross_factor_analysis(sys, gps, 0, 2).reachable.dim(), 2);
  EXPECT_EQ(cross_factor_analysis(sys, gps, 0, 3).reachable.dim(), 3);
  EXPECT_EQ(observability_index(sys, gps, 0, 10), std::optional<std::size_t>(3));
}

TEST(ObservabilityIndex, LaterSwitchDelaysIndex) {
  const ErrorSystem sys = switching_translation(4, 12);
  const Channel gps = sensors::se3_gps();
  EXPECT_EQ(cross_factor_analysis(sys, gps, 0, 1).reachable.dim(), 0);
  for (std::size_t T = 2; T <= 5; ++T) EXPECT_EQ(cross_factor_analysis(sys, gps, 0, T).reachable.dim(), 2) << T;
  for (std::size_t T = 6; T <= 12; ++T) EXPECT_EQ(cross_factor_analysis(sys, gps, 0, T).reachable.dim(), 3) << T;
  EXPECT_EQ(observability_index(sys, gps, 0, 12), std::optional<std::size_t>(6));
}

// g_3 -> g_2 -> g_1 through a nilpotent shift; measurement on g_1.
TEST(ObservabilityIndex, ChainNeedsMoreStepsForFartherFactor) {
  const FactorStructure f({1, 1, 1});
  Eigen::Matrix3d F;
  F << 1, 1, 0, 0, 1, 1, 0, 0, 1;
  ErrorSystem sys = static_system(f, F, 10);
  const Channel c = identity_channel(f, 0);
  const auto idx2 = observability_index(sys, c, 1, 10);
  const auto idx3 = observability_index(sys, c, 2, 10);
  ASSERT_TRUE(idx2 && idx3);
  EXPECT_EQ(*idx2, 2u);
  EXPECT_EQ(*idx3, 3u);
  EXPECT_GT(*idx3, *idx2);
}

TEST(UnobservableSubspace, ExtremeCases) {
  Gramian zero{Eigen::MatrixXd::Zero(4, 4), 1, 0};
  EXPECT_TRUE(unobservable_subspace(zero).is_full());
  Gramian id{Eigen::MatrixXd::Identity(4, 4), 1, 1};
  EXPECT_TRUE(unobservable_subspace(id).is_zero());
}

TEST(UnobservableSubspace, RecoversConstructedKernel) {
  Rng rng(45);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 6, r = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::MatrixXd B = testkit::random_matrix(rng, n, r);
    Gramian W{B * B.transpose(), 1, 1};
    const Subspace un = unobservable_subspace(W);
    ASSERT_EQ(un.dim(), n - r);
    // Kernel of B B^T is the orthogonal complement of range(B).
    ASSERT_LT((B.transpose() * un.basis()).norm(), 1e-8);
    ASSERT_LT((un.basis().transpose() * un.basis() - Eigen::MatrixXd::Identity(n - r, n - r)).norm(), 1e-10);
  }
}

TEST(GramianProperty, MonotoneInHorizon) {
  Rng rng(46);
  for (int k = 0; k < 1000; ++k) {
    const FactorStructure f({1, 2});
    std::vector<Eigen::MatrixXd> F;
    for (int t = 0; t < 6; ++t) F.push_back(Eigen::MatrixXd::Identity(3, 3) + testkit::random_matrix(rng, 3, 3, 0.3));
    ErrorSystem sys(f, MatrixSchedule::table(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(3, 3)), 6);
    std::vector<Channel> c = {Channel::global("h", f, MatrixSchedule::constant(testkit::random_matrix(rng, 1, 3)),
                                              testkit::random_spd(rng, 1))};
    const std::size_t T = 1 + rng() % 6;
    const Eigen::MatrixXd W0 = gramian(sys, c, T).W, W1 = gramian(sys, c, T + 1).W;
    ASSERT_GE(min_eigenvalue(W1 - W0), -1e-9);
    ASSERT_LT((W1 - W1.transpose()).norm(), 1e-10);
    ASSERT_GE(min_eigenvalue(W1), -1e-9 * W1.norm());
  }
}

TEST(GramianProperty, ZeroBlockIffZeroCrossBlocks) {
  Rng rng(47);
  int coupled = 0, decoupled = 0;
  for (int k = 0; k < 300; ++k) {
    const FactorStructure f({2, 2});
    const unsigned mask = static_cast<unsigned>(rng() % 4);
    const std::vector<Eigen::MatrixXd> F = masked_transitions(rng, f, mask, 5);
    ErrorSystem sys(f, MatrixSchedule::table(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(4, 4)), 5);
    const Channel c = identity_channel(f, 0);
    const std::size_t T = 1 + rng() % 5;
    bool any_cross = false;
    for (std::size_t t = 0; t < T; ++t) {
      any_cross |= testkit::brute_force_transition(F, t, 0).block(0, 2, 2, 2).norm() > 1e-12;
    }
    const CrossFactorAnalysis a = cross_factor_analysis(sys, c, 1, T);
    ASSERT_TRUE(a.persistently_exciting);
    ASSERT_EQ(a.block_gramian.norm() > 1e-12, any_cross) << "mask " << mask;
    ASSERT_EQ(a.verdict != CouplingVerdict::none, any_cross);
    if (any_cross) {
      ASSERT_TRUE(a.positive_on_reachable);
      ++coupled;
    } else {
      ++decoupled;
    }
  }
  EXPECT_GT(coupled, 50);
  EXPECT_GT(decoupled, 50);
}

TEST(GramianProperty, RankBoundedByStackedRows) {
  Rng rng(48);
  for (int k = 0; k < 200; ++k) {
    const FactorStructure f({2, 2});
    std::vector<Eigen::MatrixXd> F;
    for (int t = 0; t < 4; ++t) F.push_back(testkit::random_matrix(rng, 4, 4));
    ErrorSystem sys(f, MatrixSchedule::table(F), MatrixSchedule::constant(Eigen::MatrixXd::Zero(4, 4)), 4);
    const Eigen::MatrixXd H = testkit::random_matrix(rng, 1, 4);
    std::vector<Channel> c = {Channel::global("h", f, MatrixSchedule::constant(H), scalar(1))};
    const std::size_t T = 1 + rng() % 4;
    Eigen::MatrixXd stacked(T, 4);
    for (std::size_t t = 0; t < T; ++t) stacked.row(t) = H * testkit::brute_force_transition(F, t, 0);
    ASSERT_LE(psd_rank(gramian(sys, c, T).W), testkit::svd_rank(stacked, 1e-9));
  }
}
