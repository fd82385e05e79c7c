#pragma once

#include "liegram/error_system.hpp"
#include "liegram/filter.hpp"
#include "liegram/gramian.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace liegram {

enum class Platform { SE2, SE3, generic };
std::string_view to_string(Platform p);

/// Everything needed to run one case study.
///
/// For SE2 the input at step t is the body velocity (v, omega); for SE3 it
/// is (omega, v) in R^6. A generic platform instead supplies factor
/// dimensions and the transition schedule F directly.
struct ScenarioConfig {
  std::string name;
  Platform platform = Platform::SE2;
  double dt = 0.1;
  std::size_t horizon = 100;
  MatrixSchedule inputs;
  std::vector<Eigen::Index> factor_dims;  // generic only
  MatrixSchedule transition;              // generic only
  MatrixSchedule Q;
  std::vector<Channel> sensors;
  Eigen::MatrixXd P0;
};

// SE(2): [so(2) | R^2]; SE(3): [so(3) | R^3].
FactorStructure se2_factors();
FactorStructure se3_factors();
FactorStructure factor_structure(const ScenarioConfig& config);

// Throws InputError on dt <= 0, horizon 0, or a P0 that is not SPD.
void validate(const ScenarioConfig& config);

// Error transition for one step of body velocity: Ad(exp(u dt)^-1).
Eigen::MatrixXd se2_step_transition(double v, double omega, double dt);
Eigen::MatrixXd se3_step_transition(const Eigen::Matrix<double, 6, 1>& u, double dt);

ErrorSystem build_se2_system(const ScenarioConfig& config);
ErrorSystem build_se3_system(const ScenarioConfig& config);
ErrorSystem build_system(const ScenarioConfig& config);

namespace sensors {
// Planar position fix on R^2, R = r I_2.
Channel se2_position(std::string name = "gps", double r = 0.5);
// Planar heading on so(2).
Channel se2_heading(std::string name = "heading", double r = 0.01);
// Second position fix, identical H.
Channel se2_redundant_position(std::string name = "gps2", double r = 0.5);
// Position fix on R^3, R = r I_3.
Channel se3_gps(std::string name = "gps", double r = 0.5);
// Attitude on so(3), R = r I_3.
Channel se3_attitude(std::string name = "attitude", double r = 0.01);
Channel se3_gps_secondary(std::string name = "gps2", double r = 0.5);
}  // namespace sensors

// Nominal motion: unicycle v = 1 m/s, omega = 0.5 rad/s for SE(2); constant
// body velocity v = (1, 0, 0) m/s, omega = 0 for SE(3). Hover removes the
// translational velocity and keeps the turn rate.
enum class Motion { nominal, hover };

const std::vector<std::string>& preset_names();
// Throws InputError for unknown names.
ScenarioConfig preset(std::string_view name, Motion motion = Motion::nominal);

struct TraceRow {
  std::size_t t = 0;
  double log_det_P = 0.0;
  double min_eig_P = 0.0;
  double min_eig_J = 0.0;
  double trace_P = 0.0;
  Eigen::Index rank_Wo = 0;
  DecompositionRecord record;
};

struct ScenarioTrace {
  std::string scenario;
  std::vector<TraceRow> rows;
  // Set when a numerical failure truncated the run.
  std::optional<std::string> error;
};

// Deterministic Riccati evolution. Row t holds the posterior after the
// measurements at times 0..t: row 0 is the update of P0 by S_0, row t > 0
// predicts with (F_{t-1}, Q_{t-1}) and updates with S_t. rank_Wo is the rank
// of W_o(t + 1).
ScenarioTrace run_scenario(const ScenarioConfig& config, const RankTolerance& tol = {});

struct Table2Row {
  std::string architecture;
  std::string motion;
  Eigen::Index unobservable_dim = 0;
  // Coupling of the primary GPS (on R^3) into so(3).
  CouplingVerdict rotation_coupling = CouplingVerdict::none;
  Eigen::Index reachable_dim = 0;
};

// Four SE(3) architecture/motion rows evaluated over `horizon` steps.
std::vector<Table2Row> table2_reproduction(std::size_t horizon = 10, const RankTolerance& tol = {});

}  // namespace liegram
