#include "liegram/scenarios.hpp"

#include "liegram/errors.hpp"
#include "liegram/lie.hpp"
#include "liegram/linalg.hpp"

#include <algorithm>
#include <array>

namespace liegram {

namespace {

Eigen::VectorXd input_at(const ScenarioConfig& config, std::size_t t, Eigen::Index expected) {
  Eigen::MatrixXd u = config.inputs.at(t);
  if (u.cols() != 1 || u.rows() != expected) {
    throw InputError("scenario '" + config.name + "': input at step " + std::to_string(t) + " must have " +
                     std::to_string(expected) + " entries");
  }
  return u.col(0);
}

Eigen::MatrixXd column(std::initializer_list<double> values) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) c(i++, 0) = v;
  return c;
}

Eigen::MatrixXd diag(std::initializer_list<double> values) {
  return column(values).col(0).asDiagonal();
}

}  // namespace

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::SE2: return "SE2";
    case Platform::SE3: return "SE3";
    case Platform::generic: return "generic";
  }
  return "?";
}

FactorStructure se2_factors() { return FactorStructure({1, 2}); }
FactorStructure se3_factors() { return FactorStructure({3, 3}); }

FactorStructure factor_structure(const ScenarioConfig& config) {
  switch (config.platform) {
    case Platform::SE2: return se2_factors();
    case Platform::SE3: return se3_factors();
    case Platform::generic: return FactorStructure(config.factor_dims);
  }
  throw InputError("unknown platform");
}

void validate(const ScenarioConfig& config) {
  if (!(config.dt > 0.0)) throw InputError("scenario '" + config.name + "': dt must be positive");
  if (config.horizon < 1) throw InputError("scenario '" + config.name + "': horizon must be at least 1");
  const FactorStructure factors = factor_structure(config);
  const Eigen::Index n = factors.total_dim();
  if (config.P0.rows() != n || config.P0.cols() != n) {
    throw InputError("scenario '" + config.name + "': P0 must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!config.P0.allFinite() || (config.P0 - config.P0.transpose()).norm() > 1e-12 * std::max(1.0, config.P0.norm())) {
    throw InputError("scenario '" + config.name + "': P0 must be symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(config.P0).info() != Eigen::Success) {
    throw InputError("scenario '" + config.name + "': P0 is not positive definite");
  }
  for (const auto& s : config.sensors) {
    if (!(s.factors() == factors)) {
      throw InputError("scenario '" + config.name + "': sensor '" + s.name() + "' uses a different factor structure");
    }
  }
}

Eigen::MatrixXd se2_step_transition(double v, double omega, double dt) {
  Eigen::Vector3d xi(omega * dt, v * dt, 0.0);
  return adjoint(exp_map(xi, GroupKind::SE2).inverse());
}

Eigen::MatrixXd se3_step_transition(const Eigen::Matrix<double, 6, 1>& u, double dt) {
  return adjoint(exp_map(Eigen::VectorXd(u * dt), GroupKind::SE3).inverse());
}

ErrorSystem build_se2_system(const ScenarioConfig& config) {
  if (config.platform != Platform::SE2) throw InputError("build_se2_system needs an SE2 scenario");
  validate(config);
  auto F = MatrixSchedule::generator(
      [config](std::size_t t) {
        const Eigen::VectorXd u = input_at(config, t, 2);
        return se2_step_transition(u(0), u(1), config.dt);
      },
      config.horizon);
  return ErrorSystem(se2_factors(), F, config.Q, config.horizon);
}

ErrorSystem build_se3_system(const ScenarioConfig& config) {
  if (config.platform != Platform::SE3) throw InputError("build_se3_system needs an SE3 scenario");
  validate(config);
  auto F = MatrixSchedule::generator(
      [config](std::size_t t) {
        const Eigen::Matrix<double, 6, 1> u = input_at(config, t, 6);
        return se3_step_transition(u, config.dt);
      },
      config.horizon);
  return ErrorSystem(se3_factors(), F, config.Q, config.horizon);
}

ErrorSystem build_system(const ScenarioConfig& config) {
  switch (config.platform) {
    case Platform::SE2: return build_se2_system(config);
    case Platform::SE3: return build_se3_system(config);
    case Platform::generic:
      validate(config);
      return ErrorSystem(FactorStructure(config.factor_dims), config.transition, config.Q, config.horizon);
  }
  throw InputError("unknown platform");
}

namespace sensors {

Channel se2_position(std::string name, double r) {
  return Channel::local(std::move(name), se2_factors(), 1, MatrixSchedule::constant(Eigen::Matrix2d::Identity()),
                        r * Eigen::Matrix2d::Identity());
}

Channel se2_heading(std::string name, double r) {
  return Channel::local(std::move(name), se2_factors(), 0, MatrixSchedule::constant(Eigen::MatrixXd::Ones(1, 1)),
                        Eigen::MatrixXd::Constant(1, 1, r));
}

Channel se2_redundant_position(std::string name, double r) { return se2_position(std::move(name), r); }

Channel se3_gps(std::string name, double r) {
  return Channel::local(std::move(name), se3_factors(), 1, MatrixSchedule::constant(Eigen::Matrix3d::Identity()),
                        r * Eigen::Matrix3d::Identity());
}

Channel se3_attitude(std::string name, double r) {
  return Channel::local(std::move(name), se3_factors(), 0, MatrixSchedule::constant(Eigen::Matrix3d::Identity()),
                        r * Eigen::Matrix3d::Identity());
}

Channel se3_gps_secondary(std::string name, double r) { return se3_gps(std::move(name), r); }

}  // namespace sensors

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"se2-A", "se2-B", "se2-C", "se3-gps", "se3-gps-att", "se3-gps2"};
  return names;
}

ScenarioConfig preset(std::string_view name, Motion motion) {
  ScenarioConfig c;
  c.name = std::string(name);
  c.dt = 0.1;
  c.horizon = 100;
  const bool hover = motion == Motion::hover;
  if (name.starts_with("se2-")) {
    c.platform = Platform::SE2;
    c.inputs = MatrixSchedule::constant(column({hover ? 0.0 : 1.0, 0.5}));
    c.Q = MatrixSchedule::constant(diag({1e-6, 1e-4, 1e-4}));
    c.P0 = Eigen::Matrix3d::Identity();
    c.sensors.push_back(sensors::se2_position());
    if (name == "se2-A") {
    } else if (name == "se2-B") {
      c.sensors.push_back(sensors::se2_heading());
    } else if (name == "se2-C") {
      c.sensors.push_back(sensors::se2_redundant_position());
    } else {
      throw InputError("unknown preset '" + c.name + "'");
    }
    return c;
  }
  if (name.starts_with("se3-")) {
    c.platform = Platform::SE3;
    c.inputs = MatrixSchedule::constant(column({0.0, 0.0, 0.0, hover ? 0.0 : 1.0, 0.0, 0.0}));
    c.Q = MatrixSchedule::constant(diag({1e-6, 1e-6, 1e-6, 1e-4, 1e-4, 1e-4}));
    c.P0 = Eigen::MatrixXd::Identity(6, 6);
    c.sensors.push_back(sensors::se3_gps());
    if (name == "se3-gps") {
    } else if (name == "se3-gps-att") {
      c.sensors.push_back(sensors::se3_attitude());
    } else if (name == "se3-gps2") {
      c.sensors.push_back(sensors::se3_gps_secondary());
    } else {
      throw InputError("unknown preset '" + c.name + "'");
    }
    return c;
  }
  throw InputError("unknown preset '" + c.name + "'");
}

ScenarioTrace run_scenario(const ScenarioConfig& config, const RankTolerance& tol) {
  const ErrorSystem sys = build_system(config);
  const Eigen::Index n = sys.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);

  ScenarioTrace trace;
  trace.scenario = config.name;
  trace.rows.reserve(config.horizon);

  Eigen::MatrixXd W = zero;
  try {
    BeliefState belief = BeliefState::from_covariance(config.P0, 0);
    for (std::size_t t = 0; t < config.horizon; ++t) {
      const Eigen::MatrixXd S = spatial_information(config.sensors, n, t);
      const Eigen::MatrixXd& phi = sys.transition_from_start(t);
      W = symmetrized(W + phi.transpose() * S * phi);

      FilterStep step = t == 0 ? step_with_decomposition(belief, I, zero, S)
                               : step_with_decomposition(belief, sys.F(t - 1), sys.Q(t - 1), S);
      belief = std::move(step.posterior);

      TraceRow row;
      row.t = t;
      row.log_det_P = belief.log_det();
      row.min_eig_P = belief.min_eigenvalue();
      row.min_eig_J = belief.min_information_eigenvalue();
      row.trace_P = belief.covariance().trace();
      row.rank_Wo = psd_rank(W, tol);
      row.record = step.record;
      trace.rows.push_back(row);
    }
  } catch (const NumericalError& e) {
    trace.error = "step " + std::to_string(trace.rows.size()) + ": " + e.what();
  }
  return trace;
}

std::vector<Table2Row> table2_reproduction(std::size_t horizon, const RankTolerance& tol) {
  struct Case {
    const char* architecture;
    const char* motion;
    const char* preset;
    std::vector<Motion> motions;
  };
  const std::array<Case, 4> cases = {{
      {"GPS only", "hovering", "se3-gps", {Motion::hover}},
      {"GPS only", "translating", "se3-gps", {Motion::nominal}},
      {"GPS + attitude", "any motion", "se3-gps-att", {Motion::hover, Motion::nominal}},
      {"Redundant GPS", "translating", "se3-gps2", {Motion::nominal}},
  }};

  std::vector<Table2Row> rows;
  for (const auto& c : cases) {
    Table2Row row;
    row.architecture = c.architecture;
    row.motion = c.motion;
    // "Any motion" reports the worst case over the motions tried.
    for (Motion m : c.motions) {
      ScenarioConfig cfg = preset(c.preset, m);
      cfg.horizon = horizon;
      const ErrorSystem sys = build_system(cfg);
      const Gramian W = gramian(sys, cfg.sensors, horizon);
      const Eigen::Index dim = unobservable_subspace(W, tol).dim();
      const CrossFactorAnalysis a = cross_factor_analysis(sys, cfg.sensors.front(), 0, horizon, tol);
      if (dim >= row.unobservable_dim) {
        row.unobservable_dim = dim;
        row.rotation_coupling = a.verdict;
        row.reachable_dim = a.reachable.dim();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace liegram
