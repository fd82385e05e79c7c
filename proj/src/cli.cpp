#include "liegram/cli.hpp"

#include "liegram/config.hpp"
#include "liegram/diversity.hpp"
#include "liegram/errors.hpp"
#include "liegram/gramian.hpp"
#include "liegram/report.hpp"
#include "liegram/scenarios.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

namespace liegram {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SourceOptions {
  std::vector<std::string> presets;
  std::string config_path;
  std::string motion = "nominal";
  std::optional<std::size_t> horizon;
  std::optional<double> tolerance;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> sources;
  std::string out_dir;
  json tolerances = json::object();
  std::vector<std::string> files;
  std::vector<std::string> errors;

  json to_json() const {
    return {{"command", command}, {"sources", sources}, {"out_dir", out_dir}, {"tolerances", tolerances},
            {"files", files},     {"errors", errors}};
  }
};

void add_source_options(CLI::App* cmd, SourceOptions& o, bool many_presets) {
  if (many_presets) {
    cmd->add_option("--preset", o.presets, "Built-in scenario preset (repeatable)");
  } else {
    cmd->add_option("--preset", o.presets, "Built-in scenario preset")->expected(1);
  }
  cmd->add_option("--config", o.config_path, "Scenario JSON document");
  cmd->add_option("--motion", o.motion, "Preset motion: nominal or hover");
  cmd->add_option("--horizon", o.horizon, "Override the step count");
  cmd->add_option("--tolerance", o.tolerance, "Absolute rank-tolerance floor (default 1e-9)");
}

Motion parse_motion(const std::string& m) {
  if (m == "nominal" || m == "translate" || m == "translating") return Motion::nominal;
  if (m == "hover" || m == "hovering") return Motion::hover;
  throw InputError("unknown motion '" + m + "' (expected nominal or hover)");
}

RankTolerance tolerance_of(const SourceOptions& o) {
  RankTolerance tol;
  if (o.tolerance) {
    if (!(*o.tolerance >= 0.0)) throw InputError("--tolerance must be non-negative");
    tol.absolute_floor = *o.tolerance;
  }
  return tol;
}

std::vector<ScenarioConfig> load_sources(const SourceOptions& o) {
  std::vector<ScenarioConfig> configs;
  const Motion motion = parse_motion(o.motion);
  for (const auto& p : o.presets) configs.push_back(preset(p, motion));
  if (!o.config_path.empty()) configs.push_back(load_config(o.config_path));
  if (configs.empty()) throw InputError("no scenario given (use --preset or --config)");
  if (o.horizon) {
    if (*o.horizon < 1) throw InputError("--horizon must be at least 1");
    for (auto& c : configs) c.horizon = *o.horizon;
  }
  return configs;
}

ScenarioConfig load_single(const SourceOptions& o) {
  if (o.presets.size() + (o.config_path.empty() ? 0 : 1) != 1) {
    throw InputError("exactly one of --preset or --config is required");
  }
  return load_sources(o).front();
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(round12(v(i)));
  return a;
}

// Basis vectors as a list of coordinate arrays.
json basis_json(const Subspace& s) {
  json a = json::array();
  for (Eigen::Index k = 0; k < s.dim(); ++k) a.push_back(vec_json(s.basis().col(k)));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

void write_file(const fs::path& path, const std::string& contents, RunManifest& manifest) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << contents;
  manifest.files.push_back(path.filename().string());
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << manifest.to_json().dump(2) << '\n';
}

std::string trace_csv(std::span<const ScenarioTrace> traces) {
  std::ostringstream s;
  write_trace_csv(s, traces);
  return s.str();
}

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
  SourceOptions source;
  bool all_presets = false;
  std::string out_dir = ".";
  bool svg = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  SourceOptions src = o.source;
  if (o.all_presets) {
    for (const auto& n : preset_names()) {
      if (std::find(src.presets.begin(), src.presets.end(), n) == src.presets.end()) src.presets.push_back(n);
    }
  }
  const std::vector<ScenarioConfig> configs = load_sources(src);
  const RankTolerance tol = tolerance_of(src);
  for (const auto& c : configs) build_system(c);  // surface input errors before any output

  std::vector<std::future<ScenarioTrace>> jobs;
  for (const auto& c : configs) {
    jobs.push_back(std::async(std::launch::async, [&c, tol] { return run_scenario(c, tol); }));
  }
  std::vector<ScenarioTrace> traces;
  for (auto& j : jobs) traces.push_back(j.get());

  RunManifest manifest;
  manifest.command = "simulate";
  for (const auto& c : configs) manifest.sources.push_back(c.name);
  manifest.out_dir = o.out_dir;
  manifest.tolerances = {{"rank_absolute_floor", tol.absolute_floor}};

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_file(dir / "trace.csv", trace_csv(traces), manifest);
  if (o.all_presets) {
    for (const auto& tr : traces) write_file(dir / (tr.scenario + ".csv"), trace_csv({&tr, 1}), manifest);
  }
  if (o.svg) write_file(dir / "plot.svg", render_log_det_svg(traces), manifest);

  bool failed = false;
  for (const auto& tr : traces) {
    if (tr.error) {
      failed = true;
      manifest.errors.push_back(tr.scenario + ": " + *tr.error);
    }
  }
  write_manifest(dir, manifest);
  for (const auto& f : manifest.files) out << (dir / f).string() << '\n';
  if (failed) throw NumericalError(manifest.errors.front());
  return kExitOk;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
  SourceOptions source;
  std::optional<std::size_t> factor_from;
  std::optional<std::size_t> factor_to;
  std::string sensor;
  bool table_row = false;
  bool table2 = false;
  std::string out_dir;
};

std::string architecture_label(const std::string& name) {
  if (name == "se3-gps") return "GPS only";
  if (name == "se3-gps-att") return "GPS + attitude";
  if (name == "se3-gps2") return "Redundant GPS";
  return name;
}

void emit(const json& report, const std::string& out_dir, const std::string& command, std::ostream& out) {
  out << report.dump(2) << '\n';
  if (out_dir.empty()) return;
  RunManifest manifest;
  manifest.command = command;
  manifest.out_dir = out_dir;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_file(dir / (command + ".json"), report.dump(2) + "\n", manifest);
  write_manifest(dir, manifest);
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const RankTolerance tol = tolerance_of(o.source);
  if (o.table2) {
    const std::size_t horizon = o.source.horizon.value_or(10);
    json rows = json::array();
    for (const auto& r : table2_reproduction(horizon, tol)) {
      rows.push_back({{"architecture", r.architecture},
                      {"motion", r.motion},
                      {"unobservable_dim", r.unobservable_dim},
                      {"rotation_coupling", std::string(to_string(r.rotation_coupling))},
                      {"reachable_dim", r.reachable_dim}});
    }
    emit({{"horizon", horizon}, {"table2", rows}}, o.out_dir, "analyze", out);
    return kExitOk;
  }

  const ScenarioConfig cfg = load_single(o.source);
  const ErrorSystem sys = build_system(cfg);
  const std::size_t T = cfg.horizon;
  const FactorStructure& factors = sys.factors();

  const Channel* channel = nullptr;
  for (const auto& s : cfg.sensors) {
    if (!o.sensor.empty() && s.name() != o.sensor) continue;
    if (!s.factor()) continue;
    if (o.factor_from && *s.factor() != *o.factor_from) continue;
    channel = &s;
    break;
  }
  if (o.factor_from) factors.dim(*o.factor_from);
  if (channel == nullptr) throw InputError("no factor-local sensor matches the requested measured factor");
  const std::size_t i = *channel->factor();

  std::size_t j = 0;
  if (o.factor_to) {
    j = *o.factor_to;
    factors.dim(j);
  } else if (factors.factor_count() == 2) {
    j = 1 - i;
  } else {
    throw InputError("--factor-to is required for systems with more than two factors");
  }

  const CrossFactorAnalysis a = cross_factor_analysis(sys, *channel, j, T, tol);
  const Gramian W = gramian(sys, cfg.sensors, T);
  const Subspace unobservable = unobservable_subspace(W, tol);

  if (o.table_row) {
    json row = {{"architecture", architecture_label(cfg.name)},
                {"motion", o.source.motion == "hover" || o.source.motion == "hovering" ? "hovering" : "translating"},
                {"verdict", std::string(to_string(a.verdict))},
                {"unobservable_dim", unobservable.dim()}};
    emit(row, o.out_dir, "analyze", out);
    return kExitOk;
  }

  const auto index = observability_index(sys, *channel, j, T, tol);
  json report = {{"scenario", cfg.name},
                 {"horizon", T},
                 {"sensor", channel->name()},
                 {"measured_factor", i},
                 {"target_factor", j},
                 {"verdict", std::string(to_string(a.verdict))},
                 {"reachable_dim", a.reachable.dim()},
                 {"reachable_basis", basis_json(a.reachable)},
                 {"block_gramian", matrix_json(a.block_gramian)},
                 {"positive_on_reachable", a.positive_on_reachable},
                 {"persistently_exciting", a.persistently_exciting},
                 {"warnings", a.warnings},
                 {"observability_index", index ? json(*index) : json(nullptr)},
                 {"unobservable_dim", unobservable.dim()},
                 {"unobservable_basis", basis_json(unobservable)}};
  emit(report, o.out_dir, "analyze", out);
  return kExitOk;
}

// --- check-sensor ----------------------------------------------------------

struct CheckOptions {
  SourceOptions source;
  std::string candidate;
  std::optional<double> epsilon;
  std::string out_dir;
};

Channel candidate_channel(const std::string& spec, const FactorStructure& factors) {
  if (spec.empty()) throw InputError("--candidate is required");
  if (spec == "se2-position") return sensors::se2_position("candidate");
  if (spec == "se2-heading") return sensors::se2_heading("candidate");
  if (spec == "se3-gps") return sensors::se3_gps("candidate");
  if (spec == "se3-attitude") return sensors::se3_attitude("candidate");
  if (spec == "zero") {
    return Channel::global("candidate", factors, MatrixSchedule::constant(Eigen::MatrixXd::Zero(1, factors.total_dim())),
                           Eigen::MatrixXd::Identity(1, 1));
  }
  if (spec.front() == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw InputError("cannot open candidate file '" + spec.substr(1) + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sensor(ss.str(), factors);
  }
  return parse_sensor(spec, factors);
}

int cmd_check_sensor(const CheckOptions& o, std::ostream& out) {
  const ScenarioConfig cfg = load_single(o.source);
  const RankTolerance tol = tolerance_of(o.source);
  const ErrorSystem sys = build_system(cfg);
  const Channel candidate = candidate_channel(o.candidate, sys.factors());
  if (!(candidate.factors() == sys.factors())) throw InputError("candidate does not match the baseline's factors");
  if (o.epsilon && !(*o.epsilon >= 0.0)) throw InputError("--epsilon must be non-negative");
  const std::size_t T = cfg.horizon;

  const PropagatedSubspace S = propagated_subspace(sys, cfg.sensors, T, tol);
  const DiversityCheck d = diversity_check(sys, S, candidate, o.epsilon);
  const GramianIncrement g = gramian_increment(sys, cfg.sensors, candidate, T, tol);

  json report = {{"scenario", cfg.name},
                 {"horizon", T},
                 {"baseline_span_dim", S.span.dim()},
                 {"verdict", std::string(to_string(d.verdict))},
                 {"innovation_dim", d.innovation.dim()},
                 {"innovation_norm", round12(d.innovation_norm)},
                 {"epsilon_used", round12(d.epsilon)},
                 {"innovation_basis", basis_json(d.innovation)},
                 {"raw_innovation_dim", d.raw_innovation_dim},
                 {"gramian_verdict", std::string(to_string(g.verdict))},
                 {"rank_before", g.rank_before},
                 {"rank_after", g.rank_after}};
  emit(report, o.out_dir, "check-sensor", out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural observability analysis on product Lie groups", "liegram"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run scenarios and write trace.csv");
  add_source_options(simulate, sim.source, true);
  simulate->add_flag("--all-presets", sim.all_presets, "Run every built-in preset");
  simulate->add_option("--out", sim.out_dir, "Output directory");
  simulate->add_flag("--svg", sim.svg, "Also write plot.svg (log det P per scenario)");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Cross-factor observability report (JSON)");
  add_source_options(analyze, an.source, false);
  analyze->add_option("--factor-from", an.factor_from, "Measured factor index");
  analyze->add_option("--factor-to", an.factor_to, "Target factor index");
  analyze->add_option("--sensor", an.sensor, "Name of the factor-local sensor to analyze");
  analyze->add_flag("--table-row", an.table_row, "Print only the architecture/motion summary row");
  analyze->add_flag("--table2", an.table2, "Print the four-row SE(3) architecture table");
  analyze->add_option("--out", an.out_dir, "Also write analyze.json here");

  CheckOptions ck;
  auto* check = app.add_subcommand("check-sensor", "Structural diversity check for a candidate sensor (JSON)");
  add_source_options(check, ck.source, false);
  check->add_option("--candidate", ck.candidate,
                    "Sensor JSON object, @file, or one of se2-position, se2-heading, se3-gps, se3-attitude, zero");
  check->add_option("--epsilon", ck.epsilon, "Innovation threshold (default 1e-8 * sigma_max of candidate rows)");
  check->add_option("--out", ck.out_dir, "Also write check-sensor.json here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (check->parsed()) return cmd_check_sensor(ck, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace liegram
