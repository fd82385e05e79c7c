#include "liegram/config.hpp"

#include "liegram/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace liegram {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw InputError(path + ": " + msg);
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("JSON parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                     e.what());
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int depth(const json& j) {
  int d = 0;
  const json* cur = &j;
  while (cur->is_array()) {
    ++d;
    if (cur->empty()) break;
    cur = &cur->front();
  }
  return d;
}

Eigen::VectorXd vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

Eigen::MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a matrix (non-empty array of rows)");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) fail(path, "expected a matrix (array of rows)");
  const std::size_t cols = j[0].size();
  if (cols == 0) fail(path, "matrix rows must be non-empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) fail(rp, "ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

MatrixSchedule matrix_schedule(const json& j, const std::string& path) {
  const int d = depth(j);
  if (d == 2) return MatrixSchedule::constant(matrix(j, path));
  if (d == 3) {
    std::vector<Eigen::MatrixXd> steps;
    for (std::size_t k = 0; k < j.size(); ++k) steps.push_back(matrix(j[k], path + "[" + std::to_string(k) + "]"));
    return MatrixSchedule::table(std::move(steps));
  }
  fail(path, "expected a matrix or a list of per-step matrices");
}

MatrixSchedule vector_schedule(const json& j, const std::string& path) {
  const int d = depth(j);
  if (d == 1) return MatrixSchedule::constant(vector(j, path));
  if (d == 2) {
    std::vector<Eigen::MatrixXd> steps;
    for (std::size_t k = 0; k < j.size(); ++k) steps.push_back(vector(j[k], path + "[" + std::to_string(k) + "]"));
    return MatrixSchedule::table(std::move(steps));
  }
  fail(path, "expected a vector or a list of per-step vectors");
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path, std::string("missing required key '") + key + "'");
  return obj.at(key);
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

Channel sensor_from_json(const json& s, const FactorStructure& factors, const std::string& path) {
  if (!s.is_object()) fail(path, "sensor must be an object");
  const std::string name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : path;
  const Eigen::MatrixXd R = matrix(require(s, "R", path), path + ".R");
  MatrixSchedule H = matrix_schedule(require(s, "H", path), path + ".H");
  try {
    if (!s.contains("factor") || s["factor"].is_null()) return Channel::global(name, factors, std::move(H), R);
    const std::size_t i = count(s["factor"], path + ".factor");
    if (i >= factors.factor_count()) fail(path + ".factor", "factor index out of range");
    const Eigen::MatrixXd h0 = H.at(0);
    if (H.is_constant() && h0.cols() == factors.total_dim() && h0.cols() != factors.dim(i)) {
      return Channel::tagged(name, factors, i, h0, R);
    }
    return Channel::local(name, factors, i, std::move(H), R);
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.starts_with(path)) throw;
    fail(path, what);
  }
}

FactorStructure factors_for(const json& doc, Platform platform) {
  switch (platform) {
    case Platform::SE2: return se2_factors();
    case Platform::SE3: return se3_factors();
    case Platform::generic: {
      const json& f = require(doc, "factors", "$");
      if (!f.is_array() || f.empty()) fail("$.factors", "expected a non-empty array of factor dimensions");
      std::vector<Eigen::Index> dims;
      for (std::size_t k = 0; k < f.size(); ++k) {
        dims.push_back(static_cast<Eigen::Index>(count(f[k], "$.factors[" + std::to_string(k) + "]")));
      }
      return FactorStructure(dims);
    }
  }
  fail("$", "unknown platform");
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  const json doc = parse_text(text);
  if (!doc.is_object()) fail("$", "configuration must be a JSON object");

  ScenarioConfig c;
  c.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "config";
  const std::string platform = require(doc, "platform", "$").is_string() ? doc["platform"].get<std::string>() : "";
  if (platform == "SE2") {
    c.platform = Platform::SE2;
  } else if (platform == "SE3") {
    c.platform = Platform::SE3;
  } else if (platform == "generic") {
    c.platform = Platform::generic;
  } else {
    fail("$.platform", "expected \"SE2\", \"SE3\" or \"generic\"");
  }

  if (doc.contains("dt")) c.dt = number(doc["dt"], "$.dt");
  c.horizon = count(require(doc, "horizon", "$"), "$.horizon");

  const FactorStructure factors = factors_for(doc, c.platform);
  if (c.platform == Platform::generic) {
    c.factor_dims = factors.dims();
    c.transition = matrix_schedule(require(doc, "F", "$"), "$.F");
  } else {
    c.inputs = vector_schedule(require(doc, "inputs", "$"), "$.inputs");
  }
  c.Q = matrix_schedule(require(doc, "Q", "$"), "$.Q");
  c.P0 = matrix(require(doc, "P0", "$"), "$.P0");

  const json& sensors = require(doc, "sensors", "$");
  if (!sensors.is_array()) fail("$.sensors", "expected an array");
  for (std::size_t k = 0; k < sensors.size(); ++k) {
    c.sensors.push_back(sensor_from_json(sensors[k], factors, "$.sensors[" + std::to_string(k) + "]"));
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Channel parse_sensor(std::string_view text, const FactorStructure& factors) {
  return sensor_from_json(parse_text(text), factors, "sensor");
}

}  // namespace liegram
