#pragma once

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "ampc/controller.hpp"
#include "ampc/errors.hpp"
#include "ampc/strings.hpp"

namespace ampc {

// Flat key-value configuration with [scenario], [weights], [solver] and
// [estimator] sections. Every key is optional; anything missing keeps the
// default scenario (the SimConfig defaults). '#' starts a comment.

namespace detail {

inline double require_double(std::string_view value, int line) {
  const auto v = parse_double(trim(value));
  if (!v)
    throw ConfigError("line " + std::to_string(line) +
                      ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

inline long require_int(std::string_view value, int line) {
  const auto v = parse_int(trim(value));
  if (!v)
    throw ConfigError("line " + std::to_string(line) +
                      ": expected an integer, got '" + std::string(value) +
                      "'");
  return *v;
}

inline bool require_bool(std::string_view value, int line) {
  const auto t = trim(value);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("line " + std::to_string(line) +
                    ": expected true or false, got '" + std::string(value) +
                    "'");
}

template <std::size_t K>
std::array<double, K> require_doubles(std::string_view value, int line) {
  const auto tokens = split_whitespace(value);
  if (tokens.size() != K)
    throw ConfigError("line " + std::to_string(line) + ": expected " +
                      std::to_string(K) + " numbers, got " +
                      std::to_string(tokens.size()));
  std::array<double, K> out{};
  for (std::size_t i = 0; i < K; ++i) out[i] = require_double(tokens[i], line);
  return out;
}

inline State require_state(std::string_view value, int line) {
  const auto a = require_doubles<5>(value, line);
  return {a[0], a[1], a[2], a[3], a[4]};
}

}  // namespace detail

/// Throws ConfigError naming the offending field when the configuration is
/// not usable.
inline void validate_config(const SimConfig& cfg) {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (!(std::isfinite(cfg.true_params.mass) && cfg.true_params.mass > 0.0))
    fail("scenario.mass", "must be finite and > 0");
  if (!(std::isfinite(cfg.true_params.inertia) && cfg.true_params.inertia > 0.0))
    fail("scenario.inertia", "must be finite and > 0");
  if (!(std::isfinite(cfg.true_params.linear_drag) &&
        cfg.true_params.linear_drag >= 0.0))
    fail("scenario.linear_drag", "must be finite and >= 0");
  if (!(std::isfinite(cfg.true_params.angular_drag) &&
        cfg.true_params.angular_drag >= 0.0))
    fail("scenario.angular_drag", "must be finite and >= 0");
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0))
    fail("scenario.dt", "must be finite and > 0");
  if (cfg.total_steps < 1) fail("scenario.total_steps", "must be >= 1");
  if (cfg.horizon < 1) fail("scenario.horizon", "must be >= 1");
  if (!is_finite(cfg.x_init)) fail("scenario.start", "must be finite");
  if (!is_finite(cfg.x_goal)) fail("scenario.goal", "must be finite");
  if (!cfg.state_weights.allFinite() ||
      (cfg.state_weights.array() < 0.0).any())
    fail("weights.state", "must be finite and >= 0");
  if (!cfg.input_weights.allFinite() ||
      (cfg.input_weights.array() < 0.0).any())
    fail("weights.input", "must be finite and >= 0");
  if (!cfg.terminal_weights.allFinite() ||
      (cfg.terminal_weights.array() < 0.0).any())
    fail("weights.terminal", "must be finite and >= 0");
  if (!is_finite(cfg.bounds.lower) || !is_finite(cfg.bounds.upper))
    fail("solver.input_min/input_max", "must be finite");
  if (cfg.bounds.lower.thrust > cfg.bounds.upper.thrust ||
      cfg.bounds.lower.moment > cfg.bounds.upper.moment)
    fail("solver.input_min", "must be <= input_max componentwise");
  if (!(std::isfinite(cfg.solver.tolerance) && cfg.solver.tolerance > 0.0))
    fail("solver.tolerance", "must be finite and > 0");
  if (cfg.solver.max_iterations < 1)
    fail("solver.max_iterations", "must be >= 1");
  if (!cfg.estimator.theta0_v.allFinite())
    fail("estimator.theta0_v", "must be finite");
  if (!cfg.estimator.theta0_w.allFinite())
    fail("estimator.theta0_w", "must be finite");
  if (!(std::isfinite(cfg.estimator.initial_gain) &&
        cfg.estimator.initial_gain > 0.0))
    fail("estimator.initial_gain", "must be finite and > 0");
}

/// Parses configuration text on top of `base`. Unknown sections or keys and
/// malformed values are ConfigErrors carrying the line number.
inline SimConfig parse_config(std::string_view text,
                              const SimConfig& base = SimConfig{}) {
  using namespace detail;
  SimConfig cfg = base;
  enum class Section { none, scenario, weights, solver, estimator };
  Section section = Section::none;
  std::set<std::string> seen;

  int line_no = 0;
  for (std::string_view rest = text; !rest.empty() || line_no == 0;) {
    const auto nl = rest.find('\n');
    std::string_view raw =
        nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{}
                                        : rest.substr(nl + 1);
    ++line_no;

    const auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) {
      if (rest.empty()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name == "scenario") section = Section::scenario;
      else if (name == "weights") section = Section::weights;
      else if (name == "solver") section = Section::solver;
      else if (name == "estimator") section = Section::estimator;
      else
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section [" + std::string(name) + "]");
      if (rest.empty()) break;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto unknown = [&]() -> ConfigError {
      return ConfigError("line " + std::to_string(line_no) +
                         ": unknown key '" + std::string(key) + "'");
    };
    if (section != Section::none &&
        !seen.insert(std::to_string(int(section)) + "." + std::string(key))
             .second)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": duplicate key '" + std::string(key) + "'");

    switch (section) {
      case Section::none:
        throw ConfigError("line " + std::to_string(line_no) +
                          ": key outside of any section");
      case Section::scenario:
        if (key == "mass") cfg.true_params.mass = require_double(value, line_no);
        else if (key == "linear_drag")
          cfg.true_params.linear_drag = require_double(value, line_no);
        else if (key == "inertia")
          cfg.true_params.inertia = require_double(value, line_no);
        else if (key == "angular_drag")
          cfg.true_params.angular_drag = require_double(value, line_no);
        else if (key == "dt") cfg.dt = require_double(value, line_no);
        else if (key == "total_steps")
          cfg.total_steps = static_cast<int>(require_int(value, line_no));
        else if (key == "horizon")
          cfg.horizon = static_cast<int>(require_int(value, line_no));
        else if (key == "start") cfg.x_init = require_state(value, line_no);
        else if (key == "goal") cfg.x_goal = require_state(value, line_no);
        else if (key == "adaptive") cfg.adaptive = require_bool(value, line_no);
        else throw unknown();
        break;
      case Section::weights:
        if (key == "state") {
          const auto a = require_doubles<5>(value, line_no);
          cfg.state_weights << a[0], a[1], a[2], a[3], a[4];
        } else if (key == "input") {
          const auto a = require_doubles<2>(value, line_no);
          cfg.input_weights << a[0], a[1];
        } else if (key == "terminal") {
          const auto a = require_doubles<5>(value, line_no);
          cfg.terminal_weights << a[0], a[1], a[2], a[3], a[4];
        } else {
          throw unknown();
        }
        break;
      case Section::solver:
        if (key == "input_min") {
          const auto a = require_doubles<2>(value, line_no);
          cfg.bounds.lower = {a[0], a[1]};
        } else if (key == "input_max") {
          const auto a = require_doubles<2>(value, line_no);
          cfg.bounds.upper = {a[0], a[1]};
        } else if (key == "tolerance") {
          cfg.solver.tolerance = require_double(value, line_no);
        } else if (key == "max_iterations") {
          cfg.solver.max_iterations =
              static_cast<int>(require_int(value, line_no));
        } else {
          throw unknown();
        }
        break;
      case Section::estimator:
        if (key == "theta0_v") {
          const auto a = require_doubles<2>(value, line_no);
          cfg.estimator.theta0_v << a[0], a[1];
        } else if (key == "theta0_w") {
          const auto a = require_doubles<2>(value, line_no);
          cfg.estimator.theta0_w << a[0], a[1];
        } else if (key == "initial_gain") {
          cfg.estimator.initial_gain = require_double(value, line_no);
        } else {
          throw unknown();
        }
        break;
    }
    if (rest.empty()) break;
  }
  return cfg;
}

/// Serializes a configuration so that parse_config(save_config(c)) == c
/// field for field (doubles round-trip exactly).
inline std::string save_config(const SimConfig& cfg) {
  std::ostringstream out;
  const auto num = [](double v) { return format_double(v); };
  const auto state = [&](const State& s) {
    return num(s.x) + " " + num(s.y) + " " + num(s.psi) + " " + num(s.v) +
           " " + num(s.omega);
  };
  out << "[scenario]\n";
  out << "mass = " << num(cfg.true_params.mass) << "\n";
  out << "linear_drag = " << num(cfg.true_params.linear_drag) << "\n";
  out << "inertia = " << num(cfg.true_params.inertia) << "\n";
  out << "angular_drag = " << num(cfg.true_params.angular_drag) << "\n";
  out << "dt = " << num(cfg.dt) << "\n";
  out << "total_steps = " << cfg.total_steps << "\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "start = " << state(cfg.x_init) << "\n";
  out << "goal = " << state(cfg.x_goal) << "\n";
  out << "adaptive = " << (cfg.adaptive ? "true" : "false") << "\n";
  out << "\n[weights]\n";
  out << "state = " << num(cfg.state_weights[0]) << " "
      << num(cfg.state_weights[1]) << " " << num(cfg.state_weights[2]) << " "
      << num(cfg.state_weights[3]) << " " << num(cfg.state_weights[4]) << "\n";
  out << "input = " << num(cfg.input_weights[0]) << " "
      << num(cfg.input_weights[1]) << "\n";
  out << "terminal = " << num(cfg.terminal_weights[0]) << " "
      << num(cfg.terminal_weights[1]) << " " << num(cfg.terminal_weights[2])
      << " " << num(cfg.terminal_weights[3]) << " "
      << num(cfg.terminal_weights[4]) << "\n";
  out << "\n[solver]\n";
  out << "input_min = " << num(cfg.bounds.lower.thrust) << " "
      << num(cfg.bounds.lower.moment) << "\n";
  out << "input_max = " << num(cfg.bounds.upper.thrust) << " "
      << num(cfg.bounds.upper.moment) << "\n";
  out << "tolerance = " << num(cfg.solver.tolerance) << "\n";
  out << "max_iterations = " << cfg.solver.max_iterations << "\n";
  out << "\n[estimator]\n";
  out << "theta0_v = " << num(cfg.estimator.theta0_v[0]) << " "
      << num(cfg.estimator.theta0_v[1]) << "\n";
  out << "theta0_w = " << num(cfg.estimator.theta0_w[0]) << " "
      << num(cfg.estimator.theta0_w[1]) << "\n";
  out << "initial_gain = " << num(cfg.estimator.initial_gain) << "\n";
  return out.str();
}

/// Loads, parses and validates a configuration file on top of the default
/// scenario.
inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  SimConfig cfg = parse_config(buf.str());
  validate_config(cfg);
  return cfg;
}

}  // namespace ampc
