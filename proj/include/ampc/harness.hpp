#pragma once

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <future>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ampc/config.hpp"
#include "ampc/csv.hpp"
#include "ampc/svg.hpp"

namespace ampc {

/// Headline numbers for one closed-loop run. Errors are measured against the
/// goal state with the heading difference wrapped to (-pi, pi].
struct RunSummary {
  double final_position_error{0.0};
  double final_heading_error{0.0};
  double final_speed_error{0.0};
  double final_spin_error{0.0};
  double total_cost{0.0};
  double wall_time_seconds{0.0};
  std::size_t steps{0};
};

struct RunArtifacts {
  std::string config_snapshot;
  std::string trajectory_csv;
  std::string estimator_csv;
  std::vector<std::string> figures;
  std::string summary_file;
  RunSummary summary;
};

struct CompareArtifacts {
  RunArtifacts adaptive;
  RunArtifacts full_knowledge;
  std::string overlay_figure;
  std::string summary_file;
  double max_thrust_deviation{0.0};
  double max_moment_deviation{0.0};
  double max_position_deviation{0.0};
};

struct IdentifyArtifacts {
  std::string estimator_csv;
  std::string summary_file;
  EstimatorState final_state;
  std::size_t transitions{0};
};

struct CftocArtifacts {
  std::string prediction_csv;
  std::string summary_file;
  std::string figure;
  Solution solution;
};

/// Cost actually accrued along a closed-loop trajectory: the running-state,
/// input, and terminal quadratic penalties evaluated on what the plant did
/// (as opposed to the per-step predicted costs the solver reports).
inline double realized_cost(const TrajectoryLog& log, const SimConfig& cfg) {
  double total = 0.0;
  for (std::size_t t = 1; t < log.states.size(); ++t) {
    const Vec5 e = detail::tracking_error(log.states[t], cfg.x_goal);
    total += 0.5 * e.dot(cfg.state_weights.cwiseProduct(e));
  }
  for (const Input& u : log.inputs) {
    const Eigen::Vector2d uv{u.thrust, u.moment};
    total += 0.5 * uv.dot(cfg.input_weights.cwiseProduct(uv));
  }
  if (!log.states.empty()) {
    const Vec5 en = detail::tracking_error(log.states.back(), cfg.x_goal);
    total += 0.5 * en.dot(cfg.terminal_weights.cwiseProduct(en));
  }
  return total;
}

inline RunSummary summarize(const TrajectoryLog& log, const SimConfig& cfg,
                            double wall_seconds) {
  RunSummary s;
  s.steps = log.inputs.size();
  s.wall_time_seconds = wall_seconds;
  s.total_cost = realized_cost(log, cfg);
  if (!log.states.empty()) {
    const State& xf = log.states.back();
    s.final_position_error =
        std::hypot(xf.x - cfg.x_goal.x, xf.y - cfg.x_goal.y);
    s.final_heading_error = std::abs(wrap_angle(xf.psi - cfg.x_goal.psi));
    s.final_speed_error = std::abs(xf.v - cfg.x_goal.v);
    s.final_spin_error = std::abs(xf.omega - cfg.x_goal.omega);
  }
  return s;
}

namespace detail {

inline std::string summary_text(const RunSummary& s, const SimConfig& cfg) {
  std::ostringstream out;
  out << "steps = " << s.steps << "\n";
  out << "dt = " << format_double(cfg.dt) << "\n";
  out << "adaptive = " << (cfg.adaptive ? "true" : "false") << "\n";
  out << "final_position_error = " << format_double(s.final_position_error)
      << "\n";
  out << "final_heading_error = " << format_double(s.final_heading_error)
      << "\n";
  out << "final_speed_error = " << format_double(s.final_speed_error) << "\n";
  out << "final_spin_error = " << format_double(s.final_spin_error) << "\n";
  out << "total_cost = " << format_double(s.total_cost) << "\n";
  out << "wall_time_seconds = " << format_double(s.wall_time_seconds) << "\n";
  return out.str();
}

/// Rows that carry an applied input: every row except the terminal one,
/// whose action columns are written as zeros.
inline std::size_t acted_rows(const CsvTable& t) {
  return t.rows.empty() ? 0 : t.rows.size() - 1;
}

}  // namespace detail

/// Builds the standard figure set from a parsed trajectory CSV. The charts
/// depend only on the table contents plus the scenario's goal and true
/// parameters, so re-rendering from the same CSV reproduces identical bytes.
inline std::vector<std::pair<std::string, std::string>> figures_from_table(
    const CsvTable& traj, const SimConfig& cfg) {
  const std::vector<double> t = traj.column("t");
  const std::size_t acted = detail::acted_rows(traj);
  const auto head = [&](std::vector<double> full) {
    full.resize(acted);
    return full;
  };

  std::vector<std::pair<std::string, std::string>> figures;

  {
    ChartSpec spec;
    spec.title = "Robot path";
    spec.x_label = "x [m]";
    spec.y_label = "y [m]";
    spec.series.push_back({"path", traj.column("x"), traj.column("y")});
    figures.emplace_back("path.svg",
                         path_chart_svg(spec, cfg.x_goal.x, cfg.x_goal.y));
  }
  {
    ChartSpec spec;
    spec.title = "State histories";
    spec.x_label = "t [s]";
    spec.series.push_back({"x [m]", t, traj.column("x")});
    spec.series.push_back({"y [m]", t, traj.column("y")});
    spec.series.push_back({"psi [rad]", t, traj.column("psi")});
    spec.series.push_back({"v [m/s]", t, traj.column("v")});
    spec.series.push_back({"omega [rad/s]", t, traj.column("omega")});
    figures.emplace_back("states.svg", line_chart_svg(spec));
  }
  {
    ChartSpec spec;
    spec.title = "Applied inputs";
    spec.x_label = "t [s]";
    spec.series.push_back({"thrust R [N]", head(t), head(traj.column("R"))});
    spec.series.push_back({"moment M [N m]", head(t), head(traj.column("M"))});
    figures.emplace_back("inputs.svg", line_chart_svg(spec));
  }
  {
    const ProxyParams truth = to_proxy(cfg.true_params, cfg.dt);
    const std::vector<double> flat_a_v(t.size(), truth.alpha_v);
    const std::vector<double> flat_b_v(t.size(), truth.beta_v);
    const std::vector<double> flat_a_w(t.size(), truth.alpha_w);
    const std::vector<double> flat_b_w(t.size(), truth.beta_w);
    ChartSpec spec;
    spec.title = "Parameter estimates";
    spec.x_label = "t [s]";
    spec.series.push_back(
        {"alpha_v est", t, traj.column("alpha_v_hat"), false, 0});
    spec.series.push_back({"alpha_v true", t, flat_a_v, true, 0});
    spec.series.push_back(
        {"beta_v est", t, traj.column("beta_v_hat"), false, 1});
    spec.series.push_back({"beta_v true", t, flat_b_v, true, 1});
    spec.series.push_back(
        {"alpha_w est", t, traj.column("alpha_w_hat"), false, 2});
    spec.series.push_back({"alpha_w true", t, flat_a_w, true, 2});
    spec.series.push_back(
        {"beta_w est", t, traj.column("beta_w_hat"), false, 3});
    spec.series.push_back({"beta_w true", t, flat_b_w, true, 3});
    figures.emplace_back("estimates.svg", line_chart_svg(spec));
  }
  {
    ChartSpec spec;
    spec.title = "One-step prediction errors";
    spec.x_label = "t [s]";
    spec.series.push_back({"eps_v", head(t), head(traj.column("eps_v"))});
    spec.series.push_back({"eps_w", head(t), head(traj.column("eps_w"))});
    figures.emplace_back("errors.svg", line_chart_svg(spec));
  }
  return figures;
}

/// Runs one closed-loop simulation and writes its artifact set into out_dir:
/// config snapshot, trajectory and estimator CSVs, five figures and a
/// summary. If the run aborts mid-way the partial CSVs are still written
/// before the error propagates.
inline RunArtifacts run_simulate(const SimConfig& cfg,
                                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  const auto path = [&](const char* name) {
    return (fs::path(out_dir) / name).string();
  };

  RunArtifacts art;
  art.config_snapshot = path("config.cfg");
  art.trajectory_csv = path("trajectory.csv");
  art.estimator_csv = path("estimator.csv");
  art.summary_file = path("summary.txt");
  write_text_file(art.config_snapshot, save_config(cfg));

  const auto t0 = std::chrono::steady_clock::now();
  TrajectoryLog log;
  try {
    log = run_closed_loop(cfg);
  } catch (const ClosedLoopError& e) {
    write_text_file(art.trajectory_csv, trajectory_csv(e.partial));
    write_text_file(art.estimator_csv, estimator_csv(e.partial));
    throw;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  write_text_file(art.trajectory_csv, trajectory_csv(log));
  write_text_file(art.estimator_csv, estimator_csv(log));

  // Figures are derived from the persisted CSV, not the in-memory log, so
  // what is plotted is exactly what was written.
  const CsvTable table = read_csv(art.trajectory_csv);
  for (const auto& [name, svg] : figures_from_table(table, cfg)) {
    const std::string p = path(name.c_str());
    write_text_file(p, svg);
    art.figures.push_back(p);
  }

  art.summary = summarize(log, cfg, wall);
  write_text_file(art.summary_file, detail::summary_text(art.summary, cfg));
  return art;
}

/// Runs the same scenario twice — adapting online vs. knowing the true
/// parameters — in parallel, then writes an overlay figure and a deviation
/// summary next to the two per-run directories.
inline CompareArtifacts run_compare(const SimConfig& cfg,
                                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  SimConfig cfg_adaptive = cfg;
  cfg_adaptive.adaptive = true;
  SimConfig cfg_known = cfg;
  cfg_known.adaptive = false;
  const std::string dir_adaptive = (fs::path(out_dir) / "adaptive").string();
  const std::string dir_known =
      (fs::path(out_dir) / "full_knowledge").string();

  auto known_future = std::async(std::launch::async, [&]() {
    return run_simulate(cfg_known, dir_known);
  });
  CompareArtifacts art;
  std::exception_ptr failure;
  try {
    art.adaptive = run_simulate(cfg_adaptive, dir_adaptive);
  } catch (...) {
    failure = std::current_exception();
  }
  try {
    art.full_knowledge = known_future.get();
  } catch (...) {
    if (!failure) failure = std::current_exception();
  }
  if (failure) std::rethrow_exception(failure);

  const CsvTable ta = read_csv(art.adaptive.trajectory_csv);
  const CsvTable tb = read_csv(art.full_knowledge.trajectory_csv);

  {
    ChartSpec spec;
    spec.title = "Path: adaptive vs. full knowledge";
    spec.x_label = "x [m]";
    spec.y_label = "y [m]";
    spec.series.push_back({"adaptive", ta.column("x"), ta.column("y")});
    spec.series.push_back(
        {"full knowledge", tb.column("x"), tb.column("y"), true});
    art.overlay_figure = (fs::path(out_dir) / "compare_paths.svg").string();
    write_text_file(art.overlay_figure,
                    path_chart_svg(spec, cfg.x_goal.x, cfg.x_goal.y));
  }

  const auto dev = [&](const char* col, std::size_t n) {
    const auto a = ta.column(col);
    const auto b = tb.column(col);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  const std::size_t rows = std::min(ta.rows.size(), tb.rows.size());
  const std::size_t acted = rows == 0 ? 0 : rows - 1;
  art.max_thrust_deviation = dev("R", acted);
  art.max_moment_deviation = dev("M", acted);
  {
    const auto xa = ta.column("x"), ya = ta.column("y");
    const auto xb = tb.column("x"), yb = tb.column("y");
    for (std::size_t i = 0; i < rows; ++i)
      art.max_position_deviation =
          std::max(art.max_position_deviation,
                   std::hypot(xa[i] - xb[i], ya[i] - yb[i]));
  }

  std::ostringstream out;
  out << "max_thrust_deviation = " << format_double(art.max_thrust_deviation)
      << "\n";
  out << "max_moment_deviation = " << format_double(art.max_moment_deviation)
      << "\n";
  out << "max_input_deviation = "
      << format_double(
             std::max(art.max_thrust_deviation, art.max_moment_deviation))
      << "\n";
  out << "max_position_deviation = "
      << format_double(art.max_position_deviation) << "\n";
  out << "adaptive_final_position_error = "
      << format_double(art.adaptive.summary.final_position_error) << "\n";
  out << "full_knowledge_final_position_error = "
      << format_double(art.full_knowledge.summary.final_position_error)
      << "\n";
  out << "adaptive_total_cost = "
      << format_double(art.adaptive.summary.total_cost) << "\n";
  out << "full_knowledge_total_cost = "
      << format_double(art.full_knowledge.summary.total_cost) << "\n";
  art.summary_file = (fs::path(out_dir) / "compare_summary.txt").string();
  write_text_file(art.summary_file, out.str());
  return art;
}

/// Replays the parameter estimator over a recorded trajectory CSV: each
/// consecutive row pair is one measured transition. Emits the estimate
/// history and a recap of what the final estimates imply physically.
inline IdentifyArtifacts run_identify(const std::string& trace_csv,
                                      const EstimatorInit& init,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!(std::isfinite(init.initial_gain) && init.initial_gain > 0.0))
    throw ConfigError("estimator.initial_gain: must be finite and > 0");
  const CsvTable table = read_csv(trace_csv);
  const auto t = table.column("t");
  const auto v = table.column("v");
  const auto omega = table.column("omega");
  const auto thrust = table.column("R");
  const auto moment = table.column("M");
  if (t.empty()) throw IoError("trace has no data rows: " + trace_csv);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  EstimatorState est{make_channel_estimate(init.theta0_v, init.initial_gain),
                     make_channel_estimate(init.theta0_w, init.initial_gain)};
  std::vector<ProxyParams> theta;
  std::vector<double> eps_v, eps_w;
  theta.reserve(t.size());
  theta.push_back(current_proxy(est));
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const State x{0.0, 0.0, 0.0, v[i], omega[i]};
    const Input u{thrust[i], moment[i]};
    const State x_next{0.0, 0.0, 0.0, v[i + 1], omega[i + 1]};
    eps_v.push_back(x_next.v - predict(est.v_channel, regressor_v(x, u)));
    eps_w.push_back(x_next.omega - predict(est.w_channel, regressor_w(x, u)));
    est = learn_step(est, x, u, x_next);
    theta.push_back(current_proxy(est));
  }

  IdentifyArtifacts art;
  art.final_state = est;
  art.transitions = eps_v.size();
  art.estimator_csv = (fs::path(out_dir) / "estimator.csv").string();
  write_text_file(art.estimator_csv, estimator_csv(t, theta, eps_v, eps_w));

  const ProxyParams th = current_proxy(est);
  std::ostringstream out;
  out << "transitions = " << art.transitions << "\n";
  out << "alpha_v_hat = " << format_double(th.alpha_v) << "\n";
  out << "beta_v_hat = " << format_double(th.beta_v) << "\n";
  out << "alpha_w_hat = " << format_double(th.alpha_w) << "\n";
  out << "beta_w_hat = " << format_double(th.beta_w) << "\n";
  if (!eps_v.empty()) {
    out << "final_eps_v = " << format_double(eps_v.back()) << "\n";
    out << "final_eps_w = " << format_double(eps_w.back()) << "\n";
  }
  if (t.size() >= 2) {
    const double dt = t[1] - t[0];
    out << "dt = " << format_double(dt) << "\n";
    try {
      const PhysicalParams ph = from_proxy(th, dt);
      out << "implied_mass = " << format_double(ph.mass) << "\n";
      out << "implied_linear_drag = " << format_double(ph.linear_drag) << "\n";
      out << "implied_inertia = " << format_double(ph.inertia) << "\n";
      out << "implied_angular_drag = " << format_double(ph.angular_drag)
          << "\n";
    } catch (const DomainError&) {
      out << "implied_params = not recoverable (nonpositive beta estimate)\n";
    }
  }
  art.summary_file = (fs::path(out_dir) / "identify_summary.txt").string();
  write_text_file(art.summary_file, out.str());
  return art;
}

/// Solves a single finite-horizon problem from the scenario's start state
/// with full knowledge of the parameters and writes the planned trajectory.
inline CftocArtifacts run_cftoc(const SimConfig& cfg,
                                const std::string& out_dir) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  const ProxyParams theta = to_proxy(cfg.true_params, cfg.dt);
  CftocArtifacts art;
  art.solution = solve(make_problem(cfg.x_init, theta, cfg));

  std::ostringstream csv;
  csv << "t,x,y,psi,v,omega,R,M\n";
  for (std::size_t k = 0; k < art.solution.x_pred.size(); ++k) {
    const State& s = art.solution.x_pred[k];
    const bool acted = k < art.solution.u_seq.size();
    const Input u = acted ? art.solution.u_seq[k] : Input{0.0, 0.0};
    csv << format_double(static_cast<double>(k) * cfg.dt) << ','
        << format_double(s.x) << ',' << format_double(s.y) << ','
        << format_double(s.psi) << ',' << format_double(s.v) << ','
        << format_double(s.omega) << ',' << format_double(u.thrust) << ','
        << format_double(u.moment) << '\n';
  }
  art.prediction_csv = (fs::path(out_dir) / "prediction.csv").string();
  write_text_file(art.prediction_csv, csv.str());

  {
    const CsvTable table = read_csv(art.prediction_csv);
    ChartSpec spec;
    spec.title = "Planned path";
    spec.x_label = "x [m]";
    spec.y_label = "y [m]";
    spec.series.push_back({"plan", table.column("x"), table.column("y")});
    art.figure = (fs::path(out_dir) / "planned_path.svg").string();
    write_text_file(art.figure,
                    path_chart_svg(spec, cfg.x_goal.x, cfg.x_goal.y));
  }

  std::ostringstream out;
  out << "horizon = " << cfg.horizon << "\n";
  out << "cost = " << format_double(art.solution.cost) << "\n";
  out << "iterations = " << art.solution.iterations << "\n";
  out << "converged = " << (art.solution.converged ? "true" : "false") << "\n";
  out << "projected_gradient_norm = " << format_double(art.solution.grad_norm)
      << "\n";
  const State& xf = art.solution.x_pred.back();
  out << "planned_final_position_error = "
      << format_double(std::hypot(xf.x - cfg.x_goal.x, xf.y - cfg.x_goal.y))
      << "\n";
  art.summary_file = (fs::path(out_dir) / "cftoc_summary.txt").string();
  write_text_file(art.summary_file, out.str());
  return art;
}

}  // namespace ampc
