#pragma once

#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ampc/controller.hpp"
#include "ampc/errors.hpp"
#include "ampc/strings.hpp"

namespace ampc {

inline constexpr std::string_view kTrajectoryHeader =
    "t,x,y,psi,v,omega,R,M,alpha_v_hat,beta_v_hat,alpha_w_hat,beta_w_hat,"
    "eps_v,eps_w,cost,iters,converged";

inline constexpr std::string_view kEstimatorHeader =
    "t,alpha_v_hat,beta_v_hat,alpha_w_hat,beta_w_hat,eps_v,eps_w";

/// Renders a closed-loop log as CSV. One row per visited state: row i holds
/// the state at time i*dt, the action taken there and the estimates that
/// chose it. The final row is the terminal state; its action, residual, cost
/// and iteration columns are zero and converged is 1 since no further move
/// was computed. Numbers use shortest round-trip formatting, so re-parsing
/// reproduces the exact values.
inline std::string trajectory_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < log.states.size(); ++i) {
    const State& s = log.states[i];
    const bool acted = i < log.inputs.size();
    const Input u = acted ? log.inputs[i] : Input{0.0, 0.0};
    const ProxyParams& th = log.theta[i];
    out << format_double(static_cast<double>(i) * log.dt) << ','
        << format_double(s.x) << ',' << format_double(s.y) << ','
        << format_double(s.psi) << ',' << format_double(s.v) << ','
        << format_double(s.omega) << ',' << format_double(u.thrust) << ','
        << format_double(u.moment) << ',' << format_double(th.alpha_v) << ','
        << format_double(th.beta_v) << ',' << format_double(th.alpha_w) << ','
        << format_double(th.beta_w) << ','
        << format_double(acted ? log.eps_v[i] : 0.0) << ','
        << format_double(acted ? log.eps_w[i] : 0.0) << ','
        << format_double(acted ? log.cost[i] : 0.0) << ','
        << (acted ? log.iterations[i] : 0) << ','
        << (acted ? int(log.converged[i]) : 1) << '\n';
  }
  return out.str();
}

/// Renders an estimate history as CSV: row i holds the parameter estimates
/// in force at time t[i] and the prediction errors of the step taken there
/// (zero on the final row, where no step follows).
inline std::string estimator_csv(std::span<const double> t,
                                 std::span<const ProxyParams> theta,
                                 std::span<const double> eps_v,
                                 std::span<const double> eps_w) {
  std::ostringstream out;
  out << kEstimatorHeader << '\n';
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(theta[i].alpha_v) << ','
        << format_double(theta[i].beta_v) << ','
        << format_double(theta[i].alpha_w) << ','
        << format_double(theta[i].beta_w) << ','
        << format_double(i < eps_v.size() ? eps_v[i] : 0.0) << ','
        << format_double(i < eps_w.size() ? eps_w[i] : 0.0) << '\n';
  }
  return out.str();
}

inline std::string estimator_csv(const TrajectoryLog& log) {
  std::vector<double> t(log.theta.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<double>(i) * log.dt;
  return estimator_csv(t, log.theta, log.eps_v, log.eps_w);
}

/// A parsed numeric CSV file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError("csv: no column named '" + std::string(name) + "'");
  }

  /// All values of one named column, in row order.
  std::vector<double> column(std::string_view name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
    return out;
  }
};

/// Parses comma-separated numeric data with a header line. Ragged rows and
/// non-numeric cells are IoErrors naming the offending row.
inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t row_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    std::string_view line =
        nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{}
                                        : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    ++row_no;
    const auto cells = split_char(line, ',');
    if (row_no == 1) {
      for (const auto& c : cells) table.header.emplace_back(trim(c));
      continue;
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_double(trim(cells[j]));
      if (!v)
        throw IoError("csv row " + std::to_string(row_no) +
                      ": cell in column '" +
                      (j < table.header.size() ? table.header[j]
                                               : std::to_string(j)) +
                      "' is not a number: '" + std::string(cells[j]) + "'");
      row[j] = *v;
    }
    if (row.size() != table.header.size())
      throw IoError("csv row " + std::to_string(row_no) + ": expected " +
                    std::to_string(table.header.size()) + " cells, got " +
                    std::to_string(row.size()));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw IoError("csv: missing header line");
  return table;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << text;
  if (!out) throw IoError("failed while writing: " + path);
}

inline CsvTable read_csv(const std::string& path) {
  return parse_csv(read_text_file(path));
}

}  // namespace ampc
