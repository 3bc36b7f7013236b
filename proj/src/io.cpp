#include "rps/io.hpp"

#include <cstdio>

#include <json.hpp>

namespace rps {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t";
  for (Eigen::Index c = 0; c < traj.states.rows(); ++c) {
    os << ",x_" << (c + 1);
  }
  os << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_g17(traj.times[i]);
    for (Eigen::Index c = 0; c < traj.states.rows(); ++c) {
      os << "," << format_g17(traj.states(c, Eigen::Index(i)));
    }
    os << "\n";
  }
}

void write_error_table_csv(const ErrorTable& table, std::ostream& os) {
  os << "dt,rmse,n,stderr\n";
  for (const auto& row : table.rows) {
    os << format_g17(row.dt) << "," << format_g17(row.rmse) << "," << row.n
       << "," << format_g17(row.stderr_jackknife) << "\n";
  }
}

void write_diagnostic_csv(const DiagnosticSeries& series, std::ostream& os) {
  os << "t,value,seed\n";
  for (std::size_t i = 0; i < series.seeds.size(); ++i) {
    for (std::size_t j = 0; j < series.t_grid.size(); ++j) {
      os << format_g17(series.t_grid[j]) << ","
         << format_g17(series.values(Eigen::Index(i), Eigen::Index(j))) << ","
         << series.seeds[i] << "\n";
    }
  }
}

void write_pair_csv(const ShiftedPair& pair, std::ostream& os) {
  os << "t,base,shifted\n";
  for (std::size_t j = 0; j < pair.base.times.size(); ++j) {
    os << format_g17(pair.base.times[j]) << ","
       << format_g17(pair.base.states(0, Eigen::Index(j))) << ","
       << format_g17(pair.shifted.states(0, Eigen::Index(j))) << "\n";
  }
}

void write_measure_rows_csv(const std::vector<MeasureRow>& rows,
                            std::ostream& os) {
  os << "dt,distance,ci_lo,ci_hi,se\n";
  for (const auto& row : rows) {
    os << format_g17(row.dt) << "," << format_g17(row.distance) << ","
       << format_g17(row.ci_lo) << "," << format_g17(row.ci_hi) << ","
       << format_g17(row.se) << "\n";
  }
}

namespace {

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  // Row-major nested arrays.
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string pullback_result_to_json(const PullbackResult& result) {
  nlohmann::ordered_json j;
  j["r"] = result.r;
  j["dt"] = result.dt;
  j["k_used"] = result.k_used;
  j["converged"] = result.converged;
  j["cauchy_gaps"] = result.cauchy_gaps;
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < result.values.cols(); ++i) {
    if (result.values.rows() == 1) {
      values.push_back(result.values(0, i));
    } else {
      nlohmann::ordered_json v = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < result.values.rows(); ++c) {
        v.push_back(result.values(c, i));
      }
      values.push_back(v);
    }
  }
  j["values"] = values;
  j["seeds"] = result.seeds;
  return j.dump(2) + "\n";
}

std::string order_fit_to_json(const OrderFit& fit, const ErrorTable& table) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"dt", row.dt},
                    {"rmse", row.rmse},
                    {"n", row.n},
                    {"stderr", row.stderr_jackknife}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string floquet_to_json(const FloquetData& data, bool include_grids) {
  nlohmann::ordered_json j;
  j["tau"] = data.tau;
  j["h"] = data.h;
  j["n_nodes"] = data.phi_grid.size();
  j["gamma"] = data.gamma;
  j["log_residual"] = data.log_residual;
  j["C"] = matrix_to_json(data.C);
  j["B"] = matrix_to_json(data.B);
  if (include_grids) {
    nlohmann::ordered_json phi = nlohmann::ordered_json::array();
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    nlohmann::ordered_json s_inv = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < data.phi_grid.size(); ++k) {
      phi.push_back(matrix_to_json(data.phi_grid[k]));
      s.push_back(matrix_to_json(data.s_grid[k]));
      s_inv.push_back(matrix_to_json(data.s_inv_grid[k]));
    }
    j["phi_grid"] = phi;
    j["s_grid"] = s;
    j["s_inv_grid"] = s_inv;
  }
  return j.dump(2) + "\n";
}

}  // namespace rps
