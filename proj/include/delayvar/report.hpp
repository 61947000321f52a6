#pragma once

// CSV and SVG artifacts. Numbers are written with 17 significant digits so
// files round-trip exactly and identical runs give identical bytes.

#include "delayvar/euler_lagrange.hpp"
#include "delayvar/identity.hpp"
#include "delayvar/solver.hpp"
#include "delayvar/trajectory.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace delayvar {

/// "%.17g".
std::string format_number(double v);

/// Columns t, x1..xn, dx1..dxn. History rows (t < 0, one per grid step)
/// leave the derivative columns empty; node rows carry the Hermite data.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& x);

/// Node values and slopes read back from `write_trajectory_csv` output.
/// Throws std::runtime_error unless the node rows match the grid and dimension.
struct TrajectoryData {
  Eigen::MatrixXd values;
  Eigen::MatrixXd slopes;
};
TrajectoryData read_trajectory_csv(const std::filesystem::path& path, const Grid& grid, Eigen::Index dim);

/// Columns t, q_k, P_k, c_k, residual_k for k = 1..n.
void write_el_report_csv(const std::filesystem::path& path, const ELReport& el);

/// One header row and one data row.
void write_key_value_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& fields);

void write_levels_csv(const std::filesystem::path& path, const ConvergenceTable& table);

void write_identity_csv(const std::filesystem::path& path, const IdentityReport& rep);

/// Trajectory components over [-r, T] and the residual components over
/// [0, T], one polyline chart each.
void write_plot_svg(const std::filesystem::path& path, const Trajectory& x, const ELReport& el);

}  // namespace delayvar
