#pragma once

#include "delayvar/linalg.hpp"
#include "delayvar/measures.hpp"
#include "delayvar/trajectory.hpp"

#include <Eigen/Core>
#include <functional>
#include <initializer_list>
#include <vector>

namespace testing {

using delayvar::Covector;
using delayvar::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Covector cov(std::initializer_list<double> xs) { return Covector(vec(xs)); }

inline Vector scalar(double x) { return vec({x}); }

/// Scalar segment function theta -> f(theta).
inline delayvar::SegmentFunction scalar_segment(double r, std::function<double(double)> f,
                                                std::vector<double> kinks = {}) {
  return delayvar::SegmentFunction(1, r, [f](double th) { return scalar(f(th)); }, std::move(kinks));
}

/// Hermite data sampled from a curve and its derivative at the grid nodes.
inline delayvar::Trajectory sample_trajectory(const delayvar::HistoryFunction& psi, const delayvar::Grid& grid,
                                              const std::function<Vector(double)>& f,
                                              const std::function<Vector(double)>& df) {
  const int N = grid.intervals();
  Eigen::MatrixXd values(psi.dim(), N + 1);
  Eigen::MatrixXd slopes(psi.dim(), N + 1);
  for (int j = 0; j <= N; ++j) {
    values.col(j) = f(grid.node(j));
    slopes.col(j) = df(grid.node(j));
  }
  return delayvar::Trajectory(psi, grid, values, slopes);
}

inline delayvar::Perturbation sample_perturbation(const delayvar::Grid& grid, double r, Eigen::Index dim,
                                                  const std::function<Vector(double)>& f,
                                                  const std::function<Vector(double)>& df) {
  const int N = grid.intervals();
  Eigen::MatrixXd values(dim, N + 1);
  Eigen::MatrixXd slopes(dim, N + 1);
  for (int j = 0; j <= N; ++j) {
    values.col(j) = f(grid.node(j));
    slopes.col(j) = df(grid.node(j));
  }
  values.col(0).setZero();
  values.col(N).setZero();
  return delayvar::Perturbation(grid, r, values, slopes);
}

}  // namespace testing
