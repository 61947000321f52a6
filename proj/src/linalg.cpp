#include "delayvar/linalg.hpp"
#include "delayvar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delayvar {

double max_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

Covector Covector::unit(Eigen::Index dim, Eigen::Index k) {
  Covector e(dim);
  e[k] = 1.0;
  return e;
}

std::vector<QuadNode> simpson_nodes(double a, double b, int intervals) {
  std::vector<QuadNode> out;
  append_simpson_nodes(a, b, intervals, out);
  return out;
}

void append_simpson_nodes(double a, double b, int intervals, std::vector<QuadNode>& out) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw std::invalid_argument("simpson: interval count must be even and >= 2");
  }
  const double h = (b - a) / intervals;
  const double third = h / 3.0;
  out.reserve(out.size() + intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double x = (i == intervals) ? b : a + i * h;
    double w = (i == 0 || i == intervals) ? 1.0 : ((i % 2 == 1) ? 4.0 : 2.0);
    out.push_back({x, w * third});
  }
}

void sort_unique(std::vector<double>& points, double merge_tol) {
  std::sort(points.begin(), points.end());
  auto last = std::unique(points.begin(), points.end(),
                          [merge_tol](double x, double y) { return std::abs(x - y) <= merge_tol; });
  points.erase(last, points.end());
}

std::vector<double> partition(double a, double b, std::span<const double> breakpoints,
                              double merge_tol) {
  std::vector<double> pts;
  pts.reserve(breakpoints.size() + 2);
  pts.push_back(a);
  for (double x : breakpoints) {
    if (x > a + merge_tol && x < b - merge_tol) pts.push_back(x);
  }
  pts.push_back(b);
  std::sort(pts.begin() + 1, pts.end() - 1);
  std::vector<double> out;
  out.reserve(pts.size());
  out.push_back(a);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (pts[i] - out.back() > merge_tol) out.push_back(pts[i]);
  }
  out.push_back(b);
  return out;
}

}  // namespace delayvar
