#pragma once

#include <span>
#include <vector>

namespace delayvar {

struct QuadNode {
  double x;
  double w;
};

/// Composite Simpson nodes on [a, b] with `intervals` (even, >= 2) equal
/// subintervals. The first and last node are the endpoints a and b.
std::vector<QuadNode> simpson_nodes(double a, double b, int intervals);

/// Appends the composite Simpson nodes of [a, b] to `out`.
void append_simpson_nodes(double a, double b, int intervals, std::vector<QuadNode>& out);

/// Sorted partition a = p0 < p1 < ... < pk = b containing every breakpoint
/// strictly inside (a, b). Points closer than `merge_tol` collapse into one.
std::vector<double> partition(double a, double b, std::span<const double> breakpoints,
                              double merge_tol);

/// Sorts and removes near-duplicates (closer than `merge_tol`) in place.
void sort_unique(std::vector<double>& points, double merge_tol);

/// Composite Simpson of f on [a, b]. f may return any type closed under
/// addition and scalar multiplication.
template <class F>
auto simpson(F&& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  auto sum = f(a);
  sum += f(b);
  for (int i = 1; i < intervals; ++i) {
    sum += ((i % 2 == 1) ? 4.0 : 2.0) * f(a + i * h);
  }
  sum *= h / 3.0;
  return sum;
}

}  // namespace delayvar
