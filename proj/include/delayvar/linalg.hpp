#pragma once

#include <Eigen/Core>

namespace delayvar {

/// Primal vector in R^n. Normed by the max of absolute components.
using Vector = Eigen::VectorXd;

double max_norm(const Vector& v);

/// Element of the dual space R^n*. Normed by the sum of absolute components,
/// which makes it the dual norm of `max_norm`.
class Covector {
 public:
  Covector() = default;
  explicit Covector(Eigen::Index dim) : c_(Eigen::VectorXd::Zero(dim)) {}
  explicit Covector(Eigen::VectorXd components) : c_(std::move(components)) {}

  static Covector unit(Eigen::Index dim, Eigen::Index k);

  Eigen::Index dim() const { return c_.size(); }
  double operator[](Eigen::Index k) const { return c_[k]; }
  double& operator[](Eigen::Index k) { return c_[k]; }
  const Eigen::VectorXd& components() const { return c_; }

  double dual_norm() const { return c_.lpNorm<1>(); }

  /// Evaluation on a primal vector.
  double operator()(const Vector& v) const { return c_.dot(v); }

  Covector& operator+=(const Covector& o) {
    c_ += o.c_;
    return *this;
  }
  Covector& operator-=(const Covector& o) {
    c_ -= o.c_;
    return *this;
  }
  Covector& operator*=(double a) {
    c_ *= a;
    return *this;
  }

  friend Covector operator+(Covector a, const Covector& b) { return a += b; }
  friend Covector operator-(Covector a, const Covector& b) { return a -= b; }
  friend Covector operator*(double s, Covector a) { return a *= s; }
  friend Covector operator*(Covector a, double s) { return a *= s; }
  friend bool operator==(const Covector& a, const Covector& b) { return a.c_ == b.c_; }

 private:
  Eigen::VectorXd c_;
};

}  // namespace delayvar
