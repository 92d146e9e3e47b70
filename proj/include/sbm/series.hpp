#pragma once

#include <vector>

namespace sbm {

// Truncated power series in one variable, coefficients 0..order.
class Series {
 public:
  explicit Series(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}
  static Series constant(int order, double value);
  // e^(a t)
  static Series exp_linear(int order, double a);
  // (1 - e^(-a t)) / (a t)
  static Series one_minus_exp_over(int order, double a);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& coeffs() const { return c_; }

  friend Series operator+(const Series& a, const Series& b);
  friend Series operator*(const Series& a, const Series& b);
  friend Series operator*(double s, const Series& a);

  // a^p for a[0] > 0 (Miller recurrence).
  Series pow(double p) const;

 private:
  std::vector<double> c_;
};

}  // namespace sbm
