#include "sbm/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbm {

Series Series::constant(int order, double value) {
  Series s(order);
  s[0] = value;
  return s;
}

Series Series::exp_linear(int order, double a) {
  Series s(order);
  double term = 1.0;
  for (int k = 0; k <= order; ++k) {
    s[k] = term;
    term *= a / (k + 1);
  }
  return s;
}

Series Series::one_minus_exp_over(int order, double a) {
  // sum_k (-a t)^k / (k+1)!
  Series s(order);
  double term = 1.0;
  for (int k = 0; k <= order; ++k) {
    s[k] = term;
    term *= -a / (k + 2);
  }
  return s;
}

Series operator+(const Series& a, const Series& b) {
  Series r(std::min(a.order(), b.order()));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

Series operator*(const Series& a, const Series& b) {
  Series r(std::min(a.order(), b.order()));
  for (int k = 0; k <= r.order(); ++k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += a[j] * b[k - j];
    r[k] = acc;
  }
  return r;
}

Series operator*(double s, const Series& a) {
  Series r = a;
  for (int k = 0; k <= r.order(); ++k) r[k] *= s;
  return r;
}

Series Series::pow(double p) const {
  if (!(c_[0] > 0)) throw std::domain_error("Series::pow needs a positive constant term");
  Series b(order());
  b[0] = std::pow(c_[0], p);
  for (int k = 1; k <= order(); ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += ((p + 1) * j - k) * c_[static_cast<std::size_t>(j)] * b[k - j];
    b[k] = acc / (k * c_[0]);
  }
  return b;
}

}  // namespace sbm
