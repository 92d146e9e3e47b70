#include "sbm/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sbm/error.hpp"

namespace sbm {

double gamma_fn(double x) {
  if (x <= 0 && x == std::nearbyint(x))
    throw NumericError("Gamma evaluated at its pole x = " + std::to_string(x));
  return std::tgamma(x);
}

double gamma_residue(int l) {
  double fact = 1.0;
  for (int i = 2; i <= l; ++i) fact *= i;
  return (l % 2 == 0 ? 1.0 : -1.0) / fact;
}

double sphere_area(int n) {
  if (n < 1) throw ArgumentError("dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace sbm
