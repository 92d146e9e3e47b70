#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "approx.hpp"
#include "doctest.h"
#include "sbm/bernstein.hpp"
#include "sbm/error.hpp"

using namespace sbm;
using namespace sbm::bernstein;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);

// Independent scheme: Gauss-Kronrod after t = s^q, which removes the t^(-alpha) singularity.
double gk_laplace_exponent(const LevySpec& spec, double lambda) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double a = spec.alpha_value();
  double q = 1.0 / (1.0 - a);
  auto near = [&](double s) {
    double t = std::pow(s, q);
    return -std::expm1(-lambda * t) * spec.density(t) * q * std::pow(s, q - 1);
  };
  auto far = [&](double t) { return -std::expm1(-lambda * t) * spec.density(t); };
  return GK::integrate(near, 0.0, 1.0, 20, 1e-13) + GK::integrate(far, 1.0, 200.0, 20, 1e-13);
}
}  // namespace

TEST_CASE("catalog coefficients") {
  auto rel = catalog("relativistic");
  double k = 0.5 / kSqrtPi;
  CHECK(rel.p()[0] == rel_approx(k));
  CHECK(rel.p()[1] == rel_approx(-k));
  CHECK(rel.p()[2] == rel_approx(k / 2));
  CHECK(rel.p()[3] == rel_approx(-k / 6));
  CHECK(rel.order() == 12);

  for (Rational a : {Rational(1, 3), Rational(7, 10)}) {
    auto r = catalog("relativistic", {a, 1.0});
    double av = a.to_double();
    CHECK(r.p()[0] == rel_approx(av / std::tgamma(1 - av)));
    CHECK(r.p()[1] == rel_approx(-av / std::tgamma(1 - av)));
  }

  auto v = catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  double a = 1.0 / 3, p0 = std::pow(a, 1 + a) / std::tgamma(1 - a);
  CHECK(v.p()[0] == rel_approx(p0));
  CHECK(v.p()[1] == rel_approx(p0 * (a - 1) / (2 * a)));
  CHECK(std::fabs(v.p()[2]) < 1e-15);  // 3a^2 - 7a + 2 = 0 at a = 1/3
  auto v7 = catalog("gamma-ratio-2", {Rational(7, 10), 1.0});
  a = 0.7;
  p0 = std::pow(a, 1 + a) / std::tgamma(1 - a);
  CHECK(v7.p()[2] == rel_approx(p0 * (3 * a * a - 7 * a + 2) / (24 * a * a)));

  double c = 2.0;
  auto ii = catalog("power-ratio", {Rational(1, 3), c});
  double ap = 2.0 / 3, kk = 1.0 / std::tgamma(1 - ap);
  CHECK(ii.alpha() == Rational(2, 3));
  CHECK(ii.p()[0] == rel_approx(kk * ap));
  CHECK(ii.p()[1] == rel_approx(kk * c * (1 - ap)));
  CHECK(ii.p()[2] == rel_approx(kk * c * c * (ap / 2 - 1)));

  auto iii = catalog("exp-root", {Rational(1, 2), c});
  CHECK(iii.p()[1] == rel_approx(c / (2 * kSqrtPi)));
  CHECK(iii.p()[2] == rel_approx(-1.5 * c * c / (2 * kSqrtPi)));

  auto iv = catalog("gamma-ratio-1", {Rational(1, 2), c});
  double k4 = 1 / std::sqrt(32 * std::numbers::pi);
  CHECK(iv.p()[0] == rel_approx(k4));
  CHECK(iv.p()[1] == rel_approx(k4 * c / 2));
  CHECK(iv.p()[2] == rel_approx(-k4 * c * c / 8));

  CHECK_THROWS_AS(catalog("nope"), ArgumentError);
  CHECK_THROWS_AS(catalog("relativistic", {Rational(3, 2), 1.0}), ArgumentError);
  CHECK_THROWS_AS(catalog("exp-root", {Rational(1, 3), 1.0}), ArgumentError);
  CHECK_THROWS_AS(catalog("power-ratio", {Rational(1, 2), -1.0}), ArgumentError);
}

TEST_CASE("catalog Taylor coefficients agree with a polynomial fit of the density") {
  for (std::string name : {"relativistic", "power-ratio", "exp-root", "gamma-ratio-1", "gamma-ratio-2"}) {
    auto spec = catalog(name, {Rational(1, 2), 1.0});
    const int deg = 6, pts = 40;
    Eigen::MatrixXd A(pts, deg + 1);
    Eigen::VectorXd y(pts);
    for (int i = 0; i < pts; ++i) {
      double t = 0.0005 * (i + 1);
      y(i) = spec.regular(t);
      for (int k = 0; k <= deg; ++k) A(i, k) = std::pow(t, k);
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    for (int k = 0; k <= 2; ++k) {
      INFO(name << " k=" << k);
      CHECK(c(k) == rel_approx(spec.p()[static_cast<std::size_t>(k)]).epsilon(1e-6));
    }
  }
}

TEST_CASE("mbar") {
  CHECK(catalog("relativistic").mbar() == rel_approx(-1.0).epsilon(1e-11));
  for (Rational a : {Rational(1, 3), Rational(1, 2), Rational(7, 10)}) {
    double av = a.to_double();
    auto v = catalog("gamma-ratio-2", {a, 1.0});
    CHECK(v.mbar() == rel_approx(-1.0 / std::tgamma(1 - av)).epsilon(1e-10));
  }
  auto ts = custom(Rational(1, 2), {0.7}, "truncated-stable");
  CHECK(mbar(ts, QuadConfig{1e-12}) == rel_approx(-0.7 / 0.5).epsilon(1e-11));
  // f of examples (ii)-(iv) has no constant term at infinity
  CHECK(std::fabs(catalog("gamma-ratio-1").mbar()) < 1e-11);
  CHECK(std::fabs(catalog("power-ratio").mbar()) < 1e-11);
  CHECK(std::fabs(catalog("exp-root").mbar()) < 1e-11);
}

TEST_CASE("Laplace exponent against closed forms") {
  auto rel = catalog("relativistic");
  CHECK(eval_f(rel, 3.0) == rel_approx(1.0).epsilon(1e-11));
  CHECK(eval_f(rel, 0.0) == 0.0);
  for (double lambda : {1e-3, 0.5, 7.0, 1e3, 1e6})
    CHECK(eval_f(rel, lambda) == rel_approx(std::sqrt(lambda + 1) - 1).epsilon(1e-11));

  auto ii = catalog("power-ratio", {Rational(1, 2), 1.0});
  CHECK(eval_f(ii, 10.0) == rel_approx(10 / std::sqrt(11.0)).epsilon(1e-11));

  auto iii = catalog("exp-root", {Rational(1, 2), 1.5});
  for (double lambda : {0.3, 4.0, 50.0}) {
    double s = std::sqrt(lambda + 1.5);
    CHECK(eval_f(iii, lambda) == rel_approx(lambda * (1 - std::exp(-2 * s)) / s).epsilon(1e-10));
  }

  // the printed density of (iv) integrates to sqrt(c)/2 times the printed Bernstein function
  auto iv = catalog("gamma-ratio-1", {Rational(1, 2), 2.0});
  for (double lambda : {0.3, 4.0, 50.0}) {
    double c = 2.0;
    double want = 0.5 * std::sqrt(c) * std::exp(std::lgamma((lambda + c) / (2 * c)) - std::lgamma(lambda / (2 * c)));
    CHECK(eval_f(iv, lambda) == rel_approx(want).epsilon(1e-10));
  }

  // (v): the density is that of f - f(0)
  for (Rational a : {Rational(1, 3), Rational(1, 2)}) {
    auto v = catalog("gamma-ratio-2", {a, 1.0});
    double av = a.to_double();
    for (double lambda : {0.3, 4.0, 50.0}) {
      double want = std::exp(std::lgamma(av * lambda + 1) - std::lgamma(av * lambda + 1 - av)) -
                    1 / std::tgamma(1 - av);
      CHECK(eval_f(v, lambda) == rel_approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("split evaluation equals direct quadrature of the density") {
  for (const char* name : {"relativistic", "gamma-ratio-2", "exp-root"}) {
    auto spec = catalog(name);
    for (double lambda : {0.1, 2.0, 30.0, 1e3}) {
      INFO(name << " lambda=" << lambda);
      CHECK(std::fabs(eval_f(spec, lambda) - gk_laplace_exponent(spec, lambda)) < 1e-9);
    }
  }
}

TEST_CASE("Bernstein property on a grid") {
  auto spec = catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    double lambda = std::pow(10.0, -2 + 0.3 * i);
    double f = eval_f(spec, lambda);
    CHECK(f > prev);
    prev = f;
    CHECK(f_derivative(spec, 1, lambda) > 0);
    CHECK(f_derivative(spec, 2, lambda) < 0);
    CHECK(f_derivative(spec, 3, lambda) > 0);
  }
}

TEST_CASE("derivatives") {
  auto rel = catalog("relativistic");
  CHECK(f_derivative(rel, 1, 3.0) == rel_approx(0.25).epsilon(1e-11));
  CHECK(f_derivative(rel, 2, 0.0) == rel_approx(-0.25).epsilon(1e-11));
  CHECK(f_derivative(rel, 2, 8.0) == rel_approx(-0.25 * std::pow(9.0, -1.5)).epsilon(1e-11));
  CHECK(f_derivative(rel, 3, 1.0) > 0);
  CHECK_THROWS_AS(f_derivative(rel, 0, 1.0), ArgumentError);
}

TEST_CASE("Watson expansion") {
  auto rel = catalog("relativistic");
  auto w = watson_expand(rel, 4);
  REQUIRE(w.size() == 5);
  const Rational ex[] = {Rational(1, 2), Rational(0), Rational(-1, 2), Rational(-3, 2), Rational(-5, 2)};
  const double co[] = {1, -1, 0.5, -0.125, 0.0625};
  for (int i = 0; i < 5; ++i) {
    CHECK(w[static_cast<std::size_t>(i)].exponent == ex[i]);
    CHECK(w[static_cast<std::size_t>(i)].coeff == rel_approx(co[i]).epsilon(1e-12));
  }
  CHECK(w[1].is_shift);
  for (Rational a : {Rational(1, 5), Rational(4, 5)}) {
    auto s = catalog("gamma-ratio-2", {a, 1.0});
    auto ws = watson_expand(s, 1, -1.0);
    double av = a.to_double();
    CHECK(ws[0].coeff == rel_approx(std::tgamma(1 - av) / av * s.p()[0]));
    CHECK(ws[0].coeff > 0);
  }
  CHECK_THROWS_AS(watson_expand(rel, 14, -1.0), ArgumentError);
}

TEST_CASE("remainder decay slopes") {
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(std::pow(10.0, 2 + 0.5 * i));
  auto rel = catalog("relativistic");
  auto c2 = check_expansion(rel, 2, grid);
  CHECK(c2.pass);
  CHECK(c2.slope == rel_approx(-1.5).epsilon(0.02));
  // closed-form remainder of sqrt(lambda+1) - 1 - (lambda^(1/2) - 1 + lambda^(-1/2)/2)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double l = grid[i];
    // = -1 / (2 sqrt(l) (sqrt(l+1) + sqrt(l))^2), free of cancellation
    double sum = std::sqrt(l + 1) + std::sqrt(l);
    double exact = -1 / (2 * std::sqrt(l) * sum * sum);
    CHECK(c2.remainders[i] == rel_approx(exact).epsilon(1e-6));
  }
  auto c0 = check_expansion(rel, 0, grid);
  CHECK(c0.slope == rel_approx(0.5).epsilon(0.02));

  std::vector<double> small_grid(grid.begin(), grid.begin() + 5);
  auto iii = check_expansion(catalog("exp-root"), 1, small_grid);
  CHECK(iii.pass);

  // p_2 = 0 at alpha = 1/3, so the N = 2 remainder decays like lambda^(alpha-3)
  auto v = check_expansion(catalog("gamma-ratio-2", {Rational(1, 3), 1.0}), 2, grid);
  CHECK(v.slope == rel_approx(1.0 / 3 - 3).epsilon(0.02));
  CHECK_FALSE(v.pass);
  auto vh = check_expansion(catalog("gamma-ratio-2", {Rational(1, 2), 1.0}), 2, grid);
  CHECK(vh.pass);
  CHECK_THROWS_AS(check_expansion(rel, 2, std::vector<double>{1.0, 100.0}), ArgumentError);
}

TEST_CASE("validation") {
  CHECK(validate(catalog("relativistic")).ok());
  CHECK(validate(catalog("gamma-ratio-2", {Rational(1, 3), 1.0})).ok());
  auto ii = validate(catalog("power-ratio"));
  CHECK_FALSE(ii.ok());
  CHECK_FALSE(ii.mbar_negative);
  CHECK(ii.expansion_consistent);

  auto ok = custom(Rational(1, 2), {0.5 / kSqrtPi, -0.5 / kSqrtPi, 0.25 / kSqrtPi}, "relativistic");
  CHECK(validate(ok).ok());
  auto bad = custom(Rational(1, 2), {0.5 / kSqrtPi, -0.4 / kSqrtPi, 0.25 / kSqrtPi}, "relativistic");
  auto rb = validate(bad);
  CHECK_FALSE(rb.expansion_consistent);
  auto ts = custom(Rational(1, 2), {0.3}, "truncated-stable");
  CHECK(validate(ts).ok());
  CHECK_THROWS_AS(custom(Rational(1, 2), {-1.0}, "relativistic"), ArgumentError);
  CHECK_THROWS_AS(custom(Rational(1, 2), {1.0}, "unknown"), ArgumentError);
}
