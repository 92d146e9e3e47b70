#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "approx.hpp"
#include "doctest.h"
#include "sbm/error.hpp"
#include "sbm/symbolic.hpp"

using namespace sbm;
using namespace sbm::symbolic;

namespace {

// Lanczos (g = 7, n = 9) complex Gamma; test-only oracle.
std::complex<double> cgamma(std::complex<double> z) {
  static const double p[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * cgamma(1.0 - z));
  z -= 1.0;
  std::complex<double> x = p[0];
  for (int i = 1; i < 9; ++i) x += p[i] / (z + double(i));
  std::complex<double> t = z + 7.5;
  return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Neumann-series oracle: 1/(D - S) = sum_n S^n / D^(n+1) with S = sum_j alpha_j r^(2a-2j) eps^(2j).
// The eps^k coefficient of S^n becomes the (m = n+1, r^(2 a n - k)) term of b_k.
std::vector<std::map<int, CoeffPoly>> neumann_oracle(int K) {
  auto vars = symbolic_coefficients((K + 1) / 2);
  std::vector<CoeffPoly> S(static_cast<std::size_t>(K + 1));
  for (int j = 1; 2 * j <= K; ++j) S[static_cast<std::size_t>(2 * j)] = vars[static_cast<std::size_t>(j - 1)];
  std::vector<std::map<int, CoeffPoly>> out(static_cast<std::size_t>(K + 1));
  std::vector<CoeffPoly> power(static_cast<std::size_t>(K + 1));
  power[0] = CoeffPoly(Rational(1));
  for (int n = 0; n <= K; ++n) {
    for (int k = 0; k <= K; ++k)
      if (!power[static_cast<std::size_t>(k)].is_zero()) out[static_cast<std::size_t>(k)][n + 1] = power[static_cast<std::size_t>(k)];
    std::vector<CoeffPoly> next(static_cast<std::size_t>(K + 1));
    for (int a = 0; a <= K; ++a)
      for (int b = 0; a + b <= K; ++b)
        next[static_cast<std::size_t>(a + b)] += power[static_cast<std::size_t>(a)] * S[static_cast<std::size_t>(b)];
    power = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("startup self-test") {
  std::string msg;
  CHECK(self_test(&msg));
  CHECK(msg.empty());
}

TEST_CASE("shifted symbol coefficients") {
  auto rel = bernstein::catalog("relativistic");
  auto s = shifted_symbol(rel, 3);
  CHECK(s.coeffs[0] == rel_approx(1.0).epsilon(1e-14));
  CHECK(s.coeffs[1] == rel_approx(0.5).epsilon(1e-14));
  CHECK(s.coeffs[2] == rel_approx(-0.125).epsilon(1e-14));
  CHECK(s.coeffs[3] == rel_approx(0.0625).epsilon(1e-14));
  CHECK(s.shift == rel_approx(1.0).epsilon(1e-11));
  CHECK(s.slot(3) == 0.0);
  CHECK(s.slot(4) == s.coeffs[2]);
  for (Rational a : {Rational(1, 3), Rational(7, 10)}) {
    auto spec = bernstein::catalog("relativistic", {a, 1.0});
    CHECK(shifted_symbol(spec, 2).coeffs[0] == rel_approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(shifted_symbol(rel, 13), ArgumentError);
}

TEST_CASE("exact relativistic regression through k = 4") {
  auto t0 = std::chrono::steady_clock::now();
  auto series = shifted_symbol(bernstein::catalog("relativistic"), 4);
  auto exact = exact_coefficients(series);
  REQUIRE(exact.has_value());
  CHECK((*exact)[0] == Rational(1));
  CHECK((*exact)[1] == Rational(1, 2));
  CHECK((*exact)[2] == Rational(-1, 8));
  CHECK((*exact)[3] == Rational(1, 16));
  CHECK((*exact)[4] == Rational(-5, 128));
  std::vector<Rational> higher(exact->begin() + 1, exact->end());
  auto pole = parametrix_levels<Rational>(higher, 4);
  REQUIRE(pole[4].terms.size() == 2);
  // b_4 = -1/8 r^(-3) (lambda - r)^(-2) + 1/4 r^(-2) (lambda - r)^(-3) at alpha = 1/2
  CHECK(pole[4].terms[0].c == Rational(-1, 8));
  CHECK(pole[4].terms[0].radial.at(Rational(1, 2)) == Rational(-3));
  CHECK(pole[4].terms[1].c == Rational(1, 4));
  CHECK(pole[4].terms[1].radial.at(Rational(1, 2)) == Rational(-2));
  auto power = power_levels(pole);
  // k = 4: (1/8)(z^2 + 2z)
  CHECK(power[4].terms[0].z_poly == std::vector<Rational>{Rational(0), Rational(1, 8)});
  CHECK(power[4].terms[1].z_poly == std::vector<Rational>{Rational(0), Rational(1, 8), Rational(1, 8)});
  auto heat = heat_levels(pole);
  CHECK(heat[2].terms[0].t_poly == std::vector<Rational>{Rational(0), Rational(-1, 2)});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
}

TEST_CASE("parametrix matches the Neumann-series oracle") {
  const int K = 10;
  auto vars = symbolic_coefficients(K / 2);
  auto pole = parametrix_levels<CoeffPoly>(vars, K);
  auto oracle = neumann_oracle(K);
  for (int k = 0; k <= K; ++k) {
    INFO("k = " << k);
    const auto& level = pole[static_cast<std::size_t>(k)];
    const auto& want = oracle[static_cast<std::size_t>(k)];
    REQUIRE(level.terms.size() == want.size());
    for (const auto& t : level.terms) {
      REQUIRE(want.count(t.m) == 1);
      CHECK(t.c == want.at(t.m));
      CHECK(t.radial == AlphaAffine{Rational(2 * (t.m - 1)), Rational(-k)});
    }
  }
  // k = 6: alpha_3 D^-2 + 2 alpha_1 alpha_2 D^-3 + alpha_1^3 D^-4
  const auto& b6 = pole[6].terms;
  REQUIRE(b6.size() == 3);
  CHECK(b6[0].c.to_string() == "a3");
  CHECK(b6[1].c.to_string() == "2*a1*a2");
  CHECK(b6[2].c.to_string() == "a1^3");
}

TEST_CASE("parametrix invariants") {
  const int K = 12;
  auto vars = symbolic_coefficients(K / 2);
  auto pole = parametrix_levels<CoeffPoly>(vars, K);
  CHECK(parametrix_residual<CoeffPoly>(vars, pole).empty());
  for (const auto& level : pole) {
    if (level.k % 2 == 1) CHECK(level.terms.empty());
    for (const auto& t : level.terms) {
      // q - 2 alpha m = -2 alpha - k
      CHECK(t.radial.a - Rational(2 * t.m) == Rational(-2));
      CHECK(t.radial.b == Rational(-level.k));
    }
  }
  auto heat = heat_levels(pole);
  CHECK(heat[0].terms.size() == 1);
  auto power = power_levels(pole);
  CHECK(power[0].terms[0].j == 0);

  // a truncated residual must not cancel when a coefficient is dropped
  std::vector<CoeffPoly> fewer(vars.begin(), vars.begin() + 2);
  auto short_pole = parametrix_levels<CoeffPoly>(fewer, 4);
  short_pole[4].terms.pop_back();
  CHECK_FALSE(parametrix_residual<CoeffPoly>(fewer, short_pole).empty());
}

TEST_CASE("truncation is never silent") {
  SymbolSeries s{Rational(1, 2), false, {1.0, 0.5}, 1.0};
  CHECK_NOTHROW(parametrix(s, 2));
  CHECK_THROWS_AS(parametrix(s, 3), ArgumentError);
  SymbolSeries bad{Rational(1, 2), false, {-1.0, 0.5}, 1.0};
  CHECK_THROWS_AS(parametrix(bad, 2), ValidationError);
}

TEST_CASE("heat and power symbols agree through the inverse Mellin transform") {
  auto series = shifted_symbol(bernstein::catalog("relativistic"), 4);
  auto par = parametrix(series, 8);
  auto heat = heat_symbol(par);
  auto power = complex_power_symbol(par);
  using GK = boost::math::quadrature::gauss_kronrod<double, 41>;
  const double c = 0.5;
  for (double r : {1.0, 2.5}) {
    for (double t : {0.3, 1.2}) {
      for (int k : {0, 2, 4, 6, 8}) {
        HeatSymbolSeries single{heat.alpha, heat.alpha0, {heat.levels[static_cast<std::size_t>(k)]}};
        double want = single.evaluate(r, t);
        auto integrand = [&](double y) {
          std::complex<double> z(c, y);
          std::complex<double> sig = power.s(k, z) * std::exp((-2 * 0.5 * z - double(k)) * std::log(r));
          return (cgamma(z) * std::exp(-z * std::log(t)) * sig).real();
        };
        double got = 0.0;
        for (int seg = -8; seg < 8; ++seg) got += GK::integrate(integrand, 10.0 * seg, 10.0 * (seg + 1), 10, 1e-13);
        got /= 2 * std::numbers::pi;
        INFO("r=" << r << " t=" << t << " k=" << k);
        CHECK(std::fabs(got - want) < 1e-6);
      }
    }
  }
}

TEST_CASE("scaling covariance") {
  auto spec = bernstein::catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  const double s = 2.5;
  auto a = shifted_symbol(spec, 4);
  auto b = shifted_symbol(spec.scaled(s), 4);
  for (std::size_t j = 0; j < a.coeffs.size(); ++j) CHECK(b.coeffs[j] == rel_approx(s * a.coeffs[j]));
  auto pa = parametrix(a, 8), pb = parametrix(b, 8);
  for (std::size_t k = 0; k < pa.levels.size(); ++k) {
    REQUIRE(pa.levels[k].terms.size() == pb.levels[k].terms.size());
    for (std::size_t i = 0; i < pa.levels[k].terms.size(); ++i) {
      const auto& x = pa.levels[k].terms[i];
      const auto& y = pb.levels[k].terms[i];
      CHECK(x.radial == y.radial);
      CHECK(x.m == y.m);
      // a degree-(m-1) monomial in the alpha_j
      CHECK(y.c == rel_approx(std::pow(s, x.m - 1) * x.c));
    }
  }
  auto ha = heat_symbol(pa), hb = heat_symbol(pb);
  CHECK(hb.alpha0 == rel_approx(s * ha.alpha0));
  HeatSymbolSeries k0a{ha.alpha, ha.alpha0, {ha.levels[0]}};
  HeatSymbolSeries k0b{hb.alpha, hb.alpha0, {hb.levels[0]}};
  CHECK(k0b.evaluate(2.0, 0.7) == rel_approx(k0a.evaluate(2.0, s * 0.7)));
}

TEST_CASE("ellipticity") {
  auto rel = bernstein::catalog("relativistic");
  auto s = shifted_symbol(rel, 2);
  auto grid = default_xi_grid();
  CHECK(ellipticity_check(s, rel, grid) == rel_approx(1.0).epsilon(1e-9));
  CHECK(sector_ellipticity_check(s, rel, 0.3 * std::numbers::pi, grid) >= 1 / std::sqrt(2.0) - 1e-9);

  auto v = bernstein::catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  auto sv = shifted_symbol(v, 2);
  CHECK(ellipticity_check(sv, v, grid) > 0);

  // sigma~(0) = -mbar = 0 for Example (ii): no positive constant exists
  auto ii = bernstein::catalog("power-ratio");
  auto sii = shifted_symbol(ii, 2);
  CHECK(sector_ellipticity_check(sii, ii, 0.3 * std::numbers::pi, grid) < 1e-9);
  CHECK_THROWS_AS(sector_ellipticity_check(s, rel, 0.1, grid), ArgumentError);
  CHECK_THROWS_AS(ellipticity_check(s, rel, std::vector<double>{1.0, 2.0}), ArgumentError);
}

TEST_CASE("pretty printing") {
  CHECK((AlphaAffine{Rational(2), Rational(-2)}).to_string() == "2a-2");
  CHECK((AlphaAffine{Rational(0), Rational(0)}).to_string() == "0");
  CHECK((AlphaAffine{Rational(4), Rational(1, 2)}).to_string() == "4a+1/2");
  CoeffPoly p = CoeffPoly(Rational(-1, 2)) * CoeffPoly::var(1) * CoeffPoly::var(1) + CoeffPoly::var(2);
  CHECK(p.to_string() == "a2 - 1/2*a1^2");
  std::vector<double> vals{0.5, -0.125};
  CHECK(p.evaluate(vals) == rel_approx(-0.25));
}
