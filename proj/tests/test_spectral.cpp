#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include "approx.hpp"
#include "doctest.h"
#include "sbm/error.hpp"
#include "sbm/special.hpp"
#include "sbm/spectral.hpp"
#include "sbm/quadrature.hpp"

using namespace sbm;
using namespace sbm::spectral;

namespace {
const double pi = std::numbers::pi;

// zeta of <xi>^(-z) in R^n under kappa = 1: pi^(n/2) Gamma((z-n)/2) / ((2 pi)^n Gamma(z/2))
double relativistic_zeta(int n, double z) {
  if (z <= 0 && std::floor(0.5 * z) == 0.5 * z) return 0.0;
  return std::pow(pi, 0.5 * n) * std::tgamma(0.5 * (z - n)) / (std::pow(2 * pi, n) * std::tgamma(0.5 * z));
}

const bernstein::LevySpec& rel() {
  static const auto spec = bernstein::catalog("relativistic");
  return spec;
}
}  // namespace

TEST_CASE("n = 2 pole table") {
  auto cps = power_series_for(rel(), 4);
  auto paper = zeta_poles(cps, 2, Normalization::paper);
  REQUIRE(paper.entries.size() == 5);
  CHECK(paper.entries[0].z == Rational(2));
  CHECK(std::fabs(paper.entries[0].residue - 1 / (4 * pi)) < 1e-12);
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(paper.entries[k].analytic);
    CHECK(paper.entries[k].residue == 0.0);
  }
  auto direct = zeta_poles(cps, 2, Normalization::direct);
  CHECK(std::fabs(direct.entries[0].residue - 1 / (2 * pi)) < 1e-12);
}

TEST_CASE("n = 3 pole table") {
  auto cps = power_series_for(rel(), 4);
  auto t = zeta_poles(cps, 3, Normalization::paper);
  CHECK(t.entries[0].z == Rational(3));
  CHECK(std::fabs(t.entries[0].residue - 1 / (6 * pi * pi)) < 1e-12);
  CHECK(t.entries[2].z == Rational(1));
  CHECK(std::fabs(t.entries[2].residue + 1 / (12 * pi * pi)) < 1e-12);
  CHECK(t.entries[4].z == Rational(-1));
  CHECK(std::fabs(t.entries[4].residue + 1 / (48 * pi * pi)) < 1e-12);
  CHECK(t.entries[3].z == Rational(0));
  CHECK(t.entries[3].analytic);
  for (int k : {1, 3}) CHECK(t.entries[static_cast<std::size_t>(k)].residue == 0.0);
  for (std::size_t i = 1; i < t.entries.size(); ++i) CHECK(t.entries[i].z < t.entries[i - 1].z);
}

TEST_CASE("kappa covariance") {
  for (int n : {1, 2, 3, 5}) {
    auto spec = bernstein::catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
    auto cps = power_series_for(spec, 8);
    auto d = zeta_poles(cps, n, Normalization::direct);
    auto p = zeta_poles(cps, n, Normalization::paper);
    std::map<int, double> zd, zp;
    for (int l : required_zeta_points(d)) {
      zd[l] = 0.1 * (l + 1);
      zp[l] = zd[l] / n;
    }
    auto hd = heat_trace_expansion(d, zd);
    auto hp = heat_trace_expansion(p, zp);
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      CHECK(p.entries[i].residue == rel_approx(d.entries[i].residue / n).epsilon(1e-14));
      if (hd.power_terms[i].value)
        CHECK(*hp.power_terms[i].value == rel_approx(*hd.power_terms[i].value / n).epsilon(1e-14));
    }
    REQUIRE(hd.log_terms.size() == hp.log_terms.size());
    for (std::size_t i = 0; i < hd.log_terms.size(); ++i)
      CHECK(hp.log_terms[i].value == rel_approx(hd.log_terms[i].value / n).epsilon(1e-14));
  }
}

TEST_CASE("continued zeta values against closed forms") {
  auto t0 = std::chrono::steady_clock::now();
  CHECK(zeta_continue(rel(), 2, 0.0, Normalization::direct).real() == rel_approx(-1 / (4 * pi)).epsilon(1e-10));
  CHECK(zeta_continue(rel(), 2, -1.0, Normalization::direct).real() == rel_approx(-1 / (6 * pi)).epsilon(1e-10));
  CHECK(zeta_continue(rel(), 2, -2.0, Normalization::direct).real() == rel_approx(-1 / (8 * pi)).epsilon(1e-10));
  CHECK(zeta_continue(rel(), 2, 4.0, Normalization::direct).real() == rel_approx(1 / (4 * pi)).epsilon(1e-10));
  CHECK(zeta_continue(rel(), 2, 0.0, Normalization::paper).real() == rel_approx(-1 / (8 * pi)).epsilon(1e-10));
  std::complex<double> z(0.5, 0.7);
  auto got = zeta_continue(rel(), 2, z, Normalization::direct);
  CHECK(std::abs(got - 1.0 / (2 * pi * (z - 2.0))) < 1e-10);
  for (double zz : {0.0, 0.5, -2.0, 2.5, -0.5}) {
    INFO("n = 3, z = " << zz);
    CHECK(std::fabs(zeta_continue(rel(), 3, zz, Normalization::direct).real() - relativistic_zeta(3, zz)) < 1e-10);
  }
  CHECK(std::fabs(zeta_continue(rel(), 3, 0.0, Normalization::direct).real()) < 1e-10);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("zeta continuation time " << secs << " s");
}

TEST_CASE("continuation equals the convergent integral where both exist") {
  auto spec = bernstein::catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  const double mbar = spec.mbar();
  for (double z : {2.0, 3.5}) {
    auto direct = exp_sinh([&](double r) { 
      double lam = r * r;
      return std::isfinite(lam) ? std::pow(bernstein::eval_f(spec, lam) - mbar, -z) : 0.0;
    }, 0.0,
                           QuadConfig{1e-13});
    double want = sphere_area(1) / (2 * pi) * direct.value;
    CHECK(zeta_continue(spec, 1, z, Normalization::direct).real() == rel_approx(want).epsilon(1e-9));
  }
}

TEST_CASE("continuation preconditions") {
  CHECK_THROWS_AS(zeta_continue(rel(), 2, 2.0005, Normalization::direct), ArgumentError);
  ContinuationOptions small;
  small.K = 2;
  CHECK_THROWS_AS(zeta_continue(rel(), 2, -1.0, Normalization::direct, small), ArgumentError);
}

TEST_CASE("heat trace expansion, n = 3") {
  auto cps = power_series_for(rel(), 4);
  auto table = zeta_poles(cps, 3, Normalization::paper);
  CHECK(required_zeta_points(table) == std::vector<int>{0});
  CHECK_THROWS_AS(heat_trace_expansion(table, {}), ArgumentError);
  auto h = heat_trace_expansion(table, {{0, 0.0}});
  CHECK(std::fabs(*h.power_terms[0].value - 1 / (3 * pi * pi)) < 1e-12);
  CHECK(h.power_terms[0].exponent == Rational(-3));
  CHECK(std::fabs(*h.power_terms[2].value + 1 / (12 * pi * pi)) < 1e-12);
  REQUIRE(h.log_terms.size() == 1);
  CHECK(h.log_terms[0].l == 1);
  CHECK(std::fabs(h.log_terms[0].value - 1 / (48 * pi * pi)) < 1e-12);
  CHECK(h.unresolved_finite_parts == std::vector<int>{1});
  CHECK_FALSE(h.power_terms[4].value.has_value());
  CHECK(h.power_terms[4].source == CoeffSource::unresolved);

  auto shifted = apply_shift(h, rel().mbar());
  double t = 1e-3;
  double lead = std::exp(t) * (1 / (3 * pi * pi)) * std::pow(t, -3);
  CHECK(shifted.evaluate(t) == rel_approx(lead).epsilon(1e-5));
  CHECK(apply_shift(h, 0.0).evaluate(0.2) == h.evaluate(0.2, false));
}

TEST_CASE("heat trace expansion, n = 2 against the closed form series") {
  auto cps = power_series_for(rel(), 4);
  auto paper = zeta_poles(cps, 2, Normalization::paper);
  std::map<int, double> zp;
  for (int l : required_zeta_points(paper)) zp[l] = zeta_continue(rel(), 2, -l, Normalization::paper).real();
  auto hp = heat_trace_expansion(paper, zp);
  CHECK(hp.log_terms.empty());
  CHECK(std::fabs(*hp.power_terms[0].value - 1 / (4 * pi)) < 1e-12);
  CHECK(*hp.power_terms[1].value == 0.0);
  CHECK(hp.power_terms[3].source == CoeffSource::zeta_value);
  CHECK(*hp.power_terms[3].value == rel_approx(-zp.at(1)));
  CHECK(hp.collisions == std::vector<int>{2, 3, 4});

  // kappa = 1: (1/2 pi)(t^-2 - 1/2 + t/3 - t^2/8)
  auto direct = zeta_poles(cps, 2, Normalization::direct);
  std::map<int, double> zd;
  for (int l : required_zeta_points(direct)) zd[l] = zeta_continue(rel(), 2, -l, Normalization::direct).real();
  auto hd = heat_trace_expansion(direct, zd);
  const Rational want[] = {Rational(1), Rational(0), Rational(-1, 2), Rational(1, 3), Rational(-1, 8)};
  for (int k = 0; k < 5; ++k) {
    double v = *hd.power_terms[static_cast<std::size_t>(k)].value * 2 * pi;
    auto r = Rational::from_double(v, 1000, 1e-9);
    INFO("k = " << k << " value*2pi = " << v);
    REQUIRE(r.has_value());
    CHECK(*r == want[k]);
  }
}

TEST_CASE("irrational flag never yields log terms") {
  auto flagged = rel().with_irrational(true);
  auto cps3 = power_series_for(flagged, 4);
  CHECK_THROWS_AS(zeta_poles(cps3, 3, Normalization::direct), ValidationError);
  auto t2 = zeta_poles(cps3, 2, Normalization::direct);
  std::map<int, double> z;
  for (int l : required_zeta_points(t2)) z[l] = 0.0;
  CHECK(heat_trace_expansion(t2, z).log_terms.empty());
  // double-pole bookkeeping in the rational case: log term iff z_k = -l with nonzero residue
  auto spec = bernstein::catalog("gamma-ratio-2", {Rational(1, 2), 1.0});
  auto t3 = zeta_poles(power_series_for(spec, 8), 3, Normalization::direct);
  std::map<int, double> z3;
  for (int l : required_zeta_points(t3)) z3[l] = 0.0;
  auto h3 = heat_trace_expansion(t3, z3);
  std::size_t logs = 0;
  for (const auto& e : t3.entries)
    if (e.z.is_integer() && e.z < Rational(0) && !e.analytic) ++logs;
  CHECK(h3.log_terms.size() == logs);
  CHECK(logs >= 1);
}

TEST_CASE("Banuelos constant") {
  CHECK(banuelos_crosscheck(3, 0.5, 1.0) == rel_approx(1 / (pi * pi)).epsilon(1e-14));
  CHECK(banuelos_crosscheck(2, 0.5, 1.0) == rel_approx(1 / (2 * pi)).epsilon(1e-14));
  CHECK(banuelos_crosscheck(3, 0.5, 2.0) == rel_approx(banuelos_crosscheck(3, 0.5, 1.0) * std::pow(2.0, -3)));
  // equals c_0 under kappa = 1
  auto cps = power_series_for(rel(), 2);
  auto h = heat_trace_expansion(zeta_poles(cps, 3, Normalization::direct), {});
  CHECK(*h.power_terms[0].value == rel_approx(banuelos_crosscheck(3, 0.5, 1.0)).epsilon(1e-13));
}

TEST_CASE("Gamma-pole powers not covered by any z_k") {
  auto spec = bernstein::catalog("gamma-ratio-2", {Rational(1, 3), 1.0});
  auto table = zeta_poles(power_series_for(spec, 4), 1, Normalization::direct);
  // z_k = 3(1 - k)/2 hits 0 and -3; -z_4 = 9/2
  CHECK(required_zeta_points(table) == std::vector<int>{0, 1, 2, 3, 4});
  std::map<int, double> z{{0, 0.5}, {1, 0.25}, {2, 2.0}, {3, 1.0}, {4, 48.0}};
  auto h = heat_trace_expansion(table, z);
  REQUIRE(h.gamma_terms.size() == 3);
  CHECK(h.gamma_terms[0].l == 1);
  CHECK(h.gamma_terms[0].value == -0.25);
  CHECK(h.gamma_terms[1].value == 1.0);
  CHECK(h.gamma_terms[2].value == 2.0);

  auto rel2 = heat_trace_expansion(zeta_poles(power_series_for(rel(), 4), 2, Normalization::direct),
                                   {{0, 0.0}, {1, 0.0}, {2, 0.0}});
  CHECK(rel2.gamma_terms.empty());
}
