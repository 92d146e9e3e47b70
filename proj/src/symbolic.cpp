#include "sbm/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sbm/error.hpp"

namespace sbm::symbolic {

std::string AlphaAffine::to_string() const {
  std::string out;
  if (!a.is_zero()) {
    if (a == Rational(1))
      out = "a";
    else if (a == Rational(-1))
      out = "-a";
    else if (a.is_integer())
      out = a.to_string() + "a";
    else
      out = "(" + a.to_string() + ")a";
  }
  if (!b.is_zero() || out.empty()) {
    std::string bs = b.to_string();
    if (!out.empty() && b > Rational(0)) out += "+";
    out += bs;
  }
  return out;
}

CoeffPoly::CoeffPoly(Rational c) {
  if (!c.is_zero()) terms_.emplace(std::vector<int>{}, c);
}

CoeffPoly CoeffPoly::var(int j) {
  if (j < 1) throw std::invalid_argument("coefficient variables start at alpha_1");
  CoeffPoly p;
  std::vector<int> e(static_cast<std::size_t>(j), 0);
  e.back() = 1;
  p.terms_.emplace(std::move(e), Rational(1));
  return p;
}

void CoeffPoly::add_term(std::vector<int> exps, const Rational& c) {
  while (!exps.empty() && exps.back() == 0) exps.pop_back();
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(std::move(exps), c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

CoeffPoly operator+(const CoeffPoly& x, const CoeffPoly& y) {
  CoeffPoly r = x;
  for (const auto& [e, c] : y.terms_) r.add_term(e, c);
  return r;
}

CoeffPoly operator*(const CoeffPoly& x, const CoeffPoly& y) {
  CoeffPoly r;
  for (const auto& [ex, cx] : x.terms_)
    for (const auto& [ey, cy] : y.terms_) {
      std::vector<int> e(std::max(ex.size(), ey.size()), 0);
      for (std::size_t i = 0; i < ex.size(); ++i) e[i] += ex[i];
      for (std::size_t i = 0; i < ey.size(); ++i) e[i] += ey[i];
      r.add_term(std::move(e), cx * cy);
    }
  return r;
}

double CoeffPoly::evaluate(std::span<const double> alphas) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double v = c.to_double();
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (i >= alphas.size()) throw std::out_of_range("missing symbol coefficient");
      v *= std::pow(alphas[i], e[i]);
    }
    sum += v;
  }
  return sum;
}

std::string CoeffPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "a" + std::to_string(i + 1);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    Rational mag = c < Rational(0) ? -c : c;
    std::string part;
    if (mono.empty())
      part = mag.to_string();
    else if (mag == Rational(1))
      part = mono;
    else
      part = mag.to_string() + "*" + mono;
    if (first)
      out = (c < Rational(0) ? "-" : "") + part;
    else
      out += (c < Rational(0) ? " - " : " + ") + part;
    first = false;
  }
  return out;
}

double SymbolSeries::slot(int k) const {
  if (k < 0) throw std::out_of_range("negative slot");
  if (k % 2 == 1) return 0.0;
  return coeffs.at(static_cast<std::size_t>(k / 2));
}

SymbolSeries shifted_symbol(const bernstein::LevySpec& spec, int J) {
  if (J < 0 || J > spec.order())
    throw ArgumentError("symbol order " + std::to_string(J) + " exceeds the known expansion order " +
                        std::to_string(spec.order()));
  SymbolSeries s;
  s.alpha = spec.alpha();
  s.irrational = spec.treat_as_irrational();
  for (int j = 0; j <= J; ++j) s.coeffs.push_back(bernstein::symbol_coefficient(spec, j));
  s.shift = -spec.mbar();
  return s;
}

Parametrix parametrix(const SymbolSeries& series, int K) {
  if (series.coeffs.empty() || !(series.alpha0() > 0)) throw ValidationError("alpha_0 must be positive");
  if (K < 0) throw ArgumentError("parametrix order must be nonnegative");
  int need = (K + 1) / 2;
  if (series.max_j() < need)
    throw ArgumentError("parametrix order " + std::to_string(K) + " needs alpha_1..alpha_" + std::to_string(need) +
                        ", only " + std::to_string(series.max_j()) + " available");
  std::span<const double> higher(series.coeffs.data() + 1, static_cast<std::size_t>(need));
  return {series.alpha, series.alpha0(), parametrix_levels<double>(higher, K)};
}

HeatSymbolSeries heat_symbol(const Parametrix& p) { return {p.alpha, p.alpha0, heat_levels(p.levels)}; }

ComplexPowerSeries complex_power_symbol(const Parametrix& p, bool irrational) {
  return {p.alpha, p.alpha0, irrational, power_levels(p.levels)};
}

double HeatSymbolSeries::evaluate(double r, double t) const {
  const double a = alpha.to_double();
  const double e = std::exp(-t * alpha0 * std::pow(r, 2 * a));
  double sum = 0.0;
  for (const auto& level : levels)
    for (const auto& term : level.terms) {
      double poly = 0.0;
      for (auto it = term.t_poly.rbegin(); it != term.t_poly.rend(); ++it) poly = poly * t + *it;
      sum += poly * std::pow(r, term.radial.at(a));
    }
  return sum * e;
}

namespace {
const PowerLevel<double>& level_at(const std::vector<PowerLevel<double>>& levels, int k) {
  if (k < 0 || k >= static_cast<int>(levels.size())) throw std::out_of_range("power level outside 0..K");
  return levels[static_cast<std::size_t>(k)];
}
}  // namespace

std::complex<double> ComplexPowerSeries::s(int k, std::complex<double> z) const {
  const double la = std::log(alpha0);
  std::complex<double> sum = 0.0;
  for (const auto& term : level_at(levels, k).terms) {
    std::complex<double> poly = 0.0;
    for (auto it = term.z_poly.rbegin(); it != term.z_poly.rend(); ++it) poly = poly * z + *it;
    sum += poly * std::exp(-(z + double(term.j)) * la);
  }
  return sum;
}

std::complex<double> ComplexPowerSeries::ds(int k, std::complex<double> z) const {
  const double la = std::log(alpha0);
  std::complex<double> sum = 0.0;
  for (const auto& term : level_at(levels, k).terms) {
    std::complex<double> poly = 0.0, dpoly = 0.0;
    for (auto it = term.z_poly.rbegin(); it != term.z_poly.rend(); ++it) {
      dpoly = dpoly * z + poly;
      poly = poly * z + *it;
    }
    sum += (dpoly - la * poly) * std::exp(-(z + double(term.j)) * la);
  }
  return sum;
}

double ComplexPowerSeries::magnitude(int k, std::complex<double> z) const {
  const double la = std::log(alpha0);
  double sum = 0.0;
  for (const auto& term : level_at(levels, k).terms) {
    double poly = 0.0;
    for (auto it = term.z_poly.rbegin(); it != term.z_poly.rend(); ++it) poly = poly * std::abs(z) + std::fabs(*it);
    sum += poly * std::exp(-(z.real() + term.j) * la);
  }
  return sum;
}

std::complex<double> ComplexPowerSeries::evaluate(double r, std::complex<double> z) const {
  const double a = alpha.to_double();
  std::complex<double> sum = 0.0;
  for (int k = 0; k <= K(); ++k) sum += s(k, z) * std::exp((-2 * a * z - double(k)) * std::log(r));
  return sum;
}

std::optional<std::vector<Rational>> exact_coefficients(const SymbolSeries& series) {
  std::vector<Rational> out;
  for (double c : series.coeffs) {
    auto r = Rational::from_double(c);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  return out;
}

std::vector<CoeffPoly> symbolic_coefficients(int J) {
  std::vector<CoeffPoly> v;
  for (int j = 1; j <= J; ++j) v.push_back(CoeffPoly::var(j));
  return v;
}

std::vector<double> default_xi_grid() {
  std::vector<double> g{0.0};
  for (int i = 0; i <= 120; ++i) g.push_back(std::pow(10.0, -3.0 + 6.0 * i / 120.0));
  return g;
}

namespace {
void check_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() > 0.0 || grid.back() < 1e3)
    throw ArgumentError("xi grid must cover [0, 1e3]");
}
double sigma_tilde(const SymbolSeries& series, const bernstein::LevySpec& spec, double r) {
  return bernstein::eval_f(spec, r * r) + series.shift;
}
}  // namespace

double ellipticity_check(const SymbolSeries& series, const bernstein::LevySpec& spec,
                         std::span<const double> xi_grid) {
  check_grid(xi_grid);
  const double a = series.alpha.to_double();
  double lo = INFINITY;
  for (double r : xi_grid) lo = std::min(lo, sigma_tilde(series, spec, r) / std::pow(1 + r * r, a));
  return lo;
}

double sector_ellipticity_check(const SymbolSeries& series, const bernstein::LevySpec& spec, double theta,
                                std::span<const double> xi_grid) {
  constexpr double pi = 3.14159265358979323846;
  if (!(theta > pi / 4 && theta < pi / 2)) throw ArgumentError("theta must lie in (pi/4, pi/2)");
  check_grid(xi_grid);
  const double a = series.alpha.to_double();
  double lo = INFINITY;
  for (double r : xi_grid) {
    double s = sigma_tilde(series, spec, r);
    double scale = std::pow(1 + r * r, a);
    std::vector<double> rhos{0.0, s * std::cos(theta)};
    for (int i = 0; i <= 40; ++i) rhos.push_back(std::fabs(s) * std::pow(10.0, -3.0 + 0.15 * i));
    for (double rho : rhos)
      for (double ang : {theta, -theta, pi}) {
        std::complex<double> lambda = std::polar(rho, ang);
        lo = std::min(lo, std::abs(lambda - s) / scale);
      }
  }
  return lo;
}

bool self_test(std::string* message) {
  auto fail = [&](const std::string& what) {
    if (message) *message = what;
    return false;
  };
  std::vector<CoeffPoly> v = symbolic_coefficients(2);
  const CoeffPoly a1 = v[0], a2 = v[1];
  const CoeffPoly half(Rational(1, 2));
  const CoeffPoly zero;
  auto pole = parametrix_levels<CoeffPoly>(v, 4);
  auto heat = heat_levels(pole);
  auto power = power_levels(pole);

  if (pole[1].terms.size() + pole[3].terms.size() != 0) return fail("odd parametrix levels are not zero");
  if (pole[0].terms.size() != 1 || pole[0].terms[0].m != 1 || !(pole[0].terms[0].c == CoeffPoly(Rational(1))))
    return fail("b_0 is not (lambda - a)^(-1)");
  const auto& b2 = pole[2].terms;
  if (b2.size() != 1 || b2[0].m != 2 || !(b2[0].radial == AlphaAffine{2, -2}) || !(b2[0].c == a1))
    return fail("b_2 differs from alpha_1 r^(2a-2) (lambda - a)^(-2)");
  const auto& b4 = pole[4].terms;
  if (b4.size() != 2 || b4[0].m != 2 || !(b4[0].radial == AlphaAffine{2, -4}) || !(b4[0].c == a2) ||
      b4[1].m != 3 || !(b4[1].radial == AlphaAffine{4, -4}) || !(b4[1].c == a1 * a1))
    return fail("b_4 differs from alpha_2 r^(2a-4)(lambda-a)^(-2) + alpha_1^2 r^(4a-4)(lambda-a)^(-3)");

  if (heat[0].terms.size() != 1 || heat[0].terms[0].t_poly.size() != 1 ||
      !(heat[0].terms[0].t_poly[0] == CoeffPoly(Rational(1))))
    return fail("heat k=0 term is not exp(-t a)");
  const CoeffPoly minus_a1 = a1 * CoeffPoly(Rational(-1));
  const CoeffPoly minus_a2 = a2 * CoeffPoly(Rational(-1));
  if (heat[2].terms.size() != 1 || heat[2].terms[0].t_poly != std::vector<CoeffPoly>{zero, minus_a1})
    return fail("heat k=2 term is not -alpha_1 t");
  if (heat[4].terms.size() != 2 || heat[4].terms[0].t_poly != std::vector<CoeffPoly>{zero, minus_a2} ||
      heat[4].terms[1].t_poly != std::vector<CoeffPoly>{zero, zero, half * a1 * a1})
    return fail("heat k=4 term is not -alpha_2 t + alpha_1^2 t^2 / 2");

  if (power[0].terms.size() != 1 || power[0].terms[0].j != 0 ||
      power[0].terms[0].z_poly != std::vector<CoeffPoly>{CoeffPoly(Rational(1))})
    return fail("power k=0 term is not alpha_0^(-z)");
  if (power[2].terms.size() != 1 || power[2].terms[0].j != 1 ||
      power[2].terms[0].z_poly != std::vector<CoeffPoly>{zero, minus_a1})
    return fail("power k=2 term is not -alpha_0^(-z-1) alpha_1 z");
  const auto& p4 = power[4].terms;
  if (p4.size() != 2 || p4[0].j != 1 || p4[0].z_poly != std::vector<CoeffPoly>{zero, minus_a2} || p4[1].j != 2 ||
      p4[1].z_poly != std::vector<CoeffPoly>{zero, half * a1 * a1, half * a1 * a1})
    return fail("power k=4 term is not -alpha_0^(-z-1) alpha_2 z + alpha_0^(-z-2) alpha_1^2 z(z+1)/2");

  if (!parametrix_residual<CoeffPoly>(v, pole).empty()) return fail("parametrix residual does not cancel");
  if (message) message->clear();
  return true;
}

}  // namespace sbm::symbolic
