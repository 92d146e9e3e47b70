#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbm/bernstein.hpp"
#include "sbm/rational.hpp"

namespace sbm::symbolic {

// Radial exponent a*alpha + b with exact parts.
struct AlphaAffine {
  Rational a;
  Rational b;
  Rational at(const Rational& alpha) const { return a * alpha + b; }
  double at(double alpha) const { return a.to_double() * alpha + b.to_double(); }
  AlphaAffine operator+(const AlphaAffine& o) const { return {a + o.a, b + o.b}; }
  friend bool operator==(const AlphaAffine&, const AlphaAffine&) = default;
  friend auto operator<=>(const AlphaAffine& x, const AlphaAffine& y) {
    if (auto c = x.a <=> y.a; c != 0) return c;
    return x.b <=> y.b;
  }
  std::string to_string() const;  // e.g. "2a-2"
};

// Polynomial in alpha_1, alpha_2, ... with rational coefficients.
class CoeffPoly {
 public:
  CoeffPoly() = default;
  CoeffPoly(Rational c);  // NOLINT(implicit)
  static CoeffPoly var(int j);

  bool is_zero() const { return terms_.empty(); }
  const std::map<std::vector<int>, Rational>& terms() const { return terms_; }
  // alphas[j-1] holds alpha_j
  double evaluate(std::span<const double> alphas) const;
  std::string to_string() const;  // e.g. "1/2*a1^2"

  friend CoeffPoly operator+(const CoeffPoly& x, const CoeffPoly& y);
  friend CoeffPoly operator*(const CoeffPoly& x, const CoeffPoly& y);
  CoeffPoly& operator+=(const CoeffPoly& o) { return *this = *this + o; }
  friend bool operator==(const CoeffPoly&, const CoeffPoly&) = default;

 private:
  void add_term(std::vector<int> exps, const Rational& c);
  std::map<std::vector<int>, Rational> terms_;
};

inline double scale(double x, const Rational& r) { return x * r.to_double(); }
inline Rational scale(const Rational& x, const Rational& r) { return x * r; }
inline CoeffPoly scale(const CoeffPoly& x, const Rational& r) { return x * CoeffPoly(r); }
template <class T>
T constant(const Rational& r);
template <>
inline double constant<double>(const Rational& r) { return r.to_double(); }
template <>
inline Rational constant<Rational>(const Rational& r) { return r; }
template <>
inline CoeffPoly constant<CoeffPoly>(const Rational& r) { return CoeffPoly(r); }

inline bool exact_zero(double x) { return x == 0.0; }
inline bool exact_zero(const Rational& x) { return x.is_zero(); }
inline bool exact_zero(const CoeffPoly& x) { return x.is_zero(); }

// c * r^radial * (lambda - alpha_0 r^(2 alpha))^(-m)
template <class T>
struct PoleTerm {
  AlphaAffine radial;
  int m;
  T c;
};
template <class T>
struct PoleLevel {
  int k;
  std::vector<PoleTerm<T>> terms;  // ascending m
};

// poly(t) * r^radial * exp(-t alpha_0 r^(2 alpha)); t_poly[i] multiplies t^i
template <class T>
struct HeatTerm {
  AlphaAffine radial;
  std::vector<T> t_poly;
};
template <class T>
struct HeatLevel {
  int k;
  std::vector<HeatTerm<T>> terms;
};

// poly(z) * alpha_0^(-z-j); the whole level carries r^(-2 alpha z - k)
template <class T>
struct PowerTerm {
  int j;
  std::vector<T> z_poly;
};
template <class T>
struct PowerLevel {
  int k;
  std::vector<PowerTerm<T>> terms;
};

// Step-1 parametrix recursion. higher[j-1] = alpha_j; needs ceil(K/2) entries.
// b_0 = (lambda - a)^(-1), b_k = (lambda - a)^(-1) sum_{j>=1, 2j<=k} alpha_j r^(2 alpha - 2j) b_{k-2j};
// odd levels are empty.
template <class T>
std::vector<PoleLevel<T>> parametrix_levels(std::span<const T> higher, int K) {
  if (K < 0) throw std::invalid_argument("K must be nonnegative");
  if (static_cast<int>(higher.size()) < (K + 1) / 2)
    throw std::invalid_argument("not enough symbol coefficients for the requested order");
  std::vector<PoleLevel<T>> out;
  out.push_back({0, {{AlphaAffine{0, 0}, 1, constant<T>(Rational(1))}}});
  for (int k = 1; k <= K; ++k) {
    std::map<std::pair<int, AlphaAffine>, T> acc;
    for (int j = 1; 2 * j <= k; ++j) {
      const T& aj = higher[static_cast<std::size_t>(j - 1)];
      for (const auto& term : out[static_cast<std::size_t>(k - 2 * j)].terms) {
        AlphaAffine q = term.radial + AlphaAffine{2, -2 * j};
        auto key = std::make_pair(term.m + 1, q);
        T prod = aj * term.c;
        auto it = acc.find(key);
        if (it == acc.end())
          acc.emplace(key, prod);
        else
          it->second = it->second + prod;
      }
    }
    PoleLevel<T> level{k, {}};
    for (auto& [key, c] : acc)
      if (!exact_zero(c)) level.terms.push_back({key.second, key.first, c});
    out.push_back(std::move(level));
  }
  return out;
}

// (1/2 pi i) oint e^(-t lambda) (lambda - a)^(-m) d lambda = (-t)^(m-1)/(m-1)! e^(-t a)
template <class T>
std::vector<HeatLevel<T>> heat_levels(const std::vector<PoleLevel<T>>& pole) {
  std::vector<HeatLevel<T>> out;
  for (const auto& level : pole) {
    HeatLevel<T> h{level.k, {}};
    for (const auto& term : level.terms) {
      Rational f(term.m % 2 == 1 ? 1 : -1);
      for (int i = 2; i < term.m; ++i) f /= Rational(i);
      std::vector<T> poly(static_cast<std::size_t>(term.m), constant<T>(Rational(0)));
      poly.back() = scale(term.c, f);
      h.terms.push_back({term.radial, std::move(poly)});
    }
    out.push_back(std::move(h));
  }
  return out;
}

// (1/2 pi i) oint lambda^(-z) (lambda - a)^(-m) d lambda
//   = (-z)(-z-1)...(-z-m+2)/(m-1)! a^(-z-m+1)
template <class T>
std::vector<PowerLevel<T>> power_levels(const std::vector<PoleLevel<T>>& pole) {
  std::vector<PowerLevel<T>> out;
  for (const auto& level : pole) {
    PowerLevel<T> p{level.k, {}};
    for (const auto& term : level.terms) {
      // rising factorial z(z+1)...(z+m-2) as rational coefficients
      std::vector<Rational> rise{Rational(1)};
      for (int i = 0; i < term.m - 1; ++i) {
        std::vector<Rational> next(rise.size() + 1, Rational(0));
        for (std::size_t d = 0; d < rise.size(); ++d) {
          next[d + 1] += rise[d];
          next[d] += rise[d] * Rational(i);
        }
        rise = std::move(next);
      }
      Rational f(term.m % 2 == 1 ? 1 : -1);
      for (int i = 2; i < term.m; ++i) f /= Rational(i);
      std::vector<T> poly;
      for (const Rational& r : rise) poly.push_back(scale(term.c, r * f));
      p.terms.push_back({term.m - 1, std::move(poly)});
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Nonzero terms of the formal product [(lambda - a) - sum_j alpha_j r^(2a-2j)] * sum_{k<=K} b_k
// at homogeneity degrees -d, d = 0..K, other than the constant 1. Empty means verified.
template <class T>
std::vector<PoleTerm<T>> parametrix_residual(std::span<const T> higher, const std::vector<PoleLevel<T>>& b) {
  const int K = static_cast<int>(b.size()) - 1;
  std::vector<PoleTerm<T>> bad;
  for (int d = 0; d <= K; ++d) {
    std::map<std::pair<int, AlphaAffine>, T> acc;
    auto add = [&](int m, AlphaAffine q, const T& c) {
      auto key = std::make_pair(m, q);
      auto it = acc.find(key);
      if (it == acc.end())
        acc.emplace(key, c);
      else
        it->second = it->second + c;
    };
    for (const auto& t : b[static_cast<std::size_t>(d)].terms) add(t.m - 1, t.radial, t.c);
    for (int j = 1; 2 * j <= d && j <= static_cast<int>(higher.size()); ++j)
      for (const auto& t : b[static_cast<std::size_t>(d - 2 * j)].terms)
        add(t.m, t.radial + AlphaAffine{2, -2 * j}, scale(higher[static_cast<std::size_t>(j - 1)] * t.c, Rational(-1)));
    for (auto& [key, c] : acc) {
      T v = c;
      if (d == 0 && key.first == 0 && key.second == AlphaAffine{0, 0}) v = v + constant<T>(Rational(-1));
      if (!exact_zero(v)) bad.push_back({key.second, key.first, v});
    }
  }
  return bad;
}

// Concrete double-precision objects.

struct SymbolSeries {
  Rational alpha;
  bool irrational = false;
  std::vector<double> coeffs;  // alpha_0..alpha_J at degrees 2 alpha - 2j
  double shift = 0.0;          // -mbar
  double alpha0() const { return coeffs.at(0); }
  // Step-1 slot k: alpha_{k/2} for even k, zero for odd k.
  double slot(int k) const;
  int max_j() const { return static_cast<int>(coeffs.size()) - 1; }
};

// alpha_j = -Gamma(j - alpha) p_j for j = 0..J, shift = -mbar
SymbolSeries shifted_symbol(const bernstein::LevySpec& spec, int J);

struct Parametrix {
  Rational alpha;
  double alpha0;
  std::vector<PoleLevel<double>> levels;
};
struct HeatSymbolSeries {
  Rational alpha;
  double alpha0;
  std::vector<HeatLevel<double>> levels;
  // sum over levels at (r, t), including the exponential
  double evaluate(double r, double t) const;
};
struct ComplexPowerSeries {
  Rational alpha;
  double alpha0;
  bool irrational = false;
  std::vector<PowerLevel<double>> levels;
  int K() const { return static_cast<int>(levels.size()) - 1; }
  // radial coefficient s_k(z) and its z-derivative
  std::complex<double> s(int k, std::complex<double> z) const;
  std::complex<double> ds(int k, std::complex<double> z) const;
  // sum of terms magnitudes |poly_j(z)| alpha_0^(-Re z - j), a rounding scale for s
  double magnitude(int k, std::complex<double> z) const;
  std::complex<double> evaluate(double r, std::complex<double> z) const;
};

Parametrix parametrix(const SymbolSeries& series, int K);
HeatSymbolSeries heat_symbol(const Parametrix& p);
ComplexPowerSeries complex_power_symbol(const Parametrix& p, bool irrational = false);

// Coefficients as exact rationals when every alpha_j is one (to 1e-13).
std::optional<std::vector<Rational>> exact_coefficients(const SymbolSeries& series);
// Symbolic coefficients alpha_1..alpha_J as polynomial variables.
std::vector<CoeffPoly> symbolic_coefficients(int J);

double ellipticity_check(const SymbolSeries& series, const bernstein::LevySpec& spec,
                         std::span<const double> xi_grid);
double sector_ellipticity_check(const SymbolSeries& series, const bernstein::LevySpec& spec, double theta,
                                std::span<const double> xi_grid);
std::vector<double> default_xi_grid();

// Checks the residue-rule sign conventions against the printed k = 0, 2, 4 terms.
bool self_test(std::string* message = nullptr);

}  // namespace sbm::symbolic
