#include "sbm/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbm {

namespace {
wide_int gcd128(wide_int a, wide_int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    wide_int r = a % b;
    a = b;
    b = r;
  }
  return a;
}
}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = make(num, den);
}

Rational Rational::make(wide_int num, wide_int den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  wide_int g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr wide_int lim = INT64_MAX;
  if (num > lim || num < -lim || den > lim) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<wide_int>(a.num_) * b.den_ + static_cast<wide_int>(b.num_) * a.den_,
                        static_cast<wide_int>(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<wide_int>(a.num_) * b.num_, static_cast<wide_int>(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<wide_int>(a.num_) * b.den_, static_cast<wide_int>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  wide_int l = static_cast<wide_int>(a.num_) * b.den_;
  wide_int r = static_cast<wide_int>(b.num_) * a.den_;
  return l <=> r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    s = trim(s);
    if (s.empty()) throw std::invalid_argument("empty integer in rational");
    std::size_t pos = 0;
    std::string buf(s);
    long long v = std::stoll(buf, &pos);
    if (pos != buf.size()) throw std::invalid_argument("bad integer '" + buf + "'");
    return v;
  };
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::optional<Rational> Rational::from_double(double x, std::int64_t max_den, double rel_tol) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return Rational(0);
  double ax = std::fabs(x);
  // convergents h/k of the continued fraction of |x|
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rem = ax;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(rem);
    if (a > 1e15) break;
    auto ai = static_cast<std::int64_t>(a);
    wide_int h2 = static_cast<wide_int>(ai) * h1 + h0;
    wide_int k2 = static_cast<wide_int>(ai) * k1 + k0;
    if (k2 > max_den || h2 > INT64_MAX) break;
    h0 = h1;
    h1 = static_cast<std::int64_t>(h2);
    k0 = k1;
    k1 = static_cast<std::int64_t>(k2);
    double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::fabs(approx - ax) <= rel_tol * ax) return Rational(x < 0 ? -h1 : h1, k1);
    double frac = rem - a;
    if (frac <= 0) break;
    rem = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace sbm
