#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sbm {

__extension__ typedef __int128 wide_int;

// Exact rational with 64-bit parts; overflow throws std::overflow_error.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(implicit)

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  // "p/q", "p" or "-p/q"; throws std::invalid_argument.
  static Rational parse(std::string_view text);
  // Continued-fraction recovery of x when |x - p/q| <= rel_tol*|x| with q <= max_den.
  static std::optional<Rational> from_double(double x, std::int64_t max_den = 1000000,
                                             double rel_tol = 1e-13);

  Rational operator-() const { return {-num_, den_}; }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational make(wide_int num, wide_int den);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace sbm
