#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <type_traits>

namespace sbm {

// Convergence when err <= max(tol, rel_tol*|I|) or the rounding floor is reached.
struct QuadConfig {
  double tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_evals = 200000;
};

template <class T>
struct QuadResultT {
  T value{};
  double error = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};
using QuadResult = QuadResultT<double>;

namespace detail {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr int kMaxLevel = 12;
constexpr double kTCap = 7.0;

// Shared driver. node(t, side) returns w*f for the abscissa t on side (+1/-1),
// or nullopt-like NaN flag via `valid` when the abscissa is unusable.
template <class T, class Node, class Center>
QuadResultT<T> double_exponential(Node&& node, Center&& center, const QuadConfig& cfg) {
  QuadResultT<T> out;
  double l1 = 0.0;
  auto add = [&](T v, bool ok) -> double {
    if (!ok) return 0.0;
    ++out.evals;
    double a = std::abs(v);
    l1 += a;
    return a;
  };

  // Level 0 (h = 1) also fixes where each tail is truncated.
  T sum = center();
  ++out.evals;
  l1 += std::abs(sum);
  double tmax[2] = {0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    int quiet = 0;
    double t = 1.0;
    for (; t <= kTCap; t += 1.0) {
      bool ok = true;
      T v = node(t, side == 0 ? -1 : 1, ok);
      double a = add(v, ok);
      if (ok) sum += v;
      if (!ok || a <= 1e-20 * l1) {
        if (++quiet >= 2 || !ok) break;
      } else {
        quiet = 0;
      }
    }
    tmax[side] = std::min(t, kTCap);
  }
  double h = 1.0;
  T prev = sum * h;
  out.value = prev;
  out.error = std::numeric_limits<double>::infinity();

  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    for (int side = 0; side < 2; ++side) {
      for (double t = h; t <= tmax[side]; t += 2 * h) {
        bool ok = true;
        T v = node(t, side == 0 ? -1 : 1, ok);
        add(v, ok);
        if (ok) sum += v;
      }
    }
    T cur = sum * h;
    out.error = std::abs(cur - prev);
    out.value = cur;
    prev = cur;
    double floor = 64 * std::numeric_limits<double>::epsilon() * l1 * h;
    double target = std::max({cfg.tol, cfg.rel_tol * std::abs(cur), floor});
    if (level >= 3 && out.error <= target) {
      out.converged = true;
      break;
    }
    if (out.evals > cfg.max_evals) break;
  }
  if (!std::isfinite(std::abs(out.value))) out.converged = false;
  return out;
}

}  // namespace detail

// Tanh-sinh on [a, b]. Abscissae near a are formed as a + d with d computed
// from the complement 1 - tanh(u) = e^(-u)/cosh(u), so singularities at a
// (the usual case) are sampled to full relative precision.
template <class F>
auto tanh_sinh(F&& f, double a, double b, const QuadConfig& cfg = {}) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) return QuadResultT<T>{T{}, 0.0, 0, true};
  const double half = 0.5 * (b - a);
  auto center = [&]() -> T { return T(half * detail::kHalfPi) * f(a + half); };
  auto node = [&](double t, int side, bool& ok) -> T {
    double u = detail::kHalfPi * std::sinh(t);
    double cu = std::cosh(u);
    double d = half * std::exp(-u) / cu;
    double w = half * detail::kHalfPi * std::cosh(t) / (cu * cu);
    double x = side < 0 ? a + d : b - d;
    if (!(d > 0) || !(x > a) || !(x < b) || !(w > 0)) {
      ok = false;
      return T{};
    }
    return T(w) * f(x);
  };
  return detail::double_exponential<T>(node, center, cfg);
}

// Exp-sinh on [a, inf): x = a + scale*exp((pi/2) sinh t).
template <class F>
auto exp_sinh(F&& f, double a, const QuadConfig& cfg = {}, double scale = 1.0) {
  using T = std::decay_t<decltype(f(a + scale))>;
  auto center = [&]() -> T { return T(scale * detail::kHalfPi) * f(a + scale); };
  auto node = [&](double t, int side, bool& ok) -> T {
    double s = side * t;
    double e = scale * std::exp(detail::kHalfPi * std::sinh(s));
    double x = a + e;
    double w = detail::kHalfPi * std::cosh(s) * e;
    if (!(e > 0) || !std::isfinite(x) || !(x > a) || !std::isfinite(w)) {
      ok = false;
      return T{};
    }
    return T(w) * f(x);
  };
  return detail::double_exponential<T>(node, center, cfg);
}

}  // namespace sbm
