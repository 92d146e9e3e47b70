#include "sbm/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sbm/error.hpp"
#include "sbm/series.hpp"
#include "sbm/special.hpp"

namespace sbm::bernstein {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked(const QuadResult& r, const char* what) {
  if (!r.converged) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (value " << r.value << ", error " << r.error << ", "
       << r.evals << " evaluations)";
    throw NumericError(os.str());
  }
  return r.value;
}

struct Family {
  RegularPart g;
  std::vector<double> p;
  double series_cap = 1.0;
};

void require_half(Example e, const Rational& a) {
  if (a != Rational(1, 2))
    throw ArgumentError(std::string(example_name(e)) + " is only defined for alpha = 1/2");
}

// Regular part and Taylor coefficients for spec order a (not the printed parameter).
Family family(Example e, const Rational& a, double c, int order) {
  const double av = a.to_double();
  Family fam;
  switch (e) {
    case Example::relativistic: {
      double k = av / std::tgamma(1 - av);
      fam.g = [k](double t) { return k * std::exp(-t); };
      fam.p = (k * Series::exp_linear(order, -1.0)).coeffs();
      break;
    }
    case Example::power_ratio: {
      double k = 1.0 / std::tgamma(1 - av);
      fam.g = [k, av, c](double t) { return k * std::exp(-c * t) * (av + c * t); };
      Series lin(order);
      lin[0] = av;
      if (order >= 1) lin[1] = c;
      fam.p = (k * (Series::exp_linear(order, -c) * lin)).coeffs();
      break;
    }
    case Example::exp_root: {
      require_half(e, a);
      double k = 0.5 / std::sqrt(std::numbers::pi);
      fam.g = [k, c](double t) {
        double flat = std::exp(-1.0 / t);
        return k * std::exp(-c * t) * (2.0 * flat / t + (1 + 2 * c * t) * (-std::expm1(-1.0 / t)));
      };
      Series lin(order);
      lin[0] = 1.0;
      if (order >= 1) lin[1] = 2 * c;
      fam.p = (k * (Series::exp_linear(order, -c) * lin)).coeffs();
      // e^(-1/t)/t stays below eps for t < 1/40
      fam.series_cap = 0.025;
      break;
    }
    case Example::gamma_ratio_1: {
      require_half(e, a);
      double k = std::pow(c, 1.5) / (2 * std::sqrt(std::numbers::pi));
      fam.g = [k, c](double t) {
        return k * std::exp(1.5 * std::log(t) - c * t) * std::pow(-std::expm1(-2 * c * t), -1.5);
      };
      double k0 = 1.0 / std::sqrt(32 * std::numbers::pi);
      fam.p = (k0 * (Series::exp_linear(order, -c) * Series::one_minus_exp_over(order, 2 * c).pow(-1.5)))
                  .coeffs();
      break;
    }
    case Example::gamma_ratio_2: {
      double k = 1.0 / std::tgamma(1 - av);
      fam.g = [k, av](double t) {
        double x = t / av;
        return k * std::exp((1 + av) * std::log(t) - x) * std::pow(-std::expm1(-x), -1 - av);
      };
      double k0 = std::pow(av, 1 + av) * k;
      fam.p = (k0 * (Series::exp_linear(order, -1 / av) *
                     Series::one_minus_exp_over(order, 1 / av).pow(-1 - av)))
                  .coeffs();
      break;
    }
  }
  return fam;
}

Rational spec_alpha(Example e, const CatalogParams& params) {
  const Rational& a = params.alpha;
  if (!(a > Rational(0) && a < Rational(1))) throw ArgumentError("alpha must lie in (0,1)");
  if (!(params.c > 0) || !std::isfinite(params.c)) throw ArgumentError("c must be positive");
  return e == Example::power_ratio ? Rational(1) - a : a;
}

}  // namespace

std::string_view example_name(Example e) {
  switch (e) {
    case Example::relativistic: return "relativistic";
    case Example::power_ratio: return "power-ratio";
    case Example::exp_root: return "exp-root";
    case Example::gamma_ratio_1: return "gamma-ratio-1";
    case Example::gamma_ratio_2: return "gamma-ratio-2";
  }
  return "?";
}

std::optional<Example> parse_example(std::string_view name) {
  for (Example e : {Example::relativistic, Example::power_ratio, Example::exp_root, Example::gamma_ratio_1,
                    Example::gamma_ratio_2})
    if (example_name(e) == name) return e;
  return std::nullopt;
}

struct LevySpec::Lazy {
  std::once_flag once;
  double value = 0.0;
  std::exception_ptr error;
};

LevySpec::LevySpec(Rational alpha, std::vector<double> p, RegularPart g, std::string density_name,
                   bool treat_as_irrational, std::optional<CatalogId> id, double series_cap)
    : alpha_(alpha),
      p_(std::move(p)),
      g_(std::move(g)),
      density_name_(std::move(density_name)),
      irrational_(treat_as_irrational),
      id_(std::move(id)),
      lazy_(std::make_shared<Lazy>()) {
  if (!(alpha_ > Rational(0) && alpha_ < Rational(1))) throw ArgumentError("alpha must lie in (0,1)");
  if (p_.empty() || !(p_[0] > 0)) throw ArgumentError("p_0 must be positive");
  for (double v : p_)
    if (!std::isfinite(v)) throw ArgumentError("expansion coefficients must be finite");
  if (!g_) throw ArgumentError("density evaluator missing");
  double pmax = 0.0;
  for (double v : p_) pmax = std::max(pmax, std::fabs(v));
  int K = order();
  switch_t_ = std::min(series_cap, std::pow(kEps * p_[0] / pmax, 1.0 / (K + 1)));
}

double LevySpec::density(double t) const { return g_(t) * std::pow(t, -1 - alpha_value()); }

double LevySpec::reduced_density(double t, int terms) const {
  const double a = alpha_value();
  const int K = order();
  double acc = 0.0;
  if (t < switch_t_) {
    // Taylor tail sum_{terms<=k<=K} p_k t^k, Horner from the top
    for (int k = K; k >= terms; --k) acc = acc * t + p_[static_cast<std::size_t>(k)];
    return acc * std::pow(t, terms - 1 - a);
  }
  double poly = 0.0;
  for (int k = std::min(terms, K + 1) - 1; k >= 0; --k) poly = poly * t + p_[static_cast<std::size_t>(k)];
  return (g_(t) - poly) * std::pow(t, -1 - a);
}

double LevySpec::mbar() const {
  std::call_once(lazy_->once, [this] {
    try {
      lazy_->value = bernstein::mbar(*this, QuadConfig{1e-13, 0.0, 400000});
    } catch (...) {
      lazy_->error = std::current_exception();
    }
  });
  if (lazy_->error) std::rethrow_exception(lazy_->error);
  return lazy_->value;
}

LevySpec LevySpec::with_irrational(bool flag) const {
  LevySpec s = *this;
  s.irrational_ = flag;
  return s;
}

LevySpec LevySpec::scaled(double s) const {
  if (!(s > 0)) throw ArgumentError("scale must be positive");
  std::vector<double> p = p_;
  for (double& v : p) v *= s;
  RegularPart g = [g0 = g_, s](double t) { return s * g0(t); };
  LevySpec out(alpha_, std::move(p), std::move(g), density_name_, irrational_, std::nullopt, switch_t_);
  return out;
}

LevySpec catalog(Example e, const CatalogParams& params, int order) {
  if (order < 4) throw ArgumentError("catalog order must be at least 4");
  Rational a = spec_alpha(e, params);
  Family fam = family(e, a, params.c, order);
  return LevySpec(a, std::move(fam.p), std::move(fam.g), std::string(example_name(e)), false,
                  CatalogId{e, params}, fam.series_cap);
}

LevySpec catalog(std::string_view name, const CatalogParams& params, int order) {
  auto e = parse_example(name);
  if (!e) throw ArgumentError("unknown catalog entry '" + std::string(name) + "'");
  return catalog(*e, params, order);
}

LevySpec custom(Rational alpha, std::vector<double> p, std::string_view density_name, double c,
                bool treat_as_irrational) {
  if (p.empty()) throw ArgumentError("custom spec needs at least p_0");
  if (density_name == "truncated-stable") {
    double p0 = p[0];
    RegularPart g = [p0](double t) { return t <= 1.0 ? p0 : 0.0; };
    return LevySpec(alpha, std::move(p), std::move(g), "truncated-stable", treat_as_irrational);
  }
  auto e = parse_example(density_name);
  if (!e) throw ArgumentError("unknown built-in density '" + std::string(density_name) + "'");
  if (!(c > 0)) throw ArgumentError("c must be positive");
  Family fam = family(*e, alpha, c, 4);
  return LevySpec(alpha, std::move(p), std::move(fam.g), std::string(density_name), treat_as_irrational,
                  std::nullopt, fam.series_cap);
}

double mbar(const LevySpec& spec, const QuadConfig& quad) {
  QuadConfig q = quad;
  q.tol = quad.tol / 2;
  auto near = [&](double t) { return spec.reduced_density(t, 1); };
  double a = checked(tanh_sinh(near, 0.0, 1.0, q), "mbar on (0,1]");
  double b = checked(exp_sinh(near, 1.0, q), "mbar on [1,inf)");
  return a + b;
}

double eval_f(const LevySpec& spec, double lambda, const QuadConfig& quad) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be a finite value >= 0");
  if (lambda == 0.0) return 0.0;
  const double a = spec.alpha_value();
  const double lead = -gamma_fn(-a) * spec.p()[0] * std::pow(lambda, a);
  auto integrand = [&](double t) { return -std::expm1(-lambda * t) * spec.reduced_density(t, 1); };
  QuadConfig q = quad;
  q.tol = quad.tol / 3;
  double sum = 0.0;
  if (lambda > 1.0) {
    sum += checked(tanh_sinh(integrand, 0.0, 1.0 / lambda, q), "f on (0,1/lambda]");
    sum += checked(tanh_sinh(integrand, 1.0 / lambda, 1.0, q), "f on [1/lambda,1]");
  } else {
    sum += checked(tanh_sinh(integrand, 0.0, 1.0, q), "f on (0,1]");
  }
  sum += checked(exp_sinh(integrand, 1.0, q), "f on [1,inf)");
  return lead + sum;
}

double f_derivative(const LevySpec& spec, int l, double lambda, const QuadConfig& quad) {
  if (l < 1) throw ArgumentError("derivative order must be >= 1");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be a finite value >= 0");
  const double a = spec.alpha_value();
  auto integrand = [&](double t) {
    return std::exp(-lambda * t) * std::pow(t, l - 1 - a) * spec.regular(t);
  };
  QuadConfig q = quad;
  q.tol = quad.tol / 3;
  double sum = 0.0;
  if (lambda > 1.0) {
    sum += checked(tanh_sinh(integrand, 0.0, 1.0 / lambda, q), "f' on (0,1/lambda]");
    sum += checked(tanh_sinh(integrand, 1.0 / lambda, 1.0, q), "f' on [1/lambda,1]");
  } else {
    sum += checked(tanh_sinh(integrand, 0.0, 1.0, q), "f' on (0,1]");
  }
  sum += checked(exp_sinh(integrand, 1.0, q), "f' on [1,inf)");
  return (l % 2 == 1 ? 1.0 : -1.0) * sum;
}

double symbol_coefficient(const LevySpec& spec, int k) {
  if (k < 0 || k > spec.order()) throw ArgumentError("symbol coefficient index outside 0..K");
  return -gamma_fn(k - spec.alpha_value()) * spec.p()[static_cast<std::size_t>(k)];
}

std::vector<WatsonTerm> watson_expand(const LevySpec& spec, int N, double mbar_value) {
  if (N < 0 || N > spec.order() + 1) throw ArgumentError("Watson order N must lie in 0..K+1");
  std::vector<WatsonTerm> out;
  const Rational& a = spec.alpha();
  if (N >= 1) out.push_back({a, symbol_coefficient(spec, 0), false});
  out.push_back({Rational(0), mbar_value, true});
  for (int k = 1; k < N; ++k) out.push_back({a - Rational(k), symbol_coefficient(spec, k), false});
  return out;
}

std::vector<WatsonTerm> watson_expand(const LevySpec& spec, int N) {
  return watson_expand(spec, N, spec.mbar());
}

namespace {

// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExpansionCheck check_expansion(const LevySpec& spec, int N, std::span<const double> lambda_grid,
                               const QuadConfig& quad) {
  if (N < 0 || N > spec.order() + 1) throw ArgumentError("Watson order N must lie in 0..K+1");
  if (lambda_grid.size() < 2) throw ArgumentError("lambda grid needs at least two points");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] < 10) throw ArgumentError("lambda grid must start at >= 10");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) throw ArgumentError("lambda grid must increase");
  }
  const double a = spec.alpha_value();
  const int terms = std::max(N, 1);
  ExpansionCheck out;
  out.N = N;
  out.expected_slope = a - N;
  for (double lambda : lambda_grid) {
    // f - S_N = [N == 0] alpha_0 lambda^alpha - int e^(-lambda t) (m - sum_{k<max(N,1)} p_k t^(k-1-alpha))
    auto integrand = [&](double t) { return std::exp(-lambda * t) * spec.reduced_density(t, terms); };
    QuadConfig q{1e-300, std::max(quad.rel_tol, 1e-11), quad.max_evals};
    double head = checked(tanh_sinh(integrand, 0.0, 1.0 / lambda, q), "remainder near 0");
    double mid_end = std::min(1.0, 40.0 / lambda);
    double mid = checked(tanh_sinh(integrand, 1.0 / lambda, mid_end, q), "remainder middle");
    QuadConfig qt{1e-13 * (std::fabs(head) + std::fabs(mid)), 0.0, quad.max_evals};
    double tail = 0.0;
    if (mid_end < 1.0) tail += checked(tanh_sinh(integrand, mid_end, 1.0, qt), "remainder tail");
    tail += checked(exp_sinh(integrand, 1.0, qt), "remainder tail");
    double r = -(head + mid + tail);
    if (N == 0) r += symbol_coefficient(spec, 0) * std::pow(lambda, a);
    out.lambdas.push_back(lambda);
    out.remainders.push_back(r);
    out.max_scaled_remainder = std::max(out.max_scaled_remainder, std::fabs(r) * std::pow(lambda, N - a));
  }
  out.slope = loglog_slope(out.lambdas, out.remainders);
  out.pass = std::fabs(out.slope - out.expected_slope) <= 0.15;
  return out;
}

ValidationReport validate(const LevySpec& spec) {
  ValidationReport rep;
  // nonnegativity and rapid decay on a log grid
  for (int i = 0; i <= 240; ++i) {
    double t = std::pow(10.0, -6.0 + 9.0 * i / 240.0);
    double m = spec.density(t);
    if (!(m >= 0)) rep.density_nonnegative = false;
    if (t >= 1.0)
      for (double beta : {1.0, 2.0, 4.0, 8.0})
        if (!std::isfinite(m * std::pow(t, beta))) rep.rapid_decay = false;
  }
  if (!rep.density_nonnegative) rep.failures.push_back("density is negative or undefined at a sampled t");
  if (!rep.rapid_decay) rep.failures.push_back("density * t^beta is not finite on [1, 1e3]");

  // g(t) - sum_{k<=J} p_k t^k = O(t^(J+1)) for every J <= K: the scaled residual
  // must not keep growing as t halves (a wrong p_j grows it by 2^(J+1-j) per step).
  // High J are only checked where the residual is above rounding level.
  const int K = spec.order();
  for (int J = 0; J <= K && rep.expansion_consistent; ++J) {
    std::vector<double> ratios;
    for (int j = 2; j < 200; ++j) {
      double t = std::ldexp(1.0, -j);
      double g = spec.regular(t);
      double poly = 0.0, mag = std::fabs(g);
      for (int k = J; k >= 0; --k) poly = poly * t + spec.p()[static_cast<std::size_t>(k)];
      for (int k = 0; k <= J; ++k) mag += std::fabs(spec.p()[static_cast<std::size_t>(k)]) * std::pow(t, k);
      double resid = std::fabs(g - poly);
      if (resid <= 1e3 * kEps * mag) break;
      ratios.push_back(resid / std::pow(t, J + 1));
    }
    if (ratios.size() >= 4) {
      double lo = *std::min_element(ratios.begin(), ratios.end());
      if (ratios.back() > 4.0 * lo) rep.expansion_consistent = false;
    }
  }
  if (!rep.expansion_consistent)
    rep.failures.push_back("density does not match its expansion coefficients near t = 0");

  try {
    rep.mbar = spec.mbar();
    if (!(rep.mbar < -1e-10)) {
      rep.mbar_negative = false;
      std::ostringstream os;
      os << "mbar(0,inf) = " << rep.mbar << " is not negative";
      rep.failures.push_back(os.str());
    }
  } catch (const NumericError& e) {
    rep.mbar_negative = false;
    rep.failures.push_back(e.what());
  }
  return rep;
}

}  // namespace sbm::bernstein
