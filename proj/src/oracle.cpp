#include "sbm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "sbm/error.hpp"
#include "sbm/special.hpp"

namespace sbm::oracle {

namespace {

const double kPi = std::numbers::pi;
const QuadConfig kSymbolQuad{1e-14, 0.0, 400000};

double checked(const QuadResult& r, const char* what) {
  if (!r.converged) throw NumericError(std::string("quadrature did not converge: ") + what);
  return r.value;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi >= lo) || count < 1) throw ArgumentError("log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, s);
  }
  return out;
}

TraceSample tr_heat_numeric(const bernstein::LevySpec& spec, int n, double t, const QuadConfig& quad,
                            spectral::Normalization norm) {
  if (!(t > 0) || !std::isfinite(t)) throw ArgumentError("t must be positive");
  if (n < 1) throw ArgumentError("dimension n must be >= 1");
  const double mb = spec.mbar();
  auto sigma = [&](double r) { return bernstein::eval_f(spec, r * r, kSymbolQuad) - mb; };
  auto integrand = [&](double r) {
    double e = t * sigma(r);
    return std::exp(-e) * std::pow(r, n - 1);
  };

  // split where t * sigma~ = 50
  const double target = 50.0 / t;
  double split = 0.0;
  if (sigma(0.0) < target) {
    double lo = 0.0, hi = 1.0;
    while (sigma(hi) < target) {
      lo = hi;
      hi *= 2;
      if (hi > 1e300) throw NumericError("trace split point not bracketed");
    }
    std::uintmax_t iters = 60;
    auto root = boost::math::tools::toms748_solve([&](double r) { return sigma(r) - target; }, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(20), iters);
    split = 0.5 * (root.first + root.second);
  }
  // e-folding length of the integrand beyond the split
  double scale;
  if (split > 0) {
    scale = 1.0 / (t * 2 * split * bernstein::f_derivative(spec, 1, split * split, kSymbolQuad));
  } else {
    scale = 1.0 / std::sqrt(t * bernstein::f_derivative(spec, 1, 0.0, kSymbolQuad));
  }
  if (!(scale > 0) || !std::isfinite(scale)) scale = 1.0;

  double value = 0.0, err = 0.0;
  if (split > 0) {
    auto r = tanh_sinh(integrand, 0.0, split, quad);
    value += checked(r, "trace core");
    err += r.error;
  }
  auto tail = exp_sinh(integrand, split, quad, scale);
  value += checked(tail, "trace tail");
  err += tail.error;

  double pref = spectral::kappa(norm, n) * std::pow(2 * kPi, -n) * sphere_area(n);
  return {t, pref * value, pref * err};
}

std::vector<TraceSample> tr_heat_numeric(const bernstein::LevySpec& spec, int n, std::span<const double> ts,
                                         const QuadConfig& quad, spectral::Normalization norm) {
  std::vector<TraceSample> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(tr_heat_numeric(spec, n, t, quad, norm));
  return out;
}

double closed_form_n2_relativistic(double t) { return std::exp(-t) * (1 + t) / (2 * kPi * t * t); }

double closed_form_n3_relativistic(double t) { return std::cyl_bessel_k(2.0, t) / (2 * kPi * kPi * t); }

FitResult fit_asymptotics(std::span<const TraceSample> samples, std::span<const double> exponents,
                          std::span<const int> include_log_at, const FitOptions& opts) {
  const std::size_t cols = exponents.size() + include_log_at.size();
  if (cols == 0) throw ArgumentError("fit model has no terms");
  if (opts.check_preconditions) {
    if (samples.size() < 2 * cols) throw ArgumentError("fit needs at least twice as many samples as model terms");
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end(),
                                        [](const TraceSample& a, const TraceSample& b) { return a.t < b.t; });
    if (mx->t > 1.0 || mx->t < 100 * (1 - 1e-9) * mn->t)
      throw ArgumentError("fit t-range must span at least two decades below 1");
  } else if (samples.size() < cols) {
    throw ArgumentError("fit has fewer samples than model terms");
  }
  double we = opts.weight_exponent;
  if (std::isnan(we)) {
    double lowest = 0.0;
    for (double e : exponents) lowest = std::min(lowest, e);
    we = -lowest;
  }

  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd A(rows, static_cast<Eigen::Index>(cols));
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (!(s.t > 0)) throw ArgumentError("fit sample with t <= 0");
    double w = std::pow(s.t, we);
    Eigen::Index j = 0;
    for (double e : exponents) A(i, j++) = w * std::pow(s.t, e);
    for (int l : include_log_at) A(i, j++) = -w * std::pow(s.t, l) * std::log(s.t);
    b(i) = w * s.value;
  }
  Eigen::VectorXd d = A.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < d.size(); ++j)
    if (!(d(j) > 0)) throw NumericError("fit design has an all-zero column");
  Eigen::MatrixXd As = A * d.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < opts.condition_threshold))
    throw NumericError("fit design is ill-conditioned (condition " + std::to_string(cond) + "); shrink the model");
  Eigen::VectorXd y = svd.solve(b);
  Eigen::VectorXd c = y.cwiseQuotient(d);

  FitResult out;
  out.exponents.assign(exponents.begin(), exponents.end());
  out.log_powers.assign(include_log_at.begin(), include_log_at.end());
  out.include_log = !include_log_at.empty();
  for (std::size_t j = 0; j < exponents.size(); ++j) out.coefficients.push_back(c(static_cast<Eigen::Index>(j)));
  for (std::size_t j = 0; j < include_log_at.size(); ++j)
    out.log_coefficients.push_back(c(static_cast<Eigen::Index>(exponents.size() + j)));
  double bn = b.norm();
  out.residual_norm = (A * c - b).norm() / (bn > 0 ? bn : 1.0);
  out.condition = cond;
  if (!std::isfinite(out.residual_norm)) throw NumericError("fit residual is not finite");
  return out;
}

namespace {

struct ExtraTerm {
  double exponent;
  bool log;
};

// Terms beyond order K that can be nonzero: k in (K, K + 6] with a nonzero
// residue or a nonpositive-integer z_k, and the next Gamma-pole powers t^l.
// The first `want` distinct exponents, ascending.
std::vector<ExtraTerm> next_terms(const bernstein::LevySpec& spec, int n, int K, spectral::Normalization norm,
                                  std::size_t want) {
  std::vector<ExtraTerm> all;
  const double last = -spectral::zeta_poles(spectral::power_series_for(spec, K), n, norm).entries.back().z.to_double();
  for (int l = static_cast<int>(std::floor(last)) + 1; all.size() < want; ++l) all.push_back({double(l), false});
  for (int extra = 6; extra >= 1; --extra) {
    try {
      auto table = spectral::zeta_poles(spectral::power_series_for(spec, K + extra), n, norm);
      for (const auto& e : table.entries) {
        if (e.k <= K) continue;
        bool nonpositive_int = e.z.is_integer() && e.z <= Rational(0);
        if (e.analytic && !nonpositive_int) continue;
        all.push_back({-e.z.to_double(), false});
        if (nonpositive_int && !e.analytic) all.push_back({-e.z.to_double(), true});
      }
      break;
    } catch (const Error&) {
    }
  }
  std::sort(all.begin(), all.end(), [](const ExtraTerm& a, const ExtraTerm& b) {
    return a.exponent != b.exponent ? a.exponent < b.exponent : a.log < b.log;
  });
  std::vector<ExtraTerm> out;
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0 && all[i].exponent == all[i - 1].exponent) {
      if (all[i].log != all[i - 1].log) out.push_back(all[i]);
      continue;
    }
    if (distinct++ == want) break;
    out.push_back(all[i]);
  }
  return out;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

VerifyReport verify_expansion(const bernstein::LevySpec& spec, int n, int K, spectral::Normalization norm,
                              std::span<const double> t_grid, const VerifyOptions& opts) {
  if (t_grid.empty()) throw ArgumentError("verify needs a nonempty t grid");
  VerifyReport rep;
  rep.n = n;
  rep.K = K;
  rep.normalization = norm;
  auto cps = spectral::power_series_for(spec, K);
  auto table = spectral::zeta_poles(cps, n, norm);
  for (int l : spectral::required_zeta_points(table))
    rep.zeta_values[l] = spectral::zeta_continue(spec, n, std::complex<double>(-l, 0.0), norm).real();
  rep.expansion = spectral::heat_trace_expansion(table, rep.zeta_values);
  const auto& hte = rep.expansion;

  // numeric side is always the plain trace
  std::vector<double> lx, ly;
  double tmin = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    auto s = tr_heat_numeric(spec, n, t, opts.quad);
    double ex = hte.evaluate(t, false);
    double dev = std::fabs(s.value - ex) / std::fabs(s.value);
    rep.rows.push_back({t, s.value, s.est_error, ex, dev});
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev);
    double rem = std::fabs(s.value - ex);
    if (rem > 50 * s.est_error + 1e-14 * std::fabs(s.value)) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(rem));
    }
    if (t < tmin) {
      tmin = t;
      rep.leading_ratio = s.value / ex;
    }
  }
  rep.empirical_order = lx.size() >= 2 ? slope(lx, ly) : std::numeric_limits<double>::quiet_NaN();

  // first term the partial sum leaves out
  std::set<double> model_exps;
  std::vector<int> model_logs;
  for (const auto& p : hte.power_terms)
    if (!p.value) model_exps.insert(p.exponent.to_double());
  for (const auto& l : hte.log_terms) model_logs.push_back(l.l);
  auto extra = next_terms(spec, n, K, norm, 2);
  double expected = std::numeric_limits<double>::infinity();
  for (double e : model_exps) expected = std::min(expected, e);
  for (int l : model_logs) expected = std::min(expected, static_cast<double>(l));
  if (!extra.empty()) expected = std::min(expected, extra.front().exponent);
  rep.expected_order = expected;

  rep.kappa_mismatch = std::fabs(rep.leading_ratio - 1.0) > 1e-3;
  if (rep.kappa_mismatch) {
    rep.note = "numeric trace / expansion = " + std::to_string(rep.leading_ratio) + " at the smallest t under kappa=" +
               std::string(spectral::normalization_name(norm)) + "; the expansion does not match the plain trace";
  }

  if (!model_logs.empty() && !rep.kappa_mismatch) {
    for (const auto& x : extra) {
      if (x.log)
        model_logs.push_back(static_cast<int>(std::lround(x.exponent)));
      else
        model_exps.insert(x.exponent);
    }
    std::vector<double> grid = opts.fit_grid.empty() ? log_grid(0.02, 0.5, 24) : opts.fit_grid;
    std::vector<TraceSample> rem;
    for (double t : grid) {
      auto s = tr_heat_numeric(spec, n, t, opts.quad);
      // log terms go back into the remainder so the fit sees them
      double logs = 0.0;
      for (const auto& l : hte.log_terms) logs -= l.value * std::pow(t, l.l) * std::log(t);
      rem.push_back({t, s.value - hte.evaluate(t, false) + logs, s.est_error});
    }
    std::vector<double> exps(model_exps.begin(), model_exps.end());
    FitOptions fo;
    fo.check_preconditions = false;
    fo.weight_exponent = -std::min(exps.empty() ? 0.0 : exps.front(), static_cast<double>(model_logs.front()));
    auto fit = fit_asymptotics(rem, exps, model_logs, fo);
    for (std::size_t i = 0; i < hte.log_terms.size(); ++i) {
      rep.fitted_log_powers.push_back(model_logs[i]);
      rep.fitted_log_coefficients.push_back(fit.log_coefficients[i]);
    }
    for (const auto& p : hte.power_terms) {
      if (p.value) continue;
      auto it = std::find(exps.begin(), exps.end(), p.exponent.to_double());
      rep.fitted_finite_parts.push_back(fit.coefficients[static_cast<std::size_t>(it - exps.begin())]);
    }
  }
  rep.pass = !rep.kappa_mismatch && rep.max_rel_deviation < opts.tol;
  return rep;
}

NormalizationArbitration arbitrate_normalization(const bernstein::LevySpec& spec, int n,
                                                 std::span<const double> t_grid, std::span<const double> exponents,
                                                 double tol) {
  NormalizationArbitration out;
  out.n = n;
  auto samples = tr_heat_numeric(spec, n, t_grid);
  auto fit = fit_asymptotics(samples, exponents);
  out.fitted_c0 = fit.coefficients.front();
  out.fit_condition = fit.condition;
  auto cps = spectral::power_series_for(spec, 0);
  auto hd = spectral::heat_trace_expansion(spectral::zeta_poles(cps, n, spectral::Normalization::direct), {});
  auto hp = spectral::heat_trace_expansion(spectral::zeta_poles(cps, n, spectral::Normalization::paper), {});
  out.direct_c0 = *hd.power_terms.front().value;
  out.paper_c0 = *hp.power_terms.front().value;
  out.rel_error_direct = std::fabs(out.fitted_c0 / out.direct_c0 - 1);
  out.ratio_to_paper = out.fitted_c0 / out.paper_c0;
  out.direct_agrees = out.rel_error_direct < tol;
  out.paper_discrepancy = std::fabs(out.ratio_to_paper - 1) > tol;
  return out;
}

}  // namespace sbm::oracle
