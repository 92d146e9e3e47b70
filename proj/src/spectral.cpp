#include "sbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sbm/error.hpp"
#include "sbm/special.hpp"

namespace sbm::spectral {

std::string_view normalization_name(Normalization norm) {
  return norm == Normalization::direct ? "direct" : "paper";
}

std::optional<Normalization> parse_normalization(std::string_view name) {
  if (name == "direct") return Normalization::direct;
  if (name == "paper") return Normalization::paper;
  return std::nullopt;
}

double kappa(Normalization norm, int n) { return norm == Normalization::direct ? 1.0 : 1.0 / n; }

namespace {

double trace_constant(int n) { return sphere_area(n) / std::pow(2 * std::numbers::pi, n); }

bool nonpositive_integer(const Rational& z) { return z.is_integer() && z <= Rational(0); }

// |s_k(z_k)| below this multiple of its term magnitudes counts as an exact zero
constexpr double kAnalyticRel = 1e-12;

}  // namespace

ZetaPoleTable zeta_poles(const symbolic::ComplexPowerSeries& cps, int n, Normalization norm) {
  if (n < 1) throw ArgumentError("dimension n must be >= 1");
  ZetaPoleTable table{n, cps.alpha, norm, cps.irrational, {}};
  const Rational two_alpha = Rational(2) * cps.alpha;
  const double pref = kappa(norm, n) * trace_constant(n) / two_alpha.to_double();
  for (int k = 0; k <= cps.K(); ++k) {
    Rational z = Rational(n - k) / two_alpha;
    double zd = z.to_double();
    double s = cps.s(k, zd).real();
    bool analytic = std::fabs(s) <= kAnalyticRel * cps.magnitude(k, zd);
    double residue = analytic ? 0.0 : pref * s;
    if (cps.irrational && nonpositive_integer(z) && !analytic) {
      std::ostringstream os;
      os << "alpha is flagged irrational but z_" << k << " = " << z.to_string()
         << " is a nonpositive integer with nonzero residue";
      throw ValidationError(os.str());
    }
    table.entries.push_back({k, z, residue, analytic});
  }
  return table;
}

symbolic::ComplexPowerSeries power_series_for(const bernstein::LevySpec& spec, int K) {
  auto series = symbolic::shifted_symbol(spec, std::min(spec.order(), (K + 1) / 2));
  return symbolic::complex_power_symbol(symbolic::parametrix(series, K), spec.treat_as_irrational());
}

std::complex<double> zeta_continue(const bernstein::LevySpec& spec, int n, std::complex<double> z, Normalization norm,
                                   const ContinuationOptions& opts) {
  if (n < 1) throw ArgumentError("dimension n must be >= 1");
  if (!(opts.R > 0)) throw ArgumentError("split radius must be positive");
  const int available = 2 * spec.order();
  const int K = opts.K < 0 ? available : opts.K;
  if (K > available) throw ArgumentError("continuation order K exceeds 2 * spec order");
  const double a = spec.alpha_value();
  const double top = n - 2 * a * z.real() - K;
  if (!(top < -1)) {
    std::ostringstream os;
    os << "continuation order K = " << K << " too small for z = " << z << " (tail integral diverges)";
    throw ArgumentError(os.str());
  }
  auto cps = power_series_for(spec, K);
  auto table = zeta_poles(cps, n, Normalization::direct);
  for (const auto& e : table.entries)
    if (!e.analytic && std::abs(z - e.z.to_double()) < 1e-3) {
      std::ostringstream os;
      os << "z = " << z << " lies within 1e-3 of the pole z_" << e.k << " = " << e.z.to_string();
      throw ArgumentError(os.str());
    }

  const double mbar = spec.mbar();
  auto sigma = [&](double r) { return bernstein::eval_f(spec, r * r, QuadConfig{1e-14, 0.0, 400000}) - mbar; };
  std::vector<std::complex<double>> s(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) s[static_cast<std::size_t>(k)] = cps.s(k, z);

  auto inner = [&](double r) {
    return std::exp(-z * std::log(sigma(r))) * std::pow(r, n - 1);
  };
  auto tail = [&](double r) {
    double lr = std::log(r);
    std::complex<double> v = std::exp(-z * std::log(sigma(r)));
    for (int k = 0; k <= K; ++k) v -= s[static_cast<std::size_t>(k)] * std::exp((-2 * a * z - double(k)) * lr);
    return v * std::pow(r, n - 1);
  };

  auto in = tanh_sinh(inner, 0.0, opts.R, opts.quad);
  if (!in.converged) throw NumericError("zeta continuation: inner integral did not converge");

  // cut the tail where the first omitted level falls below rounding relevance
  int last = K;
  while (last > 0 && cps.levels[static_cast<std::size_t>(last)].terms.empty()) --last;
  const double est = cps.magnitude(last, z);
  const double p = top - 2;  // omitted remainder ~ r^(p-1)
  const double want = 1e-15 * (1 + std::abs(in.value));
  double R_cut = opts.R;
  if (est > 0) R_cut = std::max(opts.R, std::pow(want * std::fabs(p) / est, 1.0 / p));
  R_cut = std::min(R_cut, 1e6 * opts.R);
  auto tl = tanh_sinh(tail, opts.R, R_cut, opts.quad);
  if (!tl.converged) throw NumericError("zeta continuation: tail integral did not converge");

  std::complex<double> boundary = 0.0;
  for (int k = 0; k <= K; ++k) {
    std::complex<double> e = double(n) - 2 * a * z - double(k);
    if (std::abs(e) < 1e-9)
      boundary += -cps.ds(k, z) / (2 * a);  // removable: limit of s_k R^e / e
    else
      boundary += s[static_cast<std::size_t>(k)] * std::exp(e * std::log(opts.R)) / e;
  }
  return kappa(norm, n) * trace_constant(n) * (in.value + tl.value - boundary);
}

std::string_view source_name(CoeffSource s) {
  switch (s) {
    case CoeffSource::residue: return "gamma-residue";
    case CoeffSource::zeta_value: return "zeta-value";
    case CoeffSource::unresolved: return "unresolved";
  }
  return "?";
}

double HeatTraceExpansion::evaluate(double t, bool with_prefactor) const {
  double sum = 0.0;
  for (const auto& p : power_terms)
    if (p.value) sum += *p.value * std::pow(t, p.exponent.to_double());
  for (const auto& l : log_terms) sum -= l.value * std::pow(t, l.l) * std::log(t);
  for (const auto& g : gamma_terms) sum += g.value * std::pow(t, g.l);
  return with_prefactor ? std::exp(-prefactor_rate * t) * sum : sum;
}

namespace {

// l in [0, -z_K] with -l not among the z_k
std::vector<int> gamma_family(const ZetaPoleTable& table) {
  std::vector<int> out;
  if (table.entries.empty()) return out;
  const Rational last = table.entries.back().z;
  for (int l = 0; Rational(-l) >= last; ++l) {
    bool hit = std::any_of(table.entries.begin(), table.entries.end(),
                           [&](const PoleEntry& e) { return e.z == Rational(-l); });
    if (!hit) out.push_back(l);
  }
  return out;
}

}  // namespace

std::vector<int> required_zeta_points(const ZetaPoleTable& table) {
  std::vector<int> out;
  for (const auto& e : table.entries)
    if (nonpositive_integer(e.z) && e.analytic) out.push_back(static_cast<int>(-e.z.num()));
  for (int l : gamma_family(table)) out.push_back(l);
  std::sort(out.begin(), out.end());
  return out;
}

HeatTraceExpansion heat_trace_expansion(const ZetaPoleTable& table, const std::map<int, double>& zeta_values) {
  HeatTraceExpansion hte;
  hte.n = table.n;
  hte.alpha = table.alpha;
  hte.normalization = table.normalization;
  for (const auto& e : table.entries) {
    PowerCoefficient pc{e.k, -e.z, std::nullopt, CoeffSource::residue};
    if ((-e.z).is_integer() && -e.z >= Rational(0)) hte.collisions.push_back(e.k);
    if (!nonpositive_integer(e.z)) {
      pc.value = e.analytic ? 0.0 : gamma_fn(e.z.to_double()) * e.residue;
    } else {
      int l = static_cast<int>(-e.z.num());
      if (e.analytic) {
        auto it = zeta_values.find(l);
        if (it == zeta_values.end())
          throw ArgumentError("zeta(" + std::to_string(-l) + ") is required but was not supplied");
        pc.value = gamma_residue(l) * it->second;
        pc.source = CoeffSource::zeta_value;
      } else {
        if (table.irrational)
          throw ValidationError("log term requested for an alpha flagged irrational");
        hte.log_terms.push_back({l, e.k, gamma_residue(l) * e.residue});
        hte.unresolved_finite_parts.push_back(l);
        pc.source = CoeffSource::unresolved;
      }
    }
    hte.power_terms.push_back(pc);
  }
  for (int l : gamma_family(table)) {
    auto it = zeta_values.find(l);
    if (it == zeta_values.end()) throw ArgumentError("zeta(" + std::to_string(-l) + ") is required but was not supplied");
    hte.gamma_terms.push_back({l, gamma_residue(l) * it->second});
  }
  return hte;
}

HeatTraceExpansion apply_shift(HeatTraceExpansion expansion, double mbar) {
  expansion.prefactor_rate = mbar;
  return expansion;
}

double banuelos_crosscheck(int n, double alpha, double alpha0) {
  return trace_constant(n) * std::tgamma(n / (2 * alpha)) / (2 * alpha) * std::pow(alpha0, -n / (2 * alpha));
}

}  // namespace sbm::spectral
