#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "sbm/bernstein.hpp"
#include "sbm/quadrature.hpp"
#include "sbm/rational.hpp"
#include "sbm/symbolic.hpp"

namespace sbm::spectral {

// direct: kappa = 1 (trace as the plain radial integral); paper: kappa = 1/n.
enum class Normalization { direct, paper };

std::string_view normalization_name(Normalization norm);
std::optional<Normalization> parse_normalization(std::string_view name);
double kappa(Normalization norm, int n);

struct PoleEntry {
  int k;
  Rational z;  // (n - k) / (2 alpha)
  double residue;
  bool analytic;
};

struct ZetaPoleTable {
  int n;
  Rational alpha;
  Normalization normalization;
  bool irrational;
  std::vector<PoleEntry> entries;  // k = 0..K
};

ZetaPoleTable zeta_poles(const symbolic::ComplexPowerSeries& cps, int n, Normalization norm);

struct ContinuationOptions {
  int K = -1;  // homogeneity levels subtracted in the tail; -1 uses all available
  double R = 4.0;
  QuadConfig quad{1e-12, 0.0, 400000};
};

std::complex<double> zeta_continue(const bernstein::LevySpec& spec, int n, std::complex<double> z, Normalization norm,
                                   const ContinuationOptions& opts = {});

enum class CoeffSource { residue, zeta_value, unresolved };
std::string_view source_name(CoeffSource s);

struct PowerCoefficient {
  int k;
  Rational exponent;  // power of t: -(n - k)/(2 alpha)
  std::optional<double> value;
  CoeffSource source;
};

// contributes -value * t^l * log t
struct LogCoefficient {
  int l;
  int k;
  double value;
};

// t^l from the pole of Gamma at -l where zeta is analytic and no z_k equals -l:
// value = (-1)^l / l! * zeta(-l)
struct GammaPoleTerm {
  int l;
  double value;
};

struct HeatTraceExpansion {
  int n = 0;
  Rational alpha;
  Normalization normalization = Normalization::direct;
  std::vector<PowerCoefficient> power_terms;
  std::vector<LogCoefficient> log_terms;
  // l <= -z_K only, so the expansion is complete through t^(-z_K)
  std::vector<GammaPoleTerm> gamma_terms;
  double prefactor_rate = 0.0;  // reported trace is exp(-rate t) * series
  std::vector<int> unresolved_finite_parts;
  // k whose exponent is a nonnegative integer, where the power and Gamma-pole families overlap
  std::vector<int> collisions;

  // resolved terms only
  double evaluate(double t, bool with_prefactor = true) const;
};

// l >= 0 such that zeta(-l) must be supplied
std::vector<int> required_zeta_points(const ZetaPoleTable& table);
HeatTraceExpansion heat_trace_expansion(const ZetaPoleTable& table, const std::map<int, double>& zeta_values);
HeatTraceExpansion apply_shift(HeatTraceExpansion expansion, double mbar);

double banuelos_crosscheck(int n, double alpha, double alpha0);

// shifted_symbol -> parametrix -> complex powers at homogeneity order K
symbolic::ComplexPowerSeries power_series_for(const bernstein::LevySpec& spec, int K);

}  // namespace sbm::spectral
