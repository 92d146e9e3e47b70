#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/quadrature.hpp"
#include "sbm/rational.hpp"

namespace sbm::bernstein {

enum class Example { relativistic, power_ratio, exp_root, gamma_ratio_1, gamma_ratio_2 };

std::string_view example_name(Example e);
std::optional<Example> parse_example(std::string_view name);

// alpha is the family parameter as printed; for power-ratio the order of the
// resulting spec is 1 - alpha. exp-root and gamma-ratio-1 only exist at 1/2.
struct CatalogParams {
  Rational alpha{1, 2};
  double c = 1.0;
};

struct CatalogId {
  Example example;
  CatalogParams params;
};

// Regular part g(t) = t^(1+alpha) m(t); g(0+) = p_0.
using RegularPart = std::function<double(double)>;

class LevySpec {
 public:
  LevySpec(Rational alpha, std::vector<double> p, RegularPart g, std::string density_name,
           bool treat_as_irrational = false, std::optional<CatalogId> id = std::nullopt,
           double series_cap = 1.0);

  const Rational& alpha() const { return alpha_; }
  double alpha_value() const { return alpha_.to_double(); }
  bool treat_as_irrational() const { return irrational_; }
  std::span<const double> p() const { return p_; }
  int order() const { return static_cast<int>(p_.size()) - 1; }
  const std::string& density_name() const { return density_name_; }
  const std::optional<CatalogId>& catalog_id() const { return id_; }

  double regular(double t) const { return g_(t); }
  double density(double t) const;
  // m(t) - sum_{k<terms} p_k t^(k-1-alpha), free of cancellation near 0.
  double reduced_density(double t, int terms) const;
  // m-bar(0, inf), computed once at tol 1e-13 and shared by copies.
  double mbar() const;

  LevySpec with_irrational(bool flag) const;
  // Same density with every p_k and the density scaled by s.
  LevySpec scaled(double s) const;

 private:
  struct Lazy;
  Rational alpha_;
  std::vector<double> p_;
  RegularPart g_;
  std::string density_name_;
  bool irrational_;
  std::optional<CatalogId> id_;
  double switch_t_;
  std::shared_ptr<Lazy> lazy_;
};

LevySpec catalog(Example e, const CatalogParams& params = {}, int order = 12);
LevySpec catalog(std::string_view name, const CatalogParams& params = {}, int order = 12);
// density_name: a catalog name or "truncated-stable" (p_0 t^(-1-alpha) on (0,1]).
LevySpec custom(Rational alpha, std::vector<double> p, std::string_view density_name, double c = 1.0,
                bool treat_as_irrational = false);

double mbar(const LevySpec& spec, const QuadConfig& quad = {});
double eval_f(const LevySpec& spec, double lambda, const QuadConfig& quad = {});
double f_derivative(const LevySpec& spec, int l, double lambda, const QuadConfig& quad = {});

// alpha_k = -Gamma(k - alpha) p_k
double symbol_coefficient(const LevySpec& spec, int k);

struct WatsonTerm {
  Rational exponent;  // power of lambda
  double coeff;
  bool is_shift;      // the constant m-bar
};
// Terms of f ~ m-bar + sum_{k<N} alpha_k lambda^(alpha-k), decreasing exponent.
std::vector<WatsonTerm> watson_expand(const LevySpec& spec, int N, double mbar_value);
std::vector<WatsonTerm> watson_expand(const LevySpec& spec, int N);

struct ExpansionCheck {
  int N = 0;
  std::vector<double> lambdas;
  std::vector<double> remainders;  // f - S_N
  double max_scaled_remainder = 0.0;
  double slope = 0.0;
  double expected_slope = 0.0;
  bool pass = false;
};
ExpansionCheck check_expansion(const LevySpec& spec, int N, std::span<const double> lambda_grid,
                               const QuadConfig& quad = {});

struct ValidationReport {
  bool density_nonnegative = true;
  bool rapid_decay = true;
  bool expansion_consistent = true;
  bool mbar_negative = true;
  double mbar = 0.0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};
ValidationReport validate(const LevySpec& spec);

}  // namespace sbm::bernstein
