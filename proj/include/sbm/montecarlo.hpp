#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sbm/bernstein.hpp"

namespace sbm::montecarlo {

using Density = std::function<double(double)>;

// A subordinator for simulation: Levy density, extra deterministic drift, and
// the scaling data used for window-relative cutoffs and extrapolation.
struct Model {
  Density density;
  double alpha = 0.5;
  double alpha0 = 1.0;  // leading symbol coefficient; jumps at time t live on (alpha0 t)^(1/alpha)
  double extra_drift = 0.0;
  // Laplace exponent of the exact process; empty disables laplace_check targets
  std::function<double(double)> laplace_exponent;
};

Model model_from(const bernstein::LevySpec& spec);

// Compound Poisson part above epsilon plus the drift d(eps) = int_0^eps t m(t) dt.
// Jump sizes come from a 2048-knot log-spaced table on [eps, t_max] with a
// power law inside each interval.
class JumpTable {
 public:
  static constexpr int kKnots = 2048;

  JumpTable(const Density& m, double epsilon, double extra_drift = 0.0);

  double epsilon() const { return eps_; }
  double rate() const { return rate_; }    // Lambda(eps) as tabulated
  double drift() const { return drift_; }  // d(eps) + extra drift
  double t_max() const { return knots_.empty() ? eps_ : knots_.back(); }
  double mean_jump() const { return mean_jump_; }  // of the tabulated law
  // E X_1 of the approximation: drift + rate * mean_jump
  double mean_rate() const { return drift_ + rate_ * mean_jump_; }
  // jump size for u in (0, 1)
  double sample(double u) const;

 private:
  double eps_;
  double rate_ = 0.0;
  double drift_ = 0.0;
  double mean_jump_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> cdf_;    // cumulative mass at each knot, cdf_[0] = 0
  std::vector<double> gamma_;  // local density ~ t^(-gamma) per interval
};

struct SimConfig {
  double epsilon = 1e-4;
  std::size_t paths = 100000;
  double horizon = 1.0;
  std::uint64_t seed = 20240601;
  std::vector<double> time_grid{0.5, 1.0};
  unsigned threads = 0;            // 0: hardware concurrency
  double relative_cutoff = 1e-3;   // bg and arcsine: cutoff relative to the natural scale
  int dimension = 1;               // Brownian dimension for bg
  std::size_t bootstrap = 200;
};

struct SubordinatorPaths {
  std::vector<double> times;
  std::vector<double> values;  // paths x times, row-major
  std::size_t paths = 0;
  std::size_t nonmonotone = 0;
  double epsilon = 0.0;
  double rate = 0.0;
  double drift = 0.0;
  double mean_rate = 0.0;
  double at(std::size_t path, std::size_t j) const { return values[path * times.size() + j]; }
};

SubordinatorPaths simulate_subordinator(const Model& model, const SimConfig& cfg);
SubordinatorPaths simulate_subordinator(const bernstein::LevySpec& spec, const SimConfig& cfg);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};
// pairwise mean and standard error, fixed order
Estimate estimate(std::span<const double> xs);

struct LaplaceCell {
  double lambda, t, mean, std_error, target, z;
  bool pass;
};

struct LaplaceReport {
  std::vector<LaplaceCell> cells;
  // mean of X_T / T against the approximation's E X_1
  double compensator_mean = 0.0, compensator_stderr = 0.0, compensator_target = 0.0;
  bool compensator_pass = false;
  std::size_t nonmonotone = 0;
  double epsilon = 0.0;
  bool pass = false;
};

LaplaceReport laplace_check(const Model& model, const SimConfig& cfg, std::span<const double> lambdas);
LaplaceReport laplace_check(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> lambdas);

struct BgCell {
  double t, epsilon, median, ci_lo, ci_hi;
};

struct BgTrend {
  double beta;
  int expected = 0;  // -1: medians fall as t falls (beta > 2 alpha), +1: rise, 0: critical, not asserted
  std::vector<BgCell> cells;  // in cfg.time_grid order (decreasing t)
  bool monotone = false;
  bool resolved = false;  // consecutive bootstrap intervals disjoint
  bool pass = false;
};

struct BgReport {
  std::vector<BgTrend> trends;
  // Var(B^1_{X_t}) = 2 E X_t per window: z-score of mean(B^2 - 2X)
  std::vector<double> bridge_z;
  bool bridge_pass = false;
  bool pass = false;
};

// cfg.time_grid must decrease; default windows {1e-1, 1e-2, 1e-3, 1e-4}
BgReport bg_index_check(const Model& model, const SimConfig& cfg, std::span<const double> betas);
BgReport bg_index_check(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> betas);

struct ArcsineCell {
  double x, epsilon, ratio, std_error, creep_fraction;
};

struct ArcsineReport {
  std::vector<ArcsineCell> cells;
  double extrapolated = 0.0;  // a in ratio ~ a + b x^alpha
  double extrapolated_stderr = 0.0;
  double slope = 0.0;
  double target = 0.0;
  bool pass = false;
};

ArcsineReport arcsine_estimate(const Model& model, const SimConfig& cfg, std::span<const double> x_grid,
                               double tol = 0.05);
ArcsineReport arcsine_estimate(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> x_grid,
                               double tol = 0.05);

}  // namespace sbm::montecarlo
