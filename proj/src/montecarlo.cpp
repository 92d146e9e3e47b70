#include "sbm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "sbm/error.hpp"
#include "sbm/philox.hpp"
#include "sbm/quadrature.hpp"
#include "sbm/special.hpp"

namespace sbm::montecarlo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// int_1^r y^p dy with L = log r
double power_integral(double p, double L) {
  double c = p + 1;
  return std::fabs(c * L) < 1e-12 ? L : std::expm1(c * L) / c;
}

double exponential_wait(Stream& s, double rate) { return rate > 0 ? -std::log(s.uniform()) / rate : kInf; }

unsigned worker_count(const SimConfig& cfg) { return cfg.threads; }

void check_config(const SimConfig& cfg) {
  if (cfg.paths < 2) throw ArgumentError("need at least 2 paths");
  if (cfg.dimension < 1) throw ArgumentError("Brownian dimension must be >= 1");
}

}  // namespace

Model model_from(const bernstein::LevySpec& spec) {
  Model m;
  m.density = [spec](double t) { return spec.density(t); };
  m.alpha = spec.alpha_value();
  m.alpha0 = -gamma_fn(-m.alpha) * spec.p()[0];
  m.laplace_exponent = [spec](double lambda) { return bernstein::eval_f(spec, lambda, QuadConfig{1e-13}); };
  return m;
}

JumpTable::JumpTable(const Density& m, double epsilon, double extra_drift) : eps_(epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ArgumentError("jump cutoff epsilon must be positive");
  if (!(extra_drift >= 0)) throw ArgumentError("extra drift must be >= 0");
  auto dens = [&](double t) {
    double v = m(t);
    if (!(v >= 0) || !std::isfinite(v)) throw NumericError("density evaluation failed at t = " + std::to_string(t));
    return v;
  };
  // t m(t) ~ t^(-alpha) is integrable, but m itself overflows for the smallest abscissae
  auto first = tanh_sinh(
      [&](double t) {
        double v = t * m(t);
        if (!std::isfinite(v) && t < 1e-200) return 0.0;
        if (!(v >= 0) || !std::isfinite(v)) throw NumericError("density evaluation failed at t = " + std::to_string(t));
        return v;
      },
      0.0, epsilon, QuadConfig{1e-300, 1e-12});
  if (!std::isfinite(first.value)) throw NumericError("small-jump drift integral failed");
  drift_ = first.value + extra_drift;

  const double scale = epsilon * dens(epsilon);
  double tmax = std::max(1.0, 2 * epsilon);
  while (dens(tmax) * tmax > 1e-17 * scale) {
    tmax *= 2;
    if (tmax > 1e6) throw NumericError("Levy density does not decay fast enough for the jump table");
  }
  if (scale == 0.0) return;  // no jumps above epsilon to speak of

  knots_.resize(kKnots);
  const double L = std::log(tmax / epsilon);
  for (int i = 0; i < kKnots; ++i) knots_[static_cast<std::size_t>(i)] = epsilon * std::exp(L * i / (kKnots - 1));
  knots_.back() = tmax;
  cdf_.assign(kKnots, 0.0);
  gamma_.assign(kKnots - 1, 0.0);
  std::vector<double> mass(kKnots - 1), mean(kKnots - 1);
  std::vector<double> mv(kKnots);
  for (std::size_t i = 0; i < knots_.size(); ++i) mv[i] = dens(knots_[i]);
  const double h = L / (kKnots - 1);
  parallel_for(mass.size(), 1, [&](std::size_t i) {
    double a = knots_[i], b = knots_[i + 1];
    auto q = tanh_sinh(dens, a, b, QuadConfig{1e-300, 1e-10, 20000});
    mass[i] = std::isfinite(q.value) ? std::max(q.value, 0.0) : 0.0;
    if (mv[i] > 0 && mv[i + 1] > 0) {
      gamma_[i] = -std::log(mv[i + 1] / mv[i]) / h;
      mean[i] = a * power_integral(1 - gamma_[i], h) / power_integral(-gamma_[i], h);
    } else {
      gamma_[i] = std::numeric_limits<double>::quiet_NaN();  // uniform inside
      mean[i] = 0.5 * (a + b);
    }
  });
  double acc = 0.0, first_moment = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    acc += mass[i];
    cdf_[i + 1] = acc;
    first_moment += mass[i] * mean[i];
  }
  rate_ = acc;
  mean_jump_ = acc > 0 ? first_moment / acc : 0.0;
}

double JumpTable::sample(double u) const {
  const double target = u * rate_;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf_.begin() - 1, 0,
                                                                      static_cast<std::ptrdiff_t>(gamma_.size()) - 1));
  // skip empty intervals at the boundary
  while (i + 1 < gamma_.size() && cdf_[i + 1] <= cdf_[i]) ++i;
  const double a = knots_[i], b = knots_[i + 1];
  const double width = cdf_[i + 1] - cdf_[i];
  const double q = width > 0 ? std::clamp((target - cdf_[i]) / width, 0.0, 1.0) : 0.5;
  const double g = gamma_[i];
  double x;
  if (std::isnan(g)) {
    x = a + q * (b - a);
  } else {
    const double h = std::log(b / a);
    const double c = 1 - g;
    const double I = power_integral(-g, h);
    x = std::fabs(c * h) < 1e-12 ? a * std::exp(q * h) : a * std::exp(std::log1p(c * q * I) / c);
  }
  return std::clamp(x, a, b);
}

Estimate estimate(std::span<const double> xs) {
  Estimate e;
  const std::size_t n = xs.size();
  if (n == 0) return e;
  e.mean = pairwise_sum(xs.data(), n) / static_cast<double>(n);
  if (n < 2) return e;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
  double var = pairwise_sum(dev.data(), n) / static_cast<double>(n - 1);
  e.std_error = std::sqrt(var / static_cast<double>(n));
  return e;
}

SubordinatorPaths simulate_subordinator(const Model& model, const SimConfig& cfg) {
  check_config(cfg);
  if (cfg.time_grid.empty()) throw ArgumentError("time grid is empty");
  for (std::size_t j = 0; j < cfg.time_grid.size(); ++j)
    if (!(cfg.time_grid[j] > 0) || (j > 0 && !(cfg.time_grid[j] > cfg.time_grid[j - 1])))
      throw ArgumentError("subordinator time grid must be positive and increasing");
  JumpTable table(model.density, cfg.epsilon, model.extra_drift);

  SubordinatorPaths out;
  out.times = cfg.time_grid;
  out.paths = cfg.paths;
  out.epsilon = cfg.epsilon;
  out.rate = table.rate();
  out.drift = table.drift();
  out.mean_rate = table.mean_rate();
  const std::size_t nt = out.times.size();
  out.values.assign(cfg.paths * nt, 0.0);
  std::vector<unsigned char> bad(cfg.paths, 0);
  parallel_for(cfg.paths, worker_count(cfg), [&](std::size_t p) {
    Stream s(cfg.seed, p, 0);
    double x = 0.0, time = 0.0, last = 0.0;
    std::size_t j = 0;
    double* row = &out.values[p * nt];
    while (j < nt) {
      double arrival = time + exponential_wait(s, table.rate());
      while (j < nt && out.times[j] < arrival) {
        row[j] = x + table.drift() * (out.times[j] - time);
        if (row[j] < last) bad[p] = 1;
        last = row[j];
        ++j;
      }
      if (j == nt) break;
      x += table.drift() * (arrival - time) + table.sample(s.uniform());
      time = arrival;
    }
  });
  for (auto b : bad) out.nonmonotone += b;
  return out;
}

SubordinatorPaths simulate_subordinator(const bernstein::LevySpec& spec, const SimConfig& cfg) {
  return simulate_subordinator(model_from(spec), cfg);
}

LaplaceReport laplace_check(const Model& model, const SimConfig& cfg, std::span<const double> lambdas) {
  if (!model.laplace_exponent) throw ArgumentError("laplace_check needs the model's Laplace exponent");
  auto sim = simulate_subordinator(model, cfg);
  LaplaceReport rep;
  rep.epsilon = cfg.epsilon;
  rep.nonmonotone = sim.nonmonotone;
  std::vector<double> vals(sim.paths);
  for (double lambda : lambdas) {
    if (!(lambda >= 0)) throw ArgumentError("lambda must be >= 0");
    const double f = lambda == 0 ? 0.0 : model.laplace_exponent(lambda);
    for (std::size_t j = 0; j < sim.times.size(); ++j) {
      for (std::size_t p = 0; p < sim.paths; ++p) vals[p] = std::exp(-lambda * sim.at(p, j));
      auto e = estimate(vals);
      double t = sim.times[j];
      double target = std::exp(-t * f);
      double z = e.std_error > 0 ? (e.mean - target) / e.std_error : (e.mean == target ? 0.0 : kInf);
      rep.cells.push_back({lambda, t, e.mean, e.std_error, target, z, std::fabs(z) <= 4.0});
    }
  }
  const std::size_t last = sim.times.size() - 1;
  for (std::size_t p = 0; p < sim.paths; ++p) vals[p] = sim.at(p, last) / sim.times[last];
  auto c = estimate(vals);
  rep.compensator_mean = c.mean;
  rep.compensator_stderr = c.std_error;
  rep.compensator_target = sim.mean_rate;
  rep.compensator_pass = std::fabs(c.mean - sim.mean_rate) <= 4 * c.std_error;
  rep.pass = rep.compensator_pass && rep.nonmonotone == 0 &&
             std::all_of(rep.cells.begin(), rep.cells.end(), [](const LaplaceCell& x) { return x.pass; });
  return rep;
}

LaplaceReport laplace_check(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> lambdas) {
  return laplace_check(model_from(spec), cfg, lambdas);
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

BgReport bg_index_check(const Model& model, const SimConfig& cfg, std::span<const double> betas) {
  check_config(cfg);
  const auto& windows = cfg.time_grid;
  if (windows.size() < 2) throw ArgumentError("bg check needs at least two time windows");
  for (std::size_t j = 0; j < windows.size(); ++j)
    if (!(windows[j] > 0) || (j > 0 && !(windows[j] < windows[j - 1])))
      throw ArgumentError("bg time windows must be positive and decreasing");
  const double crit = 2 * model.alpha;
  bool above = false, below = false;
  for (double b : betas) {
    if (!(b > 0)) throw ArgumentError("beta must be positive");
    above |= b > crit;
    below |= b < crit;
  }
  if (!above || !below) throw ArgumentError("betas must straddle the Blumenthal-Getoor index 2 alpha");
  if (!(cfg.relative_cutoff > 0)) throw ArgumentError("relative cutoff must be positive");

  const std::size_t N = cfg.paths;
  std::vector<double> medians, lo, hi, eps;
  BgReport rep;
  rep.bridge_pass = true;
  for (std::size_t j = 0; j < windows.size(); ++j) {
    const double tw = windows[j];
    const double e = cfg.relative_cutoff * std::pow(model.alpha0 * tw, 1 / model.alpha);
    JumpTable table(model.density, e, model.extra_drift);
    eps.push_back(e);
    std::vector<double> sup(N), bridge(N);
    parallel_for(N, worker_count(cfg), [&](std::size_t p) {
      Stream s(cfg.seed, p, static_cast<std::uint32_t>(1 + j));
      std::normal_distribution<double> normal;
      std::vector<double> B(static_cast<std::size_t>(cfg.dimension), 0.0);
      double x = 0.0, time = 0.0, best = 0.0;
      auto move = [&](double dx) {
        if (dx <= 0) return;
        double sd = std::sqrt(2 * dx), r2 = 0.0;
        for (auto& b : B) {
          b += sd * normal(s);
          r2 += b * b;
        }
        best = std::max(best, std::sqrt(r2));
      };
      for (;;) {
        double tau = exponential_wait(s, table.rate());
        if (time + tau >= tw) {
          double dx = table.drift() * (tw - time);
          move(dx);
          x += dx;
          break;
        }
        double dx = table.drift() * tau;
        move(dx);
        double jump = table.sample(s.uniform());
        move(jump);
        x += dx + jump;
        time += tau;
      }
      sup[p] = best;
      bridge[p] = B[0] * B[0] - 2 * x;
    });
    auto be = estimate(bridge);
    double z = be.std_error > 0 ? be.mean / be.std_error : 0.0;
    rep.bridge_z.push_back(z);
    rep.bridge_pass = rep.bridge_pass && std::fabs(z) <= 4.0;

    medians.push_back(median_of(sup));
    std::vector<double> boot;
    Stream bs(cfg.seed, 0, static_cast<std::uint32_t>(1000 + j));
    std::vector<double> resample(N);
    for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
      for (auto& r : resample) r = sup[std::min(N - 1, static_cast<std::size_t>(bs.uniform() * static_cast<double>(N)))];
      boot.push_back(median_of(resample));
    }
    std::sort(boot.begin(), boot.end());
    if (boot.empty()) {
      lo.push_back(medians.back());
      hi.push_back(medians.back());
    } else {
      auto at = [&](double q) { return boot[std::min(boot.size() - 1, static_cast<std::size_t>(q * boot.size()))]; };
      lo.push_back(at(0.025));
      hi.push_back(at(0.975));
    }
  }

  rep.pass = rep.bridge_pass;
  for (double beta : betas) {
    BgTrend tr;
    tr.beta = beta;
    tr.expected = beta > crit ? -1 : (beta < crit ? 1 : 0);
    for (std::size_t j = 0; j < windows.size(); ++j) {
      double sc = std::pow(windows[j], -1 / beta);
      tr.cells.push_back({windows[j], eps[j], sc * medians[j], sc * lo[j], sc * hi[j]});
    }
    tr.monotone = tr.expected != 0;
    tr.resolved = tr.expected != 0;
    for (std::size_t j = 1; j < tr.cells.size() && tr.expected != 0; ++j) {
      const auto &a = tr.cells[j - 1], &b = tr.cells[j];
      if (tr.expected < 0) {
        tr.monotone = tr.monotone && b.median < a.median;
        tr.resolved = tr.resolved && b.ci_hi < a.ci_lo;
      } else {
        tr.monotone = tr.monotone && b.median > a.median;
        tr.resolved = tr.resolved && b.ci_lo > a.ci_hi;
      }
    }
    tr.pass = tr.expected == 0 || tr.monotone;
    rep.pass = rep.pass && tr.pass;
    rep.trends.push_back(std::move(tr));
  }
  return rep;
}

BgReport bg_index_check(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> betas) {
  return bg_index_check(model_from(spec), cfg, betas);
}

ArcsineReport arcsine_estimate(const Model& model, const SimConfig& cfg, std::span<const double> x_grid, double tol) {
  check_config(cfg);
  if (x_grid.empty()) throw ArgumentError("arcsine x grid is empty");
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    if (!(x_grid[i] > 0) || (i > 0 && !(x_grid[i] < x_grid[i - 1])))
      throw ArgumentError("arcsine x grid must be positive and decreasing");
  if (!(cfg.relative_cutoff > 0)) throw ArgumentError("relative cutoff must be positive");

  ArcsineReport rep;
  rep.target = model.alpha;
  const std::size_t N = cfg.paths;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    const double e = cfg.relative_cutoff * x;
    JumpTable table(model.density, e, model.extra_drift);
    if (table.rate() == 0 && table.drift() == 0) throw ArgumentError("subordinator never passes x: no jumps and no drift");
    std::vector<double> ratio(N);
    std::vector<unsigned char> crept(N, 0);
    parallel_for(N, worker_count(cfg), [&](std::size_t p) {
      Stream s(cfg.seed, p, static_cast<std::uint32_t>(100 + i));
      double X = 0.0;
      for (;;) {
        double tau = exponential_wait(s, table.rate());
        double reach = X + table.drift() * tau;
        if (reach >= x) {
          ratio[p] = 1.0;
          crept[p] = 1;
          return;
        }
        X = reach;
        double jump = table.sample(s.uniform());
        if (X + jump > x) {
          ratio[p] = X / x;
          return;
        }
        X += jump;
      }
    });
    auto est = estimate(ratio);
    std::size_t creeps = 0;
    for (auto c : crept) creeps += c;
    rep.cells.push_back({x, e, est.mean, est.std_error, static_cast<double>(creeps) / static_cast<double>(N)});
  }

  // weighted fit of ratio ~ a + b x^alpha
  if (rep.cells.size() == 1) {
    rep.extrapolated = rep.cells[0].ratio;
    rep.extrapolated_stderr = rep.cells[0].std_error;
  } else {
    bool weighted = std::all_of(rep.cells.begin(), rep.cells.end(), [](const ArcsineCell& c) { return c.std_error > 0; });
    double s0 = 0, s1 = 0, s2 = 0, r0 = 0, r1 = 0;
    for (const auto& c : rep.cells) {
      double w = weighted ? 1 / (c.std_error * c.std_error) : 1.0;
      double u = std::pow(c.x, model.alpha);
      s0 += w;
      s1 += w * u;
      s2 += w * u * u;
      r0 += w * c.ratio;
      r1 += w * c.ratio * u;
    }
    double det = s0 * s2 - s1 * s1;
    rep.extrapolated = (s2 * r0 - s1 * r1) / det;
    rep.slope = (s0 * r1 - s1 * r0) / det;
    rep.extrapolated_stderr = weighted ? std::sqrt(s2 / det) : 0.0;
  }
  rep.pass = std::fabs(rep.extrapolated - rep.target) <= tol;
  return rep;
}

ArcsineReport arcsine_estimate(const bernstein::LevySpec& spec, const SimConfig& cfg, std::span<const double> x_grid,
                               double tol) {
  return arcsine_estimate(model_from(spec), cfg, x_grid, tol);
}

}  // namespace sbm::montecarlo
