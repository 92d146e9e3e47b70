#include "sbm/app.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sbm/error.hpp"
#include "sbm/montecarlo.hpp"
#include "sbm/oracle.hpp"
#include "sbm/symbolic.hpp"

namespace sbm::app {

namespace {

using report::Cell;
using report::Document;
using Json = nlohmann::ordered_json;

constexpr double kZetaTol = 1e-12;
constexpr double kTraceTol = 1e-13;
constexpr double kMbarTol = 1e-13;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s = trim(v);
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError(std::string(key) + ": '" + s + "' is not a finite number");
  return x;
}

long long parse_int(std::string_view key, std::string_view v) {
  std::string s = trim(v);
  long long x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(std::string(key) + ": '" + s + "' is not an integer");
  return x;
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  long long x = parse_int(key, v);
  if (x < 0) throw ConfigError(std::string(key) + " must be >= 0");
  return static_cast<std::size_t>(x);
}

bool parse_bool(std::string_view key, std::string_view v) {
  std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(std::string(key) + ": '" + s + "' is not a boolean");
}

std::vector<double> parse_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(std::string(key) + " is an empty list");
  return out;
}

std::vector<double> positive_list(std::string_view key, std::string_view v) {
  auto out = parse_doubles(key, v);
  for (double x : out)
    if (!(x > 0)) throw ConfigError(std::string(key) + " entries must be positive");
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"spec.catalog", [](RunConfig& c, auto, auto v) { c.spec.catalog = trim(v); }},
      {"spec.alpha",
       [](RunConfig& c, auto k, auto v) {
         Rational a;
         try {
           a = Rational::parse(trim(v));
         } catch (const std::exception&) {
           throw ConfigError(std::string(k) + ": '" + trim(v) + "' is not a rational p/q");
         }
         if (!(a > Rational(0) && a < Rational(1))) throw ConfigError(std::string(k) + " must lie in (0, 1)");
         c.spec.alpha = a;
       }},
      {"spec.c", [](RunConfig& c, auto k, auto v) { c.spec.c = parse_double(k, v); }},
      {"spec.p", [](RunConfig& c, auto k, auto v) { c.spec.p = parse_doubles(k, v); }},
      {"spec.density", [](RunConfig& c, auto, auto v) { c.spec.density = trim(v); }},
      {"spec.irrational", [](RunConfig& c, auto k, auto v) { c.spec.irrational = parse_bool(k, v); }},
      {"spec.order", [](RunConfig& c, auto k, auto v) { c.spec.order = static_cast<int>(parse_count(k, v)); }},
      {"run.n",
       [](RunConfig& c, auto k, auto v) {
         c.n = static_cast<int>(parse_int(k, v));
         if (c.n < 1) throw ConfigError("run.n must be >= 1");
       }},
      {"run.K", [](RunConfig& c, auto k, auto v) { c.K = static_cast<int>(parse_count(k, v)); }},
      {"run.kappa",
       [](RunConfig& c, auto k, auto v) {
         auto norm = spectral::parse_normalization(trim(v));
         if (!norm) throw ConfigError(std::string(k) + " must be direct or paper");
         c.kappa = *norm;
       }},
      {"run.formats",
       [](RunConfig& c, auto k, auto v) {
         auto f = split_list(v);
         if (f.empty()) throw ConfigError(std::string(k) + " is empty");
         for (const auto& x : f)
           if (x != "json" && x != "csv" && x != "txt") throw ConfigError("unknown format '" + x + "'");
         c.formats = f;
       }},
      {"run.out", [](RunConfig& c, auto, auto v) { c.out = trim(v); }},
      {"run.threads", [](RunConfig& c, auto k, auto v) { c.threads = static_cast<unsigned>(parse_count(k, v)); }},
      {"run.seed",
       [](RunConfig& c, auto k, auto v) {
         std::string s = trim(v);
         std::uint64_t x = 0;
         auto res = std::from_chars(s.data(), s.data() + s.size(), x);
         if (res.ec != std::errc() || res.ptr != s.data() + s.size())
           throw ConfigError(std::string(k) + ": '" + s + "' is not a 64-bit unsigned integer");
         c.seed = x;
       }},
      {"expand.terms", [](RunConfig& c, auto k, auto v) { c.watson_terms = static_cast<int>(parse_count(k, v)); }},
      {"expand.lambda_grid", [](RunConfig& c, auto k, auto v) { c.lambda_grid = positive_list(k, v); }},
      {"zeta.points", [](RunConfig& c, auto k, auto v) { c.zeta_points = parse_doubles(k, v); }},
      {"zeta.R",
       [](RunConfig& c, auto k, auto v) {
         c.zeta_radius = parse_double(k, v);
         if (!(c.zeta_radius > 0)) throw ConfigError("zeta.R must be positive");
       }},
      {"verify.t_grid", [](RunConfig& c, auto k, auto v) { c.t_grid = positive_list(k, v); }},
      {"verify.fit_grid", [](RunConfig& c, auto k, auto v) { c.fit_grid = positive_list(k, v); }},
      {"verify.tol", [](RunConfig& c, auto k, auto v) { c.verify_tol = parse_double(k, v); }},
      {"verify.arbitration_tol", [](RunConfig& c, auto k, auto v) { c.arbitration_tol = parse_double(k, v); }},
      {"simulate.suites",
       [](RunConfig& c, auto k, auto v) {
         auto s = split_list(v);
         for (const auto& x : s)
           if (x != "laplace" && x != "bg" && x != "arcsine") throw ConfigError("unknown suite '" + x + "'");
         if (s.empty()) throw ConfigError(std::string(k) + " is empty");
         c.suites = s;
       }},
      {"simulate.laplace_paths", [](RunConfig& c, auto k, auto v) { c.laplace_paths = parse_count(k, v); }},
      {"simulate.epsilon",
       [](RunConfig& c, auto k, auto v) { c.laplace_epsilon = positive_list(k, v).front(); }},
      {"simulate.lambdas", [](RunConfig& c, auto k, auto v) { c.lambdas = parse_doubles(k, v); }},
      {"simulate.laplace_times", [](RunConfig& c, auto k, auto v) { c.laplace_times = positive_list(k, v); }},
      {"simulate.bg_paths", [](RunConfig& c, auto k, auto v) { c.bg_paths = parse_count(k, v); }},
      {"simulate.bg_windows", [](RunConfig& c, auto k, auto v) { c.bg_windows = positive_list(k, v); }},
      {"simulate.betas", [](RunConfig& c, auto k, auto v) { c.betas = positive_list(k, v); }},
      {"simulate.bg_cutoff", [](RunConfig& c, auto k, auto v) { c.bg_cutoff = positive_list(k, v).front(); }},
      {"simulate.dimension",
       [](RunConfig& c, auto k, auto v) { c.bg_dimension = static_cast<int>(parse_count(k, v)); }},
      {"simulate.bootstrap", [](RunConfig& c, auto k, auto v) { c.bootstrap = parse_count(k, v); }},
      {"simulate.arcsine_paths", [](RunConfig& c, auto k, auto v) { c.arcsine_paths = parse_count(k, v); }},
      {"simulate.arcsine_x", [](RunConfig& c, auto k, auto v) { c.arcsine_x = positive_list(k, v); }},
      {"simulate.arcsine_cutoff",
       [](RunConfig& c, auto k, auto v) { c.arcsine_cutoff = positive_list(k, v).front(); }},
      {"simulate.arcsine_tol", [](RunConfig& c, auto k, auto v) { c.arcsine_tol = parse_double(k, v); }},
  };
  return table;
}

std::vector<double> or_default(const std::vector<double>& v, double lo, double hi, int count) {
  return v.empty() ? oracle::log_grid(lo, hi, count) : v;
}

std::string spec_label(const RunConfig& cfg) {
  if (cfg.spec.catalog == "custom") return "custom(" + cfg.spec.density + ", alpha=" + cfg.spec.alpha.to_string() + ")";
  return cfg.spec.catalog + "(alpha=" + cfg.spec.alpha.to_string() + ", c=" + report::format_number(cfg.spec.c) + ")";
}

Document start(std::string_view command, const RunConfig& cfg) {
  Document d;
  d.command = std::string(command);
  d.header = {{"spec", spec_label(cfg)},
              {"n", std::to_string(cfg.n)},
              {"K", std::to_string(cfg.K)},
              {"kappa", std::string(spectral::normalization_name(cfg.kappa)) +
                            (cfg.kappa == spectral::Normalization::direct ? " (kappa = 1)" : " (kappa = 1/n)")},
              {"log", "natural logarithm; t dimensionless"}};
  return d;
}

template <class T>
std::string poly_string(const std::vector<T>& coeffs, const char* var) {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (symbolic::exact_zero(coeffs[i])) continue;
    std::string c;
    if constexpr (std::is_same_v<T, double>)
      c = report::format_number(coeffs[i]);
    else
      c = coeffs[i].to_string();
    if (!out.empty()) out += " + ";
    out += "(" + c + ")";
    if (i > 0) out += std::string("*") + var + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return out.empty() ? "0" : out;
}

Cell opt_string(const std::optional<std::string>& s) { return s ? Cell(*s) : Cell(std::monostate{}); }

// ---- commands ----

Document cmd_expand(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("expand", cfg);
  auto& dens = d.table("density_coefficients", {"k", "p_k", "provenance"});
  for (int k = 0; k <= spec.order(); ++k)
    dens.add({static_cast<long long>(k), spec.p()[static_cast<std::size_t>(k)], report::kSymbolic});

  const double mbar = spec.mbar();
  auto& w = d.table("watson", {"index", "exponent", "coefficient", "kind", "provenance"});
  auto terms = bernstein::watson_expand(spec, std::min(cfg.watson_terms + 1, spec.order() + 1), mbar);
  long long idx = 0;
  for (const auto& t : terms)
    w.add({idx++, t.exponent.to_string(), t.coeff, std::string(t.is_shift ? "shift" : "power"),
           t.is_shift ? report::provenance_quadrature(kMbarTol) : std::string(report::kSymbolic)});

  const int J = std::min(spec.order(), std::max(2, (cfg.K + 1) / 2));
  auto series = symbolic::shifted_symbol(spec, J);
  auto exact = symbolic::exact_coefficients(series);
  auto& s = d.table("symbol", {"k", "degree", "degree_value", "coefficient", "exact", "provenance"});
  for (int k = 0; k <= 2 * J; ++k) {
    symbolic::AlphaAffine deg{Rational(2), Rational(-k)};
    std::optional<std::string> ex;
    if (exact) ex = k % 2 ? std::string("0") : (*exact)[static_cast<std::size_t>(k / 2)].to_string();
    s.add({static_cast<long long>(k), deg.to_string(), deg.at(spec.alpha()).to_double(), series.slot(k), opt_string(ex),
           report::kSymbolic});
  }

  auto grid = or_default(cfg.lambda_grid, 1e2, 1e6, 9);
  auto chk = bernstein::check_expansion(spec, cfg.watson_terms, grid);
  auto& r = d.table("remainder", {"N", "lambda", "remainder", "provenance"});
  for (std::size_t i = 0; i < chk.lambdas.size(); ++i)
    r.add({static_cast<long long>(chk.N), chk.lambdas[i], chk.remainders[i], report::provenance_quadrature(1e-10)});

  auto val = bernstein::validate(spec);
  d.summary["mbar"] = mbar;
  d.summary["alpha0"] = series.alpha0();
  d.summary["remainder_slope"] = chk.slope;
  d.summary["expected_slope"] = chk.expected_slope;
  d.summary["remainder_pass"] = chk.pass;
  d.summary["validation_failures"] = val.failures;
  d.passed = chk.pass;
  return d;
}

struct Levels {
  std::optional<std::vector<Rational>> exact_higher;
  symbolic::Parametrix numeric;
  std::vector<symbolic::PoleLevel<symbolic::CoeffPoly>> poly;
  std::optional<std::vector<symbolic::PoleLevel<Rational>>> rational;
};

Levels build_levels(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  const int J = (cfg.K + 1) / 2;
  if (J > spec.order()) throw ConfigError("run.K needs spec.order >= " + std::to_string(J));
  auto series = symbolic::shifted_symbol(spec, std::max(J, 0));
  Levels L{std::nullopt, symbolic::parametrix(series, cfg.K), {}, std::nullopt};
  auto vars = symbolic::symbolic_coefficients(J);
  L.poly = symbolic::parametrix_levels<symbolic::CoeffPoly>(vars, cfg.K);
  if (auto ex = symbolic::exact_coefficients(series)) {
    std::vector<Rational> higher(ex->begin() + 1, ex->end());
    L.rational = symbolic::parametrix_levels<Rational>(higher, cfg.K);
  }
  return L;
}

template <class T>
std::string coeff_text(const T& c) {
  if constexpr (std::is_same_v<T, double>)
    return report::format_number(c);
  else
    return c.to_string();
}

Document cmd_parametrix(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("parametrix", cfg);
  auto L = build_levels(cfg, spec);
  auto& t = d.table("parametrix", {"k", "m", "radial", "radial_value", "coefficient", "exact", "value", "provenance"});
  for (std::size_t k = 0; k < L.poly.size(); ++k) {
    const auto& pl = L.poly[k];
    for (std::size_t i = 0; i < pl.terms.size(); ++i) {
      const auto& term = pl.terms[i];
      std::optional<std::string> ex;
      if (L.rational)
        for (const auto& rt : (*L.rational)[k].terms)
          if (rt.m == term.m && rt.radial == term.radial) ex = rt.c.to_string();
      Cell value = std::monostate{};
      for (const auto& nt : L.numeric.levels[k].terms)
        if (nt.m == term.m && nt.radial == term.radial) value = nt.c;
      t.add({static_cast<long long>(pl.k), static_cast<long long>(term.m), term.radial.to_string(),
             term.radial.at(spec.alpha()).to_double(), term.c.to_string(), opt_string(ex), value, report::kSymbolic});
    }
  }
  d.summary["form"] = "c * r^radial * (lambda - alpha0 r^(2a))^(-m), a = alpha, a_j = alpha_j";
  d.summary["alpha0"] = L.numeric.alpha0;
  return d;
}

Document cmd_heat_symbol(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("heat-symbol", cfg);
  auto L = build_levels(cfg, spec);
  auto poly = symbolic::heat_levels(L.poly);
  auto num = symbolic::heat_levels(L.numeric.levels);
  std::optional<std::vector<symbolic::HeatLevel<Rational>>> rat;
  if (L.rational) rat = symbolic::heat_levels(*L.rational);
  auto& t = d.table("heat_symbol", {"k", "t_power", "radial", "radial_value", "coefficient", "exact", "value",
                                    "provenance"});
  for (std::size_t k = 0; k < poly.size(); ++k) {
    for (const auto& term : poly[k].terms) {
      for (std::size_t i = 0; i < term.t_poly.size(); ++i) {
        if (term.t_poly[i].is_zero()) continue;
        std::optional<std::string> ex;
        if (rat)
          for (const auto& rt : (*rat)[k].terms)
            if (rt.radial == term.radial && i < rt.t_poly.size()) ex = rt.t_poly[i].to_string();
        Cell value = std::monostate{};
        for (const auto& nt : num[k].terms)
          if (nt.radial == term.radial && i < nt.t_poly.size()) value = nt.t_poly[i];
        t.add({static_cast<long long>(poly[k].k), static_cast<long long>(i), term.radial.to_string(),
               term.radial.at(spec.alpha()).to_double(), term.t_poly[i].to_string(), opt_string(ex), value,
               report::kSymbolic});
      }
    }
  }
  d.summary["form"] = "coefficient * t^t_power * r^radial * exp(-t alpha0 r^(2a))";
  d.summary["alpha0"] = L.numeric.alpha0;
  return d;
}

Document cmd_power_symbol(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("power-symbol", cfg);
  auto L = build_levels(cfg, spec);
  auto poly = symbolic::power_levels(L.poly);
  auto num = symbolic::power_levels(L.numeric.levels);
  std::optional<std::vector<symbolic::PowerLevel<Rational>>> rat;
  if (L.rational) rat = symbolic::power_levels(*L.rational);
  auto& t = d.table("power_symbol", {"k", "j", "z_polynomial", "exact", "value", "provenance"});
  for (std::size_t k = 0; k < poly.size(); ++k) {
    for (const auto& term : poly[k].terms) {
      std::optional<std::string> ex;
      if (rat)
        for (const auto& rt : (*rat)[k].terms)
          if (rt.j == term.j) ex = poly_string(rt.z_poly, "z");
      std::optional<std::string> val;
      for (const auto& nt : num[k].terms)
        if (nt.j == term.j) val = poly_string(nt.z_poly, "z");
      t.add({static_cast<long long>(poly[k].k), static_cast<long long>(term.j), poly_string(term.z_poly, "z"),
             opt_string(ex), opt_string(val), report::kSymbolic});
    }
  }
  d.summary["form"] = "level k carries r^(-2 a z - k); each row is z_polynomial * alpha0^(-z-j)";
  d.summary["alpha0"] = L.numeric.alpha0;
  return d;
}

spectral::ContinuationOptions continuation(const RunConfig& cfg) {
  spectral::ContinuationOptions o;
  o.R = cfg.zeta_radius;
  return o;
}

void add_pole_rows(report::Table& t, const spectral::ZetaPoleTable& table, bool active) {
  for (const auto& e : table.entries)
    if (!e.analytic) t.add({std::string(spectral::normalization_name(table.normalization)), active, static_cast<long long>(e.k),
           e.z.to_string(), e.z.to_double(), e.residue, report::kSymbolic});
}

Document cmd_zeta(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("zeta", cfg);
  auto cps = spectral::power_series_for(spec, cfg.K);
  auto table = spectral::zeta_poles(cps, cfg.n, cfg.kappa);
  auto& poles = d.table("poles", {"kappa", "active", "k", "z", "z_value", "residue", "provenance"});
  add_pole_rows(poles, table, true);
  auto& cont = d.table("continued", {"kappa", "z", "real", "imag", "provenance"});
  for (double z : cfg.zeta_points) {
    auto v = spectral::zeta_continue(spec, cfg.n, z, cfg.kappa, continuation(cfg));
    cont.add({std::string(spectral::normalization_name(cfg.kappa)), z, v.real(), v.imag(),
              report::provenance_quadrature(kZetaTol)});
  }
  Json poles_json = Json::array();
  for (const auto& e : table.entries)
    if (!e.analytic) poles_json.push_back({{"z", e.z.to_string()}, {"residue", e.residue}});
  d.summary["poles"] = poles_json;
  return d;
}

std::string source_provenance(spectral::CoeffSource s) {
  switch (s) {
    case spectral::CoeffSource::residue:
      return report::kSymbolic;
    case spectral::CoeffSource::zeta_value:
      return report::provenance_quadrature(kZetaTol);
    case spectral::CoeffSource::unresolved:
      return "unresolved";
  }
  return "";
}

struct Assembled {
  spectral::ZetaPoleTable table;
  std::map<int, double> zeta;
  spectral::HeatTraceExpansion expansion;
};

Assembled assemble(const RunConfig& cfg, const bernstein::LevySpec& spec, spectral::Normalization norm) {
  Assembled a;
  auto cps = spectral::power_series_for(spec, cfg.K);
  a.table = spectral::zeta_poles(cps, cfg.n, norm);
  for (int l : spectral::required_zeta_points(a.table))
    a.zeta[l] = spectral::zeta_continue(spec, cfg.n, std::complex<double>(-l, 0.0), norm, continuation(cfg)).real();
  a.expansion = spectral::apply_shift(spectral::heat_trace_expansion(a.table, a.zeta), spec.mbar());
  return a;
}

Document cmd_heat_trace(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("heat-trace", cfg);
  auto& t = d.table("expansion", {"kappa", "active", "family", "k", "l", "exponent", "coefficient", "source",
                                  "provenance"});
  auto& zt = d.table("zeta_values", {"kappa", "active", "l", "zeta(-l)", "provenance"});
  for (auto norm : {spectral::Normalization::direct, spectral::Normalization::paper}) {
    auto a = assemble(cfg, spec, norm);
    const bool active = norm == cfg.kappa;
    const std::string kn(spectral::normalization_name(norm));
    for (const auto& p : a.expansion.power_terms) {
      Cell v = p.value ? Cell(*p.value) : Cell(std::monostate{});
      t.add({kn, active, std::string("power"), static_cast<long long>(p.k), std::monostate{}, p.exponent.to_string(), v,
             std::string(spectral::source_name(p.source)), source_provenance(p.source)});
    }
    for (const auto& g : a.expansion.gamma_terms)
      t.add({kn, active, std::string("gamma"), std::monostate{}, static_cast<long long>(g.l), std::to_string(g.l),
             g.value, std::string("zeta_value"), report::provenance_quadrature(kZetaTol)});
    for (const auto& l : a.expansion.log_terms)
      t.add({kn, active, std::string("log"), static_cast<long long>(l.k), static_cast<long long>(l.l),
             std::to_string(l.l), l.value, std::string("residue"), report::kSymbolic});
    for (const auto& [l, v] : a.zeta) zt.add({kn, active, static_cast<long long>(l), v, report::provenance_quadrature(kZetaTol)});
    if (active) {
      d.summary["prefactor_rate"] = a.expansion.prefactor_rate;
      d.summary["collisions"] = a.expansion.collisions;
      d.summary["unresolved_finite_parts"] = a.expansion.unresolved_finite_parts;
    }
  }
  d.summary["convention"] =
      "TR(exp(-tA)) ~ exp(-prefactor_rate t) * [sum power c t^exponent + sum gamma c t^l - sum log c t^l log t]";
  if (spec.catalog_id()) {
    double b = spectral::banuelos_crosscheck(cfg.n, spec.alpha_value(), symbolic::shifted_symbol(spec, 0).alpha0());
    d.summary["c0_crosscheck_kappa1"] = b;
  }
  return d;
}

bool is_relativistic(const bernstein::LevySpec& spec) {
  return spec.catalog_id() && spec.catalog_id()->example == bernstein::Example::relativistic;
}

Document cmd_verify(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("verify", cfg);
  auto grid = or_default(cfg.t_grid, 0.01, 0.1, 8);
  oracle::VerifyOptions vo;
  vo.tol = cfg.verify_tol;
  auto rep = oracle::verify_expansion(spec, cfg.n, cfg.K, cfg.kappa, grid, vo);
  const bool closed = is_relativistic(spec) && spec.catalog_id()->params.c == 1.0 && (cfg.n == 2 || cfg.n == 3);
  auto& t = d.table("trace", {"t", "numeric", "est_error", "expansion", "rel_deviation", "closed_form", "provenance"});
  for (const auto& r : rep.rows) {
    Cell cf = std::monostate{};
    if (closed) cf = cfg.n == 2 ? oracle::closed_form_n2_relativistic(r.t) : oracle::closed_form_n3_relativistic(r.t);
    t.add({r.t, r.numeric, r.est_error, r.expansion, r.rel_deviation, cf, report::provenance_quadrature(kTraceTol)});
  }
  auto& z = d.table("zeta_values", {"l", "zeta(-l)", "provenance"});
  for (const auto& [l, v] : rep.zeta_values)
    z.add({static_cast<long long>(l), v, report::provenance_quadrature(kZetaTol)});

  auto fit_grid = or_default(cfg.fit_grid, 1e-3, 1e-1, 20);
  const double a2 = 2 * spec.alpha_value();
  const double exps[] = {-cfg.n / a2, -(cfg.n - 2) / a2};
  auto arb = oracle::arbitrate_normalization(spec, cfg.n, fit_grid, exps, cfg.arbitration_tol);
  auto& a = d.table("normalization", {"quantity", "value", "provenance"});
  a.add({std::string("fitted_c0"), arb.fitted_c0, report::provenance_quadrature(kTraceTol)});
  a.add({std::string("c0_direct"), arb.direct_c0, report::kSymbolic});
  a.add({std::string("c0_paper"), arb.paper_c0, report::kSymbolic});
  a.add({std::string("fitted_over_paper"), arb.ratio_to_paper, report::provenance_quadrature(kTraceTol)});
  a.add({std::string("fit_condition"), arb.fit_condition, report::provenance_quadrature(kTraceTol)});

  d.summary["max_rel_deviation"] = rep.max_rel_deviation;
  d.summary["empirical_order"] = rep.empirical_order;
  d.summary["expected_order"] = rep.expected_order;
  d.summary["leading_ratio"] = rep.leading_ratio;
  d.summary["kappa_mismatch"] = rep.kappa_mismatch;
  if (!rep.note.empty()) d.summary["note"] = rep.note;
  if (!rep.fitted_log_coefficients.empty()) {
    Json logs = Json::array();
    for (std::size_t i = 0; i < rep.fitted_log_coefficients.size(); ++i) {
      double sym = 0;
      for (const auto& l : rep.expansion.log_terms)
        if (l.l == rep.fitted_log_powers[i]) sym = l.value;
      logs.push_back({{"l", rep.fitted_log_powers[i]}, {"fitted", rep.fitted_log_coefficients[i]}, {"symbolic", sym}});
    }
    d.summary["log_coefficients"] = logs;
    d.summary["fitted_finite_parts"] = rep.fitted_finite_parts;
  }
  d.summary["normalization_direct_agrees"] = arb.direct_agrees;
  d.summary["normalization_paper_discrepancy"] = arb.paper_discrepancy;
  if (arb.paper_discrepancy)
    d.summary["normalization_note"] = "numeric leading coefficient is " + report::format_number(arb.ratio_to_paper) +
                                      " x the kappa = 1/n value; the kappa = 1 value agrees to " +
                                      report::format_number(arb.rel_error_direct);
  d.summary["pass"] = rep.pass;
  d.passed = rep.pass && arb.direct_agrees;
  return d;
}

Document cmd_simulate(const RunConfig& cfg, const bernstein::LevySpec& spec) {
  Document d = start("simulate", cfg);
  d.header.push_back({"seed", std::to_string(cfg.seed)});
  d.header.push_back({"brownian", "per-coordinate variance 2t (E exp(i xi.B_t) = exp(-t |xi|^2))"});
  auto model = montecarlo::model_from(spec);
  auto has = [&](const char* s) { return std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end(); };

  if (has("laplace")) {
    montecarlo::SimConfig sc;
    sc.paths = cfg.laplace_paths;
    sc.epsilon = cfg.laplace_epsilon;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.time_grid = cfg.laplace_times;
    std::sort(sc.time_grid.begin(), sc.time_grid.end());
    auto rep = montecarlo::laplace_check(model, sc, cfg.lambdas);
    const auto prov = report::provenance_monte_carlo(sc.paths, sc.seed);
    auto& t = d.table("laplace", {"lambda", "t", "mean", "stderr", "target", "z", "pass", "provenance"});
    for (const auto& c : rep.cells) t.add({c.lambda, c.t, c.mean, c.std_error, c.target, c.z, c.pass, prov});
    d.summary["laplace"] = {{"epsilon", rep.epsilon},
                            {"compensator_mean", rep.compensator_mean},
                            {"compensator_stderr", rep.compensator_stderr},
                            {"compensator_target", rep.compensator_target},
                            {"nonmonotone_paths", rep.nonmonotone},
                            {"pass", rep.pass}};
    d.passed = d.passed && rep.pass;
  }
  if (has("bg")) {
    montecarlo::SimConfig sc;
    sc.paths = cfg.bg_paths;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.time_grid = cfg.bg_windows;
    sc.relative_cutoff = cfg.bg_cutoff;
    sc.dimension = cfg.bg_dimension;
    sc.bootstrap = cfg.bootstrap;
    auto rep = montecarlo::bg_index_check(model, sc, cfg.betas);
    const auto prov = report::provenance_monte_carlo(sc.paths, sc.seed);
    auto& t = d.table("bg", {"beta", "t", "epsilon", "median", "ci_lo", "ci_hi", "provenance"});
    auto& tr = d.table("bg_trend", {"beta", "expected", "monotone", "resolved", "pass"});
    for (const auto& trend : rep.trends) {
      for (const auto& c : trend.cells) t.add({trend.beta, c.t, c.epsilon, c.median, c.ci_lo, c.ci_hi, prov});
      std::string dir = trend.expected < 0 ? "decreasing" : (trend.expected > 0 ? "increasing" : "not asserted");
      tr.add({trend.beta, dir, trend.monotone, trend.resolved, trend.pass});
    }
    auto& br = d.table("bg_bridge", {"t", "z", "provenance"});
    for (std::size_t j = 0; j < rep.bridge_z.size(); ++j) br.add({cfg.bg_windows[j], rep.bridge_z[j], prov});
    d.summary["bg"] = {{"bridge_pass", rep.bridge_pass}, {"pass", rep.pass}};
    d.passed = d.passed && rep.pass;
  }
  if (has("arcsine")) {
    montecarlo::SimConfig sc;
    sc.paths = cfg.arcsine_paths;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.relative_cutoff = cfg.arcsine_cutoff;
    auto rep = montecarlo::arcsine_estimate(model, sc, cfg.arcsine_x, cfg.arcsine_tol);
    const auto prov = report::provenance_monte_carlo(sc.paths, sc.seed);
    auto& t = d.table("arcsine", {"x", "epsilon", "ratio", "stderr", "creep_fraction", "provenance"});
    for (const auto& c : rep.cells) t.add({c.x, c.epsilon, c.ratio, c.std_error, c.creep_fraction, prov});
    auto& e = d.table("arcsine_limit", {"extrapolated", "stderr", "slope", "target", "pass", "provenance"});
    e.add({rep.extrapolated, rep.extrapolated_stderr, rep.slope, rep.target, rep.pass, prov});
    d.summary["arcsine"] = {{"model", "ratio(x) = a + b x^alpha"}, {"pass", rep.pass}};
    d.passed = d.passed && rep.pass;
  }
  return d;
}

}  // namespace

void set_option(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& t = setters();
  auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

RunConfig parse_config(std::string_view text) {
  if (trim(text).empty()) throw ConfigError("empty configuration");
  boost::property_tree::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig cfg;
  bool any = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      set_option(cfg, section + "." + key, node.data());
      any = true;
    }
  }
  if (!any) throw ConfigError("empty configuration");
  if (cfg.spec.catalog == "custom" && cfg.spec.p.empty()) throw ConfigError("custom spec needs spec.p");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

bernstein::LevySpec build_spec(const SpecConfig& sc) {
  try {
    if (sc.catalog == "custom") {
      if (sc.density.empty()) throw ConfigError("custom spec needs spec.density");
      return bernstein::custom(sc.alpha, sc.p, sc.density, sc.c, sc.irrational);
    }
    if (!sc.p.empty() || !sc.density.empty()) throw ConfigError("spec.p and spec.density are for custom specs only");
    return bernstein::catalog(sc.catalog, {sc.alpha, sc.c}, sc.order).with_irrational(sc.irrational);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"expand", "parametrix", "heat-symbol", "power-symbol", "zeta",
                                          "heat-trace", "verify", "simulate", "report"};
  return c;
}

report::Document run(std::string_view command, const RunConfig& cfg) {
  using Fn = Document (*)(const RunConfig&, const bernstein::LevySpec&);
  static const std::map<std::string, Fn, std::less<>> table = {
      {"expand", cmd_expand},         {"parametrix", cmd_parametrix}, {"heat-symbol", cmd_heat_symbol},
      {"power-symbol", cmd_power_symbol}, {"zeta", cmd_zeta},           {"heat-trace", cmd_heat_trace},
      {"verify", cmd_verify},         {"simulate", cmd_simulate}};
  if (command != "report" && !table.count(command))
    throw ConfigError("unknown command '" + std::string(command) + "'");

  auto spec = build_spec(cfg.spec);
  auto val = bernstein::validate(spec);
  if (!val.ok()) {
    std::string msg = "spec fails the hypotheses:";
    for (const auto& f : val.failures) msg += " " + f + ";";
    throw ValidationError(msg);
  }
  if (command != "report") return table.find(command)->second(cfg, spec);

  Document d = start("report", cfg);
  for (const auto& c : commands()) {
    if (c == "report") continue;
    d.append(table.find(c)->second(cfg, spec));
  }
  return d;
}

std::string usage() {
  std::ostringstream os;
  os << "usage: sbm <command> --config PATH [--out DIR] [--format json,csv,txt] [--kappa direct|paper]\n"
        "           [--seed N] [--threads N]\n\ncommands:";
  for (const auto& c : commands()) os << " " << c;
  os << "\n\nconfig sections: [spec] [run] [expand] [zeta] [verify] [simulate]\n"
        "exit codes: 0 ok, 1 config error, 2 validation failure, 3 numeric non-convergence\n";
  return os.str();
}

}  // namespace sbm::app
