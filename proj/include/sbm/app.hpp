#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/bernstein.hpp"
#include "sbm/rational.hpp"
#include "sbm/report.hpp"
#include "sbm/spectral.hpp"

namespace sbm::app {

struct SpecConfig {
  std::string catalog = "relativistic";  // a catalog name or "custom"
  Rational alpha{1, 2};
  double c = 1.0;
  std::vector<double> p;            // custom only
  std::string density;              // custom only: catalog name or truncated-stable
  bool irrational = false;
  int order = 12;
};

struct RunConfig {
  SpecConfig spec;
  int n = 2;
  int K = 4;
  spectral::Normalization kappa = spectral::Normalization::direct;
  std::vector<std::string> formats{"json", "csv", "txt"};
  std::string out;  // empty: results to standard output
  unsigned threads = 0;
  std::uint64_t seed = 20240601;

  // expand
  int watson_terms = 2;
  std::vector<double> lambda_grid;  // default 1e2..1e6, 9 points
  // zeta
  std::vector<double> zeta_points{0, -1, -2};
  double zeta_radius = 4.0;
  // verify
  std::vector<double> t_grid;     // default 0.01..0.1, 8 points
  std::vector<double> fit_grid;   // default 1e-3..1e-1, 20 points
  double verify_tol = 1e-6;
  double arbitration_tol = 0.01;
  // simulate
  std::vector<std::string> suites{"laplace", "bg", "arcsine"};
  std::size_t laplace_paths = 100000;
  double laplace_epsilon = 1e-4;
  std::vector<double> lambdas{1, 5, 10};
  std::vector<double> laplace_times{0.5, 1.0};
  std::size_t bg_paths = 10000;
  std::vector<double> bg_windows{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> betas{3.0, 0.67};
  double bg_cutoff = 1e-3;
  int bg_dimension = 1;
  std::size_t bootstrap = 200;
  std::size_t arcsine_paths = 100000;
  std::vector<double> arcsine_x{0.1, 0.03, 0.01};
  double arcsine_cutoff = 1e-4;
  double arcsine_tol = 0.05;
};

// INI text with sections [spec] [run] [expand] [zeta] [verify] [simulate];
// unknown sections or keys are a ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
// key is "section.key"
void set_option(RunConfig& cfg, std::string_view key, std::string_view value);

bernstein::LevySpec build_spec(const SpecConfig& sc);

const std::vector<std::string>& commands();
report::Document run(std::string_view command, const RunConfig& cfg);

std::string usage();

}  // namespace sbm::app
