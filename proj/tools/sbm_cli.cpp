// Command-line front end; talks to the library only through sbm.h.
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbm/sbm.h"

namespace {

struct ConfigDeleter {
  void operator()(sbm_config* c) const { sbm_config_free(c); }
};
struct ReportDeleter {
  void operator()(sbm_report* r) const { sbm_report_free(r); }
};

int report_error(sbm_status s) {
  std::cerr << "sbm: " << sbm_last_error() << "\n";
  // argument and internal failures are reported like config errors
  return s == SBM_ERR_VALIDATION || s == SBM_ERR_NUMERIC ? static_cast<int>(s) : 1;
}

bool print(const sbm_report* rep, const std::string& format) {
  std::vector<std::string> keys;
  if (format == "csv") {
    for (size_t i = 0; i < sbm_report_table_count(rep); ++i)
      keys.push_back(std::string("csv:") + sbm_report_table_name(rep, i));
  } else {
    keys.push_back(format);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    char* text = nullptr;
    if (sbm_report_render(rep, keys[i].c_str(), &text) != SBM_OK) return false;
    if (format == "csv") std::cout << (i ? "\n" : "") << "# " << keys[i].substr(4) << "\n";
    std::cout << text;
    sbm_string_free(text);
  }
  std::cout.flush();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-trace asymptotics and simulation for subordinate Brownian motion"};
  app.set_help_flag("-h,--help");
  std::string command, config_path, out, formats, kappa, seed, threads;
  app.add_option("command", command, "expand | parametrix | heat-symbol | power-symbol | zeta | heat-trace | "
                                     "verify | simulate | report");
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out, "output directory (default: standard output)");
  app.add_option("--format", formats, "comma-separated subset of json,csv,txt");
  app.add_option("--kappa", kappa, "direct | paper");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (command.empty() || config_path.empty()) {
    std::cerr << sbm_usage();
    return 1;
  }

  sbm_config* raw = nullptr;
  if (sbm_status s = sbm_config_load(config_path.c_str(), &raw); s != SBM_OK) {
    int rc = report_error(s);
    std::cerr << "\n" << sbm_usage();
    return rc;
  }
  std::unique_ptr<sbm_config, ConfigDeleter> cfg(raw);
  const std::pair<const char*, const std::string*> overrides[] = {
      {"run.out", &out}, {"run.formats", &formats}, {"run.kappa", &kappa}, {"run.seed", &seed}, {"run.threads", &threads}};
  for (const auto& [key, value] : overrides)
    if (!value->empty())
      if (sbm_status s = sbm_config_set(cfg.get(), key, value->c_str()); s != SBM_OK) return report_error(s);

  sbm_report* rep_raw = nullptr;
  if (sbm_status s = sbm_run(command.c_str(), cfg.get(), &rep_raw); s != SBM_OK) return report_error(s);
  std::unique_ptr<sbm_report, ReportDeleter> rep(rep_raw);

  const std::string dir = sbm_config_output_dir(cfg.get());
  if (!dir.empty()) {
    if (sbm_status s = sbm_report_write(rep.get(), cfg.get(), dir.c_str()); s != SBM_OK) return report_error(s);
  } else {
    if (!print(rep.get(), sbm_config_format(cfg.get(), 0))) return report_error(SBM_ERR_INTERNAL);
  }
  if (!sbm_report_passed(rep.get())) {
    std::cerr << "sbm: " << command << ": one or more checks failed (see report)\n";
    return 2;
  }
  return 0;
}
