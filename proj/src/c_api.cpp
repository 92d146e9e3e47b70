#include "sbm/sbm.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "sbm/app.hpp"
#include "sbm/error.hpp"
#include "sbm/oracle.hpp"

struct sbm_config {
  sbm::app::RunConfig cfg;
};
struct sbm_report {
  sbm::report::Document doc;
};
struct sbm_spec {
  sbm::bernstein::LevySpec spec;
};

namespace {

thread_local std::string last_error;

sbm_status fail(sbm_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <class F>
sbm_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return SBM_OK;
  } catch (const sbm::Error& e) {
    return fail(static_cast<sbm_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SBM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SBM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SBM_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* sbm_last_error(void) { return last_error.c_str(); }

const char* sbm_usage(void) {
  static const std::string u = sbm::app::usage();
  return u.c_str();
}

const char* sbm_version(void) { return "1.0.0"; }

sbm_status sbm_config_parse(const char* text, sbm_config** out) {
  if (!text || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sbm_config{sbm::app::parse_config(text)}; });
}

sbm_status sbm_config_load(const char* path, sbm_config** out) {
  if (!path || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sbm_config{sbm::app::load_config(path)}; });
}

sbm_status sbm_config_set(sbm_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { sbm::app::set_option(cfg->cfg, key, value); });
}

const char* sbm_config_output_dir(const sbm_config* cfg) { return cfg ? cfg->cfg.out.c_str() : ""; }

size_t sbm_config_format_count(const sbm_config* cfg) { return cfg ? cfg->cfg.formats.size() : 0; }

const char* sbm_config_format(const sbm_config* cfg, size_t i) {
  if (!cfg || i >= cfg->cfg.formats.size()) return nullptr;
  return cfg->cfg.formats[i].c_str();
}

void sbm_config_free(sbm_config* cfg) { delete cfg; }

sbm_status sbm_run(const char* command, const sbm_config* cfg, sbm_report** out) {
  if (!command || !cfg || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sbm_report{sbm::app::run(command, cfg->cfg)}; });
}

int sbm_report_passed(const sbm_report* rep) { return rep && rep->doc.passed ? 1 : 0; }

sbm_status sbm_report_render(const sbm_report* rep, const char* format, char** out) {
  if (!rep || !format || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::string f = format;
    if (f == "json") {
      *out = dup(sbm::report::to_json(rep->doc));
    } else if (f == "txt") {
      *out = dup(sbm::report::to_txt(rep->doc));
    } else if (f.rfind("csv:", 0) == 0) {
      auto name = f.substr(4);
      for (const auto& t : rep->doc.tables)
        if (t.name == name) {
          *out = dup(sbm::report::to_csv(t));
          return;
        }
      throw sbm::ArgumentError("no table named '" + name + "'");
    } else {
      throw sbm::ArgumentError("unknown format '" + f + "'");
    }
  });
}

sbm_status sbm_report_write(const sbm_report* rep, const sbm_config* cfg, const char* dir) {
  if (!rep || !cfg || !dir) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw sbm::ConfigError(std::string("cannot create ") + dir + ": " + ec.message());
    sbm::report::write(rep->doc, dir, cfg->cfg.formats);
  });
}

size_t sbm_report_table_count(const sbm_report* rep) { return rep ? rep->doc.tables.size() : 0; }

const char* sbm_report_table_name(const sbm_report* rep, size_t i) {
  if (!rep || i >= rep->doc.tables.size()) return nullptr;
  return rep->doc.tables[i].name.c_str();
}

void sbm_report_free(sbm_report* rep) { delete rep; }
void sbm_string_free(char* s) { delete[] s; }

sbm_status sbm_spec_from_config(const sbm_config* cfg, sbm_spec** out) {
  if (!cfg || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sbm_spec{sbm::app::build_spec(cfg->cfg.spec)}; });
}

sbm_status sbm_spec_eval_f(const sbm_spec* spec, double lambda, double* out) {
  if (!spec || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = sbm::bernstein::eval_f(spec->spec, lambda); });
}

sbm_status sbm_spec_mbar(const sbm_spec* spec, double* out) {
  if (!spec || !out) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = spec->spec.mbar(); });
}

sbm_status sbm_spec_trace(const sbm_spec* spec, int n, double t, double* value, double* est_error) {
  if (!spec || !value) return fail(SBM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = sbm::oracle::tr_heat_numeric(spec->spec, n, t);
    *value = s.value;
    if (est_error) *est_error = s.est_error;
  });
}

void sbm_spec_free(sbm_spec* spec) { delete spec; }

}  // extern "C"
