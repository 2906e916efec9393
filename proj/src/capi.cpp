#include "pxlap/pxlap.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "json.hpp"
#include "pxlap/commands.hpp"
#include "pxlap/config.hpp"
#include "pxlap/error.hpp"

struct pxl_expr {
  pxl::ScalarExpr expr;
};

struct pxl_config {
  pxl::RunConfig config;
  mutable std::string json;
};

struct pxl_result {
  pxl::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

pxl_status fail(pxl_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

pxl_status status_of(pxl::ErrorCode c) { return static_cast<pxl_status>(static_cast<int>(c)); }

template <class F>
pxl_status guarded(F&& f) {
  try {
    return f();
  } catch (const pxl::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PXL_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PXL_INTERNAL, e.what());
  } catch (...) {
    return fail(PXL_INTERNAL, "unknown failure");
  }
}

pxl_status null_arg(const char* name) { return fail(PXL_INVALID_ARGUMENT, std::string(name) + " is null"); }

pxl::SuiteKind suite_kind(pxl_suite s) {
  switch (s) {
    case PXL_SUITE_CONVEXITY: return pxl::SuiteKind::kConvexity;
    case PXL_SUITE_DIAZ_SAA: return pxl::SuiteKind::kDiazSaa;
    case PXL_SUITE_COMPARISON: return pxl::SuiteKind::kComparison;
  }
  throw pxl::Error(pxl::ErrorCode::kInvalidArgument, "unknown suite");
}

pxl_status emit(pxl::CommandResult r, pxl_result** out) {
  *out = new pxl_result{std::move(r)};
  return PXL_OK;
}

}  // namespace

extern "C" {

const char* pxl_version(void) { return "1.0.0"; }

const char* pxl_status_name(pxl_status status) {
  switch (status) {
    case PXL_OK: return "ok";
    case PXL_INVALID_ARGUMENT: return "invalid-argument";
    case PXL_OUTSIDE_CONE: return "outside-cone";
    case PXL_MESH_MISMATCH: return "mesh-mismatch";
    case PXL_INADMISSIBLE: return "inadmissible";
    case PXL_SYNTAX: return "syntax";
    case PXL_CONFIG: return "config";
    case PXL_NONCONVERGENCE: return "nonconvergence";
    case PXL_MODEL_DEFECT: return "model-defect";
    case PXL_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pxl_last_error(void) { return g_last_error.c_str(); }

pxl_status pxl_expr_parse(const char* source, pxl_expr** out, size_t* error_offset) {
  if (!source) return null_arg("source");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    try {
      *out = new pxl_expr{pxl::ScalarExpr::parse(source)};
    } catch (const pxl::ExprError& e) {
      if (error_offset) *error_offset = e.offset();
      throw;
    }
    return PXL_OK;
  });
}

pxl_status pxl_expr_eval(const pxl_expr* expr, double x, double y, double* out) {
  if (!expr) return null_arg("expr");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = expr->expr(x, y);
    return PXL_OK;
  });
}

pxl_status pxl_expr_print(const pxl_expr* expr, char* buf, size_t cap, size_t* needed) {
  if (!expr) return null_arg("expr");
  return guarded([&] {
    const std::string s = expr->expr.to_string();
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, s.size());
      s.copy(buf, n);
      buf[n] = '\0';
    }
    return PXL_OK;
  });
}

void pxl_expr_free(pxl_expr* expr) { delete expr; }

pxl_status pxl_config_parse(const char* json_text, pxl_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new pxl_config{pxl::parse_config(json_text), {}};
    return PXL_OK;
  });
}

pxl_status pxl_config_load(const char* path, pxl_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new pxl_config{pxl::load_config(path), {}};
    return PXL_OK;
  });
}

pxl_status pxl_config_set_seed(pxl_config* config, uint64_t seed) {
  if (!config) return null_arg("config");
  config->config.seed = seed;
  return PXL_OK;
}

pxl_status pxl_config_has_seed(const pxl_config* config, int* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = config->config.seed.has_value();
  return PXL_OK;
}

pxl_status pxl_config_set_resolution(pxl_config* config, int nx, int ny) {
  if (!config) return null_arg("config");
  if (nx < 1 || ny < 0) return fail(PXL_INVALID_ARGUMENT, "resolution must be positive");
  if (ny > 0 && config->config.domain.dimension == 1) {
    return fail(PXL_CONFIG, "ny applies to rectangle domains only");
  }
  config->config.domain.nx = nx;
  if (ny > 0) config->config.domain.ny = ny;
  return PXL_OK;
}

pxl_status pxl_config_suite_params(const pxl_config* config, pxl_suite suite, pxl_suite_params* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    const pxl::CheckConfig& c = config->config.check;
    out->n = c.n;
    out->dimension = c.dimension;
    out->samples = c.samples ? *c.samples : pxl::default_samples(suite_kind(suite));
    out->seed = config->config.seed.value_or(0);
    return PXL_OK;
  });
}

const char* pxl_config_solution_name(const pxl_config* config) {
  return config ? config->config.output.solution.c_str() : "";
}

const char* pxl_config_report_name(const pxl_config* config) {
  return config ? config->config.output.report.c_str() : "";
}

const char* pxl_config_json(const pxl_config* config) {
  if (!config) return "";
  config->json = pxl::to_json(config->config);
  return config->json.c_str();
}

void pxl_config_free(pxl_config* config) { delete config; }

void pxl_suite_params_default(pxl_suite suite, pxl_suite_params* out) {
  if (!out) return;
  pxl::SuiteParams d;
  out->n = d.n;
  out->dimension = d.dimension;
  out->seed = d.seed;
  try {
    out->samples = pxl::default_samples(suite_kind(suite));
  } catch (...) {
    out->samples = d.samples;
  }
}

void pxl_eig_params_default(pxl_eig_params* out) {
  if (!out) return;
  pxl::EigParams d;
  *out = {d.r, d.levels, d.n, d.a, d.b};
}

pxl_status pxl_run_solve(const pxl_config* config, pxl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { return emit(pxl::run_solve(config->config), out); });
}

pxl_status pxl_run_validate(const pxl_config* config, pxl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { return emit(pxl::run_validate(config->config), out); });
}

pxl_status pxl_run_check(pxl_suite suite, const pxl_suite_params* params, pxl_result** out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    pxl::SuiteParams sp;
    sp.n = params->n;
    sp.dimension = params->dimension;
    sp.samples = params->samples;
    sp.seed = params->seed;
    return emit(pxl::run_check(suite_kind(suite), sp), out);
  });
}

pxl_status pxl_run_eig(const pxl_eig_params* params, pxl_result** out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    pxl::EigParams ep{params->r, params->levels, params->n, params->a, params->b};
    return emit(pxl::run_eig(ep), out);
  });
}

pxl_status pxl_run_sweep(const pxl_config* config, const char* parameter, const double* values, size_t count,
                         pxl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  if (count > 0 && !values) return null_arg("values");
  *out = nullptr;
  return guarded([&] {
    const pxl::RunConfig& c = config->config;
    std::string param;
    std::vector<double> vals;
    if (parameter) {
      param = parameter;
    } else if (c.sweep) {
      param = c.sweep->parameter;
    } else {
      throw pxl::Error(pxl::ErrorCode::kConfig, "no sweep parameter given and no sweep block in the config");
    }
    if (count > 0) {
      vals.assign(values, values + count);
    } else if (c.sweep) {
      vals = c.sweep->values;
    } else {
      throw pxl::Error(pxl::ErrorCode::kConfig, "no sweep values given and no sweep block in the config");
    }
    return emit(pxl::run_sweep(c, param, vals), out);
  });
}

pxl_outcome pxl_result_outcome(const pxl_result* result) {
  return result ? static_cast<pxl_outcome>(static_cast<int>(result->result.outcome)) : PXL_CHECK_FAILED;
}

const char* pxl_result_report(const pxl_result* result) { return result ? result->result.report.c_str() : ""; }
const char* pxl_result_table(const pxl_result* result) { return result ? result->result.table.c_str() : ""; }
const char* pxl_result_summary(const pxl_result* result) { return result ? result->result.summary.c_str() : ""; }

pxl_status pxl_result_number(const pxl_result* result, const char* path, double* out) {
  if (!result) return null_arg("result");
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    const nlohmann::json doc = nlohmann::json::parse(result->result.report);
    const nlohmann::json* node = &doc;
    std::string p = path;
    std::size_t start = 0;
    while (start <= p.size()) {
      const std::size_t dot = std::min(p.find('.', start), p.size());
      const std::string key = p.substr(start, dot - start);
      if (node->is_object() && node->contains(key)) {
        node = &(*node)[key];
      } else if (node->is_array() && !key.empty() && key.find_first_not_of("0123456789") == std::string::npos &&
                 std::stoul(key) < node->size()) {
        node = &(*node)[std::stoul(key)];
      } else {
        return fail(PXL_INVALID_ARGUMENT, "no report field '" + p + "'");
      }
      start = dot + 1;
    }
    if (node->is_boolean()) {
      *out = node->get<bool>() ? 1.0 : 0.0;
    } else if (node->is_number()) {
      *out = node->get<double>();
    } else {
      return fail(PXL_INVALID_ARGUMENT, "report field '" + p + "' is not numeric");
    }
    return PXL_OK;
  });
}

void pxl_result_free(pxl_result* result) { delete result; }

pxl_status pxl_first_eigenvalue(double a, double b, int n, double r, double* lambda) {
  if (!lambda) return null_arg("lambda");
  return guarded([&] {
    if (!(a < b)) throw pxl::Error(pxl::ErrorCode::kInvalidArgument, "empty interval");
    *lambda = pxl::first_eigenpair(pxl::Mesh::interval(a, b, n), r).lambda;
    return PXL_OK;
  });
}

pxl_status pxl_write_file(const char* path, const char* data) {
  if (!path) return null_arg("path");
  if (!data) return null_arg("data");
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) return fail(PXL_CONFIG, "cannot write '" + tmp.string() + "'");
    f << data;
    f.close();
    if (!f) return fail(PXL_CONFIG, "cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return fail(PXL_CONFIG, "cannot rename onto '" + target.string() + "'");
  }
  return PXL_OK;
}

}  // extern "C"
