#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pxlap/pxlap.h"

namespace {

enum Exit { kExitPass = 0, kExitCheck = 1, kExitUsage = 2, kExitNonConverged = 3 };

struct ConfigDeleter {
  void operator()(pxl_config* c) const { pxl_config_free(c); }
};
struct ResultDeleter {
  void operator()(pxl_result* r) const { pxl_result_free(r); }
};
using ConfigPtr = std::unique_ptr<pxl_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<pxl_result, ResultDeleter>;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> n;
  std::optional<int> nx;
  std::optional<int> ny;
  std::optional<std::size_t> samples;
  std::optional<int> dimension;
  std::optional<int> levels;
  double r = 2.0;
  double a = 0.0;
  double b = 1.0;
  std::string parameter;
  std::vector<double> values;
  bool quiet = false;
};

class Failure {
 public:
  Failure(int code, std::string what) : code(code), what(std::move(what)) {}
  int code;
  std::string what;
};

int exit_for(pxl_status s) {
  switch (s) {
    case PXL_OK: return kExitPass;
    case PXL_NONCONVERGENCE: return kExitNonConverged;
    case PXL_INADMISSIBLE: return kExitCheck;
    default: return kExitUsage;
  }
}

void check(pxl_status s) {
  if (s != PXL_OK) throw Failure(exit_for(s), std::string(pxl_status_name(s)) + ": " + pxl_last_error());
}

ConfigPtr load(const Options& o, bool required) {
  if (o.config.empty()) {
    if (required) throw Failure(kExitUsage, "--config is required");
    return nullptr;
  }
  pxl_config* raw = nullptr;
  check(pxl_config_load(o.config.c_str(), &raw));
  ConfigPtr c(raw);
  if (o.seed) check(pxl_config_set_seed(c.get(), *o.seed));
  if (o.n && (o.nx || o.ny)) throw Failure(kExitUsage, "--n cannot be combined with --nx/--ny");
  if (o.n) {
    check(pxl_config_set_resolution(c.get(), *o.n, 0));
  } else if (o.nx || o.ny) {
    if (!o.nx) throw Failure(kExitUsage, "--ny needs --nx");
    check(pxl_config_set_resolution(c.get(), *o.nx, o.ny.value_or(0)));
  }
  return c;
}

void write(const std::filesystem::path& path, const std::string& data) { check(pxl_write_file(path.c_str(), data.c_str())); }

/// Report and table go to --out when given; otherwise the report goes to
/// standard output.
int finish(const Options& o, const ResultPtr& r, const std::string& report_name, const std::string& table_name) {
  const std::string report = pxl_result_report(r.get());
  const std::string table = pxl_result_table(r.get());
  if (!o.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw Failure(kExitUsage, "cannot create output directory '" + o.out + "'");
    write(std::filesystem::path(o.out) / report_name, report);
    if (!table.empty()) write(std::filesystem::path(o.out) / table_name, table);
  } else {
    std::fwrite(report.data(), 1, report.size(), stdout);
  }
  if (!o.quiet) std::fprintf(stderr, "%s\n", pxl_result_summary(r.get()));
  switch (pxl_result_outcome(r.get())) {
    case PXL_PASS: return kExitPass;
    case PXL_CHECK_FAILED: return kExitCheck;
    case PXL_NONCONVERGED: return kExitNonConverged;
  }
  return kExitUsage;
}

int cmd_solve(const Options& o) {
  ConfigPtr c = load(o, true);
  pxl_result* raw = nullptr;
  check(pxl_run_solve(c.get(), &raw));
  return finish(o, ResultPtr(raw), pxl_config_report_name(c.get()), pxl_config_solution_name(c.get()));
}

int cmd_validate(const Options& o) {
  ConfigPtr c = load(o, true);
  pxl_result* raw = nullptr;
  check(pxl_run_validate(c.get(), &raw));
  return finish(o, ResultPtr(raw), "validation.json", "");
}

int cmd_check(const Options& o, pxl_suite suite, const char* name) {
  ConfigPtr c = load(o, false);
  pxl_suite_params p;
  pxl_suite_params_default(suite, &p);
  bool seeded = o.seed.has_value();
  if (c) {
    check(pxl_config_suite_params(c.get(), suite, &p));
    int has = 0;
    check(pxl_config_has_seed(c.get(), &has));
    seeded = seeded || has;
  }
  if (!seeded) throw Failure(kExitUsage, std::string(name) + " is randomized; pass --seed");
  if (o.seed) p.seed = *o.seed;
  if (o.n) p.n = *o.n;
  if (o.samples) p.samples = *o.samples;
  if (o.dimension) p.dimension = *o.dimension;
  pxl_result* raw = nullptr;
  check(pxl_run_check(suite, &p, &raw));
  return finish(o, ResultPtr(raw), std::string(name) + ".json", std::string(name) + ".csv");
}

int cmd_eig(const Options& o) {
  pxl_eig_params p;
  pxl_eig_params_default(&p);
  p.r = o.r;
  p.a = o.a;
  p.b = o.b;
  if (o.levels) p.levels = *o.levels;
  if (o.n) p.n = *o.n;
  pxl_result* raw = nullptr;
  check(pxl_run_eig(&p, &raw));
  return finish(o, ResultPtr(raw), "eig.json", "eig.csv");
}

int cmd_sweep(const Options& o) {
  ConfigPtr c = load(o, true);
  pxl_result* raw = nullptr;
  check(pxl_run_sweep(c.get(), o.parameter.empty() ? nullptr : o.parameter.c_str(), o.values.data(), o.values.size(),
                      &raw));
  return finish(o, ResultPtr(raw), "sweep.json", "sweep.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent p-Laplacian solver and inequality checks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--quiet", o.quiet, "Suppress the summary line");
  };
  auto config_flags = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  auto resolution = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "Cells per axis")->check(CLI::Range(1, 1 << 20));
    sub->add_option("--nx", o.nx, "Cells along x")->check(CLI::Range(1, 1 << 20));
    sub->add_option("--ny", o.ny, "Cells along y")->check(CLI::Range(1, 1 << 20));
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve the configured boundary-value problem");
  config_flags(solve, true);
  solve->add_option("--seed", o.seed, "Seed for random initial guesses");
  resolution(solve);
  common(solve);

  CLI::App* validate = app.add_subcommand("validate", "Report the hypothesis checks of the configured problem");
  config_flags(validate, true);
  resolution(validate);
  common(validate);

  struct CheckCmd {
    const char* name;
    pxl_suite suite;
    CLI::App* app;
  };
  std::vector<CheckCmd> checks = {{"check-convexity", PXL_SUITE_CONVEXITY, nullptr},
                                  {"check-diaz-saa", PXL_SUITE_DIAZ_SAA, nullptr},
                                  {"check-comparison", PXL_SUITE_COMPARISON, nullptr}};
  for (CheckCmd& c : checks) {
    c.app = app.add_subcommand(c.name, "Run a seeded property suite");
    config_flags(c.app, false);
    c.app->add_option("--seed", o.seed, "Suite seed (required)");
    c.app->add_option("--n", o.n, "Cells per axis")->check(CLI::Range(2, 1 << 12));
    c.app->add_option("--samples", o.samples, "Number of sampled instances")->check(CLI::Range(1, 1 << 20));
    c.app->add_option("--dim", o.dimension, "Dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
    common(c.app);
  }

  CLI::App* eig = app.add_subcommand("eig", "First eigenvalue over a refinement ladder");
  eig->add_option("--r", o.r, "Exponent r")->check(CLI::Range(1.0 + 1e-9, 1e3));
  eig->add_option("--levels", o.levels, "Ladder length")->check(CLI::Range(1, 8));
  eig->add_option("--n", o.n, "Coarsest number of cells")->check(CLI::Range(2, 1 << 16));
  eig->add_option("--a", o.a, "Left end of the interval");
  eig->add_option("--b", o.b, "Right end of the interval");
  common(eig);

  CLI::App* sweep = app.add_subcommand("sweep", "One solve per value of a scalar parameter");
  config_flags(sweep, true);
  sweep->add_option("--seed", o.seed, "Seed for random initial guesses");
  sweep->add_option("--param", o.parameter, "h_scale, l_scale, m0, m_inf or r");
  sweep->add_option("--values", o.values, "Parameter values")->delimiter(',');
  resolution(sweep);
  common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (validate->parsed()) return cmd_validate(o);
    if (eig->parsed()) return cmd_eig(o);
    if (sweep->parsed()) return cmd_sweep(o);
    for (const CheckCmd& c : checks) {
      if (c.app->parsed()) return cmd_check(o, c.suite, c.name);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "pxlap: %s\n", f.what.c_str());
    return f.code;
  }
  return kExitUsage;
}
