// Batch front-end: dataset solves, robustness sweeps, and synthetic
// evaluation experiments, emitting JSON reports and CSV tables for plotting.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ucoot/coot.hpp"
#include "ucoot/experiments.hpp"
#include "ucoot/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Distinct exit codes per failure class, used by scripted callers.
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitDimension = 5;
constexpr int kExitDegenerate = 6;

struct CommonOptions {
  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<double> lambda1, lambda2, eps;
  std::optional<std::string> inner;
};

double parse_lambda(const json& value) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf" || s == "infinity") return ucoot::kInf;
    return std::stod(s);
  }
  return value.get<double>();
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ucoot::IoError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ucoot::ParseError(path + ": " + e.what());
  }
}

// File values first, then command-line flags on top.
ucoot::SolverConfig resolve_solver_config(const CommonOptions& opts) {
  ucoot::SolverConfig config;
  if (opts.config_path) {
    const json file = load_config_file(*opts.config_path);
    if (file.contains("lambda1")) config.lambda1 = parse_lambda(file["lambda1"]);
    if (file.contains("lambda2")) config.lambda2 = parse_lambda(file["lambda2"]);
    if (file.contains("eps")) config.eps = file["eps"].get<double>();
    if (file.contains("outer_max_iter")) config.outer_max_iter = file["outer_max_iter"];
    if (file.contains("outer_tol")) config.outer_tol = file["outer_tol"];
    if (file.contains("inner_max_iter")) config.inner_max_iter = file["inner_max_iter"];
    if (file.contains("inner_tol")) config.inner_tol = file["inner_tol"];
    if (file.contains("inner")) {
      const std::string name = file["inner"].get<std::string>();
      if (name == "scaling") config.inner = ucoot::InnerSolver::Scaling;
      else if (name == "nnpr") config.inner = ucoot::InnerSolver::Nnpr;
      else if (name == "auto") config.inner = ucoot::InnerSolver::Auto;
      else throw ucoot::ConfigError("unknown inner solver '" + name + "'");
    }
  }
  if (opts.lambda1) config.lambda1 = *opts.lambda1;
  if (opts.lambda2) config.lambda2 = *opts.lambda2;
  if (opts.eps) config.eps = *opts.eps;
  if (opts.inner) {
    if (*opts.inner == "scaling") config.inner = ucoot::InnerSolver::Scaling;
    else if (*opts.inner == "nnpr") config.inner = ucoot::InnerSolver::Nnpr;
    else if (*opts.inner == "auto") config.inner = ucoot::InnerSolver::Auto;
    else throw ucoot::ConfigError("unknown inner solver '" + *opts.inner + "'");
  }
  return config;
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ucoot::IoError("cannot create output directory " + out_dir);
}

json lambda_to_json(double lambda) {
  if (std::isinf(lambda)) return "inf";
  return lambda;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ucoot::IoError("cannot write " + path);
  out << text;
  if (!out.good()) throw ucoot::IoError("failed writing " + path);
}

std::string csv_cell(double x) { return ucoot::format_double(x); }

// ---------------------------------------------------------------------------

int cmd_solve(const CommonOptions& opts, const std::string& a_path, const std::string& b_path,
              const std::optional<std::string>& a_sample_w,
              const std::optional<std::string>& a_feature_w,
              const std::optional<std::string>& b_sample_w,
              const std::optional<std::string>& b_feature_w) {
  const ucoot::SolverConfig config = resolve_solver_config(opts);
  const ucoot::Dataset a = ucoot::load_dataset(a_path, a_sample_w, a_feature_w);
  const ucoot::Dataset b = ucoot::load_dataset(b_path, b_sample_w, b_feature_w);

  const ucoot::SolveReport report = ucoot::bcd_solve(a, b, config);

  json out;
  out["command"] = "solve";
  out["seed"] = opts.seed;
  out["config"] = {{"lambda1", lambda_to_json(config.lambda1)},
                   {"lambda2", lambda_to_json(config.lambda2)},
                   {"eps", config.eps},
                   {"inner", config.resolved_inner() == ucoot::InnerSolver::Nnpr ? "nnpr"
                                                                                 : "scaling"},
                   {"outer_max_iter", config.outer_max_iter},
                   {"outer_tol", config.outer_tol},
                   {"inner_max_iter", config.inner_max_iter},
                   {"inner_tol", config.inner_tol}};
  out["objective"] = report.objective;
  out["value"] = report.value;
  out["parts"] = {{"transport_cost", report.parts.transport_cost},
                  {"kl1", report.parts.kl1},
                  {"kl2", report.parts.kl2},
                  {"entropic", report.parts.entropic},
                  {"marginals1_feasible", report.parts.marginals1_feasible},
                  {"marginals2_feasible", report.parts.marginals2_feasible}};
  out["outer_iters"] = report.outer_iters;
  out["converged"] = report.converged;
  out["inner_converged"] = report.inner_converged;
  out["trace"] = report.trace;
  out["sample_plan_mass"] = report.couplings.sample_plan.sum();
  out["feature_plan_mass"] = report.couplings.feature_plan.sum();

  ensure_out_dir(opts.out_dir);
  write_text(opts.out_dir + "/report.json", out.dump(2) + "\n");
  ucoot::write_matrix_csv(opts.out_dir + "/sample_plan.csv", report.couplings.sample_plan);
  ucoot::write_matrix_csv(opts.out_dir + "/feature_plan.csv", report.couplings.feature_plan);
  std::cout << "objective " << ucoot::format_double(report.objective) << " value "
            << ucoot::format_double(report.value) << " iters " << report.outer_iters
            << (report.converged ? "" : " (not converged)") << "\n";
  return 0;
}

int cmd_robust_sweep(const CommonOptions& opts, std::vector<double> taus) {
  ucoot::RobustSweepConfig config;
  config.seed = opts.seed;
  if (opts.lambda1) config.lambda1 = *opts.lambda1;
  if (opts.lambda2) config.lambda2 = *opts.lambda2;
  if (opts.eps) config.eps = *opts.eps;
  if (std::isinf(config.lambda1) || std::isinf(config.lambda2)) {
    throw ucoot::ConfigError("robust-sweep needs finite penalty weights");
  }

  const auto rows = ucoot::run_robust_sweep(taus, config);

  std::string csv = "tau,coot_obj,ucoot_obj,prop2_lower,thm2_upper,seed\n";
  for (const auto& row : rows) {
    csv += csv_cell(row.tau) + "," + csv_cell(row.coot_obj) + "," + csv_cell(row.ucoot_obj) +
           "," + csv_cell(row.lower_bound) + "," + csv_cell(row.upper_bound) + "," +
           std::to_string(row.seed) + "\n";
    if (!row.coot_converged || !row.ucoot_converged) {
      std::cerr << "warning: tau=" << row.tau << " did not fully converge\n";
    }
  }
  ensure_out_dir(opts.out_dir);
  write_text(opts.out_dir + "/robust_sweep.csv", csv);
  std::cout << "wrote " << rows.size() << " rows to " << opts.out_dir
            << "/robust_sweep.csv\n";
  return 0;
}

int cmd_target_shift(const CommonOptions& opts, std::vector<double> rhos, int classes,
                     int per_class, int seeds) {
  ucoot::TargetShiftConfig config;
  config.base_seed = opts.seed;
  config.seeds = seeds;
  config.views.classes = classes;
  config.per_class = per_class;
  if (opts.lambda1) config.lambda = *opts.lambda1;
  if (opts.eps) config.eps = *opts.eps;
  if (std::isinf(config.lambda)) {
    throw ucoot::ConfigError("target-shift needs a finite penalty weight");
  }

  const auto rows = ucoot::run_target_shift(rhos, config);

  std::string csv = "rho,tv,coot_acc,ucoot_acc,seed\n";
  for (const auto& row : rows) {
    csv += csv_cell(row.rho) + "," + csv_cell(row.tv) + "," + csv_cell(row.coot_acc) + "," +
           csv_cell(row.ucoot_acc) + "," + std::to_string(row.seed) + "\n";
  }
  ensure_out_dir(opts.out_dir);
  write_text(opts.out_dir + "/target_shift.csv", csv);
  std::cout << "wrote " << rows.size() << " rows to " << opts.out_dir << "/target_shift.csv\n";
  return 0;
}

int cmd_outlier_demo(const CommonOptions& opts, int classes, int per_class, int seeds,
                     double rate) {
  ucoot::OutlierDemoConfig config;
  config.base_seed = opts.seed;
  config.seeds = seeds;
  config.views.classes = classes;
  config.per_class = per_class;
  config.outlier_rate = rate;
  if (opts.lambda1) config.lambda = *opts.lambda1;
  if (opts.eps) config.eps = *opts.eps;

  const auto rows = ucoot::run_outlier_demo(config);

  std::string csv = "seed,ucoot_outlier_mass,coot_outlier_mass,ucoot_accuracy,coot_accuracy\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.seed) + "," + csv_cell(row.ucoot_outlier_mass) + "," +
           csv_cell(row.coot_outlier_mass) + "," + csv_cell(row.ucoot_accuracy) + "," +
           csv_cell(row.coot_accuracy) + "\n";
  }
  ensure_out_dir(opts.out_dir);
  write_text(opts.out_dir + "/outlier_demo.csv", csv);
  std::cout << "wrote " << rows.size() << " rows to " << opts.out_dir << "/outlier_demo.csv\n";
  return 0;
}

json error_json(const std::string& type, const std::string& message) {
  return json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-optimal transport solver and experiment runner"};
  app.require_subcommand(1);

  CommonOptions opts;
  app.add_option("--config", opts.config_path, "JSON config file (flags override it)");
  app.add_option("--seed", opts.seed, "Base seed for all randomness");
  app.add_option("--out-dir", opts.out_dir, "Output directory");
  app.add_option_function<std::string>(
      "--lambda1", [&](const std::string& s) { opts.lambda1 = parse_lambda(json(s)); },
      "Marginal penalty weight 1 (number or 'inf')");
  app.add_option_function<std::string>(
      "--lambda2", [&](const std::string& s) { opts.lambda2 = parse_lambda(json(s)); },
      "Marginal penalty weight 2 (number or 'inf')");
  app.add_option("--eps", opts.eps, "Entropic weight");
  app.add_option("--inner", opts.inner, "Inner solver: scaling, nnpr, auto");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one dataset pair");
  std::string a_path, b_path;
  std::optional<std::string> asw, afw, bsw, bfw;
  solve->add_option("a", a_path, "First dataset CSV")->required();
  solve->add_option("b", b_path, "Second dataset CSV")->required();
  solve->add_option("--a-sample-weights", asw, "Sidecar weights, one per row of a");
  solve->add_option("--a-feature-weights", afw, "Sidecar weights, one per column of a");
  solve->add_option("--b-sample-weights", bsw, "Sidecar weights, one per row of b");
  solve->add_option("--b-feature-weights", bfw, "Sidecar weights, one per column of b");

  // robust-sweep
  auto* sweep = app.add_subcommand("robust-sweep", "Outlier-level sweep with bounds");
  std::vector<double> taus;
  sweep->add_option("--taus", taus, "Outlier levels")->delimiter(',')->required();

  // target-shift
  auto* shift = app.add_subcommand("target-shift", "Class-proportion shift experiment");
  std::vector<double> rhos;
  int ts_classes = 4, ts_per_class = 12, ts_seeds = 5;
  shift->add_option("--rhos", rhos, "Subsampling proportions in (0, 1]")
      ->delimiter(',')
      ->required();
  shift->add_option("--classes", ts_classes, "Number of classes");
  shift->add_option("--per-class", ts_per_class, "Target samples per class");
  shift->add_option("--seeds", ts_seeds, "Seeds per grid point");

  // outlier-demo
  auto* demo = app.add_subcommand("outlier-demo", "Outlier rejection experiment");
  int od_classes = 3, od_per_class = 20, od_seeds = 10;
  double od_rate = 0.05;
  demo->add_option("--classes", od_classes, "Number of classes");
  demo->add_option("--per-class", od_per_class, "Samples per class");
  demo->add_option("--seeds", od_seeds, "Number of seeds");
  demo->add_option("--outlier-rate", od_rate, "Fraction of appended outliers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(opts, a_path, b_path, asw, afw, bsw, bfw);
    if (sweep->parsed()) return cmd_robust_sweep(opts, taus);
    if (shift->parsed()) return cmd_target_shift(opts, rhos, ts_classes, ts_per_class, ts_seeds);
    if (demo->parsed()) return cmd_outlier_demo(opts, od_classes, od_per_class, od_seeds, od_rate);
  } catch (const ucoot::IoError& e) {
    std::cerr << error_json("io", e.what()).dump() << "\n";
    return kExitIo;
  } catch (const ucoot::ParseError& e) {
    std::cerr << error_json("parse", e.what()).dump() << "\n";
    return kExitParse;
  } catch (const ucoot::DimensionError& e) {
    std::cerr << error_json("dimension", e.what()).dump() << "\n";
    return kExitDimension;
  } catch (const ucoot::DegenerateError& e) {
    std::cerr << error_json("degenerate", e.what()).dump() << "\n";
    return kExitDegenerate;
  } catch (const ucoot::ConfigError& e) {
    std::cerr << error_json("config", e.what()).dump() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
    return 1;
  }
  return 0;
}
