// Experiment runner: config-driven fits, theorem checks, rate sweeps and
// robust-vs-ridge comparisons. Progress goes to stderr; stdout carries only
// the paths of written artifacts.
//
// Exit codes: 0 pass, 1 check failed, 2 fit did not converge,
// 64 usage/config error, 65 theorem precondition violated, 70 internal error.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hkreg/report_io.hpp"

namespace {

using namespace hkreg;

std::vector<double> grid_from(const Json& j, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : j[key]) out.push_back(v.get<double>());
  return out;
}

double check_epsilon(const Json& section, const Scenario& scenario) {
  if (section.contains("epsilon")) return section["epsilon"].get<double>();
  return scenario.noise.declared_epsilon();
}

int cmd_fit(const ExperimentConfig& cfg) {
  const Json scen_json = cfg.scenario_json("default");
  const Scenario scenario = build_scenario(scen_json);
  const Json& fj = cfg.doc["fit"];

  FitConfig fit_cfg;
  fit_cfg.lambda = fj["lambda"].get<double>();
  fit_cfg.tol_objective = fj["tol_objective"].get<double>();
  fit_cfg.tol_gradient = fj["tol_gradient"].get<double>();
  fit_cfg.max_iterations = fj["max_iterations"].get<int>();
  const double sigma = fj["sigma"].get<double>();
  const int n = fj["n"].get<int>();

  std::cerr << "fit: n=" << n << " sigma=" << sigma << " lambda=" << fit_cfg.lambda << "\n";
  const Dataset data = sample_dataset(scenario, n, cfg.base_seed);
  const FittedModel model =
      fit_huber_krr(data, scenario.kernel, HuberScale(sigma), fit_cfg, scenario.probe_grid);

  std::filesystem::create_directories(cfg.output_dir);
  const std::string stem = cfg.output_dir + "/fit_" + std::to_string(cfg.base_seed);
  Json j = model_to_json(model);
  j["config"] = cfg.snapshot("fit", scen_json);
  write_json_file(stem + ".json", j);
  write_predictions_csv(stem + "_predictions.csv", model, scenario.probe_grid);
  write_dataset_csv(stem + "_data.csv", data);
  std::cout << stem + ".json" << "\n" << stem + "_predictions.csv" << "\n"
            << stem + "_data.csv" << "\n";
  return model.converged ? 0 : 2;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& theorem_id) {
  const Json& v = cfg.doc["verify"];
  const std::string purpose = theorem_id == "thm1" ? "bias" : "default";
  const Json scen_json = cfg.scenario_json(purpose);
  const Scenario scenario = build_scenario(scen_json);
  const QuadratureGrid grid =
      make_oracle_grid(scenario.marginal, cfg.doc["quadrature"]["nodes"].get<int>(),
                       cfg.doc["quadrature"]["inner_tolerance"].get<double>());

  std::cerr << "verify " << theorem_id << ": seed=" << cfg.base_seed << " jobs=" << cfg.jobs << "\n";
  TheoremReport report;
  if (theorem_id == "lemma1") {
    const Json& s = v["lemma1"];
    report = check_rough_bound(scenario, grid_from(s, "sigma_grid"), grid_from(s, "lambda_grid"),
                               s["trials_per_cell"].get<int>(), s["n"].get<int>(), cfg.base_seed,
                               cfg.jobs);
  } else if (theorem_id == "thm2") {
    const Json& s = v["thm2"];
    report = check_norm_bound_probabilistic(scenario, s["sigma"].get<double>(),
                                            s["lambda"].get<double>(), check_epsilon(s, scenario),
                                            s["n"].get<int>(), s["trials"].get<int>(),
                                            s["delta"].get<double>(), cfg.base_seed, grid, cfg.jobs);
  } else if (theorem_id == "prop1") {
    const Json& s = v["prop1"];
    report = check_population_norm_bound(scenario, grid_from(s, "sigma_grid"),
                                         grid_from(s, "lambda_grid"), check_epsilon(s, scenario),
                                         grid);
    report.seed = cfg.base_seed;
  } else if (theorem_id == "thm3") {
    const Json& s = v["thm3"];
    report = check_comparison(scenario, grid_from(s, "sigma_grid"), check_epsilon(s, scenario),
                              s["count"].get<int>(), cfg.base_seed, grid, cfg.jobs);
  } else if (theorem_id == "thm1") {
    const Json& s = v["thm1"];
    report = check_bias_bound(scenario, s["lambda"].get<double>(), check_epsilon(s, scenario),
                              grid_from(s, "sigma_grid"), grid);
    report.seed = cfg.base_seed;
  } else if (theorem_id == "thm4") {
    const Json& s = v["thm4"];
    report = check_variance_bound(scenario, grid_from(s, "sigma_grid"), check_epsilon(s, scenario),
                                  s["count"].get<int>(), cfg.base_seed, grid, cfg.jobs);
  } else {
    std::cerr << "error: unknown theorem id '" << theorem_id
              << "' (expected lemma1, thm2, prop1, thm1, thm3 or thm4)\n";
    return 64;
  }

  report.config_snapshot = cfg.snapshot("verify", scen_json);
  const auto paths = write_theorem_report(cfg.output_dir, report);
  std::cout << paths.first << "\n" << paths.second << "\n";
  std::cerr << "verify " << theorem_id << ": " << (report.pass ? "pass" : "FAIL")
            << " margin=" << report.measured_margin << "\n";
  return report.pass ? 0 : 1;
}

int cmd_rates(const ExperimentConfig& cfg) {
  const Json scen_json = cfg.scenario_json("rates");
  const Scenario scenario = build_scenario(scen_json);
  const QuadratureGrid grid =
      make_oracle_grid(scenario.marginal, cfg.doc["quadrature"]["nodes"].get<int>(),
                       cfg.doc["quadrature"]["inner_tolerance"].get<double>());
  const Json& r = cfg.doc["rates"];
  std::vector<int> n_grid;
  for (const auto& n : r["n_grid"]) n_grid.push_back(n.get<int>());

  std::cerr << "rates: reps=" << r["reps"].get<int>() << " jobs=" << cfg.jobs << "\n";
  RateResult result =
      rate_experiment(scenario, r["epsilon"].get<double>(), r["beta"].get<double>(),
                      r["q"].get<double>(), r["eta"].get<double>(), n_grid, r["reps"].get<int>(),
                      cfg.base_seed, grid, cfg.jobs);

  result.report.config_snapshot = cfg.snapshot("rates", scen_json);
  const auto paths = write_theorem_report(cfg.output_dir, result.report);
  const std::string summary_path =
      cfg.output_dir + "/rates_" + std::to_string(cfg.base_seed) + ".csv";
  write_rate_summary_csv(summary_path, result.summary);
  std::cout << paths.first << "\n" << paths.second << "\n" << summary_path << "\n";
  std::cerr << "rates: " << (result.report.pass ? "pass" : "FAIL") << "\n";
  return result.report.pass ? 0 : 1;
}

int cmd_compare(const ExperimentConfig& cfg) {
  const Json scen_json = cfg.scenario_json("default");
  const Scenario scenario = build_scenario(scen_json);
  const QuadratureGrid grid =
      make_oracle_grid(scenario.marginal, cfg.doc["quadrature"]["nodes"].get<int>(),
                       cfg.doc["quadrature"]["inner_tolerance"].get<double>());
  const Json& c = cfg.doc["compare"];
  const double sigma = c["sigma"].get<double>();
  const double lambda = c["lambda"].get<double>();
  const int n = c["n"].get<int>();
  const int reps = c["reps"].get<int>();
  if (reps < 1) {
    std::cerr << "error: config error at config.compare.reps: must be positive\n";
    return 64;
  }

  std::cerr << "compare: n=" << n << " reps=" << reps << "\n";
  auto target = [&](const Point& x) { return scenario.target(x); };
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(reps));
#pragma omp parallel for schedule(dynamic) num_threads(cfg.jobs > 0 ? cfg.jobs : 1)
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset data =
        sample_dataset(scenario, n, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(rep)));
    FitConfig fit_cfg;
    fit_cfg.lambda = lambda;
    const FittedModel huber =
        fit_huber_krr(data, scenario.kernel, HuberScale(sigma), fit_cfg, scenario.probe_grid);
    const FittedModel ridge = fit_kernel_ridge(data, scenario.kernel, lambda, scenario.probe_grid);
    auto he = [&](const Point& x) { return eval_function(huber.function, x); };
    auto re = [&](const Point& x) { return eval_function(ridge.function, x); };
    rows[static_cast<std::size_t>(rep)] = {static_cast<double>(rep),
                                           l2_distance_sq(he, target, grid),
                                           l2_distance_sq(re, target, grid)};
  }

  std::filesystem::create_directories(cfg.output_dir);
  const std::string stem = cfg.output_dir + "/compare_" + std::to_string(cfg.base_seed);
  write_csv(stem + ".csv", {"rep", "huber_l2", "ridge_l2"}, rows);

  std::vector<double> hv, rv;
  for (const auto& row : rows) {
    hv.push_back(row[1]);
    rv.push_back(row[2]);
  }
  Json j;
  j["schema_version"] = 1;
  j["sigma"] = sigma;
  j["lambda"] = lambda;
  j["n"] = n;
  j["reps"] = reps;
  j["huber_median_l2"] = sample_quantile(hv, 0.5);
  j["ridge_median_l2"] = sample_quantile(rv, 0.5);
  j["config"] = cfg.snapshot("compare", scen_json);
  write_json_file(stem + ".json", j);
  std::cout << stem + ".json" << "\n" << stem + ".csv" << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov-regularized Huber regression in RKHS: fits, theorem checks, rate sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string theorem_id;
  std::uint64_t seed_flag = 0;
  std::string out_flag;
  int jobs_flag = 0;

  app.add_option("--config", config_path, "JSON experiment config (defaults used when omitted)");
  app.add_option("--seed", seed_flag, "Base seed override");
  app.add_option("--out", out_flag, "Output directory override");
  app.add_option("--jobs", jobs_flag, "Parallel trial workers (results are jobs-invariant)");

  CLI::App* fit = app.add_subcommand("fit", "Fit one regularized Huber model");
  CLI::App* verify = app.add_subcommand("verify", "Run one theorem check");
  verify->add_option("theorem_id", theorem_id, "lemma1|thm2|prop1|thm1|thm3|thm4")->required();
  CLI::App* rates = app.add_subcommand("rates", "Convergence-rate sweep under the tuning rule");
  CLI::App* compare = app.add_subcommand("compare", "Huber vs kernel ridge on matched datasets");
  for (CLI::App* sub : {fit, verify, rates, compare}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }

  try {
    ExperimentConfig cfg = hkreg::load_config(
        config_path.empty() ? std::nullopt : std::optional<std::string>(config_path));
    hkreg::apply_overrides(
        cfg, app.count("--seed") ? std::optional<std::uint64_t>(seed_flag) : std::nullopt,
        app.count("--out") ? std::optional<std::string>(out_flag) : std::nullopt,
        app.count("--jobs") ? std::optional<int>(jobs_flag) : std::nullopt);

    if (fit->parsed()) return cmd_fit(cfg);
    if (verify->parsed()) return cmd_verify(cfg, theorem_id);
    if (rates->parsed()) return cmd_rates(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
    return 64;
  } catch (const hkreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const hkreg::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const hkreg::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
}
