#include "hkreg/config.hpp"

#include <fstream>
#include <set>

namespace hkreg {

namespace {

void require_keys(const Json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config error at " + path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      throw ConfigError("config error: unknown key '" + path + "." + it.key() + "'");
}

double require_number(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("config error: missing key '" + path + "." + key + "'");
  if (!obj[key].is_number()) throw ConfigError("config error at " + path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

double number_or(const Json& obj, const std::string& path, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("config error at " + path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

std::vector<double> number_list(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_array())
    throw ConfigError("config error at " + path + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError("config error at " + path + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void validate_target(const Json& j, const std::string& path) {
  if (!j.contains("family")) throw ConfigError("config error: missing key '" + path + ".family'");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "constant") {
    require_keys(j, path, {"family", "value"});
    require_number(j, path, "value");
  } else if (fam == "sinusoid") {
    require_keys(j, path, {"family", "amplitude", "frequency"});
    require_number(j, path, "amplitude");
    require_number(j, path, "frequency");
  } else if (fam == "rkhs_element") {
    require_keys(j, path, {"family", "support", "coefficients"});
    const auto s = number_list(j, path, "support");
    const auto c = number_list(j, path, "coefficients");
    if (s.empty() || s.size() != c.size())
      throw ConfigError("config error at " + path + ": support/coefficients must match and be nonempty");
  } else {
    throw ConfigError("config error at " + path + ".family: unknown target family '" + fam + "'");
  }
}

void validate_noise(const Json& j, const std::string& path) {
  if (!j.contains("family")) throw ConfigError("config error: missing key '" + path + ".family'");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "gaussian") {
    require_keys(j, path, {"family", "sd", "epsilon"});
    require_number(j, path, "sd");
  } else if (fam == "student_t") {
    require_keys(j, path, {"family", "dof", "scale", "epsilon"});
    require_number(j, path, "dof");
    require_number(j, path, "scale");
  } else if (fam == "symmetric_pareto") {
    require_keys(j, path, {"family", "tail_exponent", "scale", "epsilon"});
    require_number(j, path, "tail_exponent");
    require_number(j, path, "scale");
  } else if (fam == "asym_two_exp") {
    require_keys(j, path, {"family", "epsilon"});
  } else {
    throw ConfigError("config error at " + path + ".family: unknown noise family '" + fam + "'");
  }
  require_number(j, path, "epsilon");
}

void validate_marginal(const Json& j, const std::string& path) {
  if (!j.contains("family")) throw ConfigError("config error: missing key '" + path + ".family'");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "uniform_interval") {
    require_keys(j, path, {"family", "lo", "hi"});
    require_number(j, path, "lo");
    require_number(j, path, "hi");
  } else if (fam == "weighted_grid") {
    require_keys(j, path, {"family", "points", "weights"});
    number_list(j, path, "points");
    number_list(j, path, "weights");
  } else {
    throw ConfigError("config error at " + path + ".family: unknown marginal family '" + fam + "'");
  }
}

void validate_kernel(const Json& j, const std::string& path) {
  if (!j.contains("family")) throw ConfigError("config error: missing key '" + path + ".family'");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "gaussian" || fam == "laplacian") {
    require_keys(j, path, {"family", "bandwidth"});
    require_number(j, path, "bandwidth");
  } else if (fam == "polynomial") {
    require_keys(j, path, {"family", "degree", "offset"});
    require_number(j, path, "degree");
    require_number(j, path, "offset");
  } else {
    throw ConfigError("config error at " + path + ".family: unknown kernel family '" + fam + "'");
  }
}

void validate_scenario(const Json& j, const std::string& path) {
  require_keys(j, path, {"target", "marginal", "noise", "kernel", "probe_points"});
  if (j.contains("target")) validate_target(j["target"], path + ".target");
  if (j.contains("marginal")) validate_marginal(j["marginal"], path + ".marginal");
  if (j.contains("noise")) validate_noise(j["noise"], path + ".noise");
  if (j.contains("kernel")) validate_kernel(j["kernel"], path + ".kernel");
  if (j.contains("probe_points") && (!j["probe_points"].is_number_integer() ||
                                     j["probe_points"].get<int>() < 1))
    throw ConfigError("config error at " + path + ".probe_points: expected a positive integer");
}

void validate_user_config(const Json& j) {
  require_keys(j, "config",
               {"base_seed", "output_dir", "jobs", "quadrature", "scenario", "fit", "verify",
                "rates", "compare"});
  if (j.contains("base_seed") && (!j["base_seed"].is_number_integer() || j["base_seed"].get<long long>() < 0))
    throw ConfigError("config error at config.base_seed: expected a nonnegative integer");
  if (j.contains("output_dir") && !j["output_dir"].is_string())
    throw ConfigError("config error at config.output_dir: expected a string");
  if (j.contains("jobs") && (!j["jobs"].is_number_integer() || j["jobs"].get<int>() < 1))
    throw ConfigError("config error at config.jobs: expected a positive integer");
  if (j.contains("quadrature")) {
    require_keys(j["quadrature"], "config.quadrature", {"nodes", "inner_tolerance"});
    if (j["quadrature"].contains("nodes") && (!j["quadrature"]["nodes"].is_number_integer() ||
                                              j["quadrature"]["nodes"].get<int>() < 3))
      throw ConfigError("config error at config.quadrature.nodes: expected an integer >= 3");
    if (j["quadrature"].contains("inner_tolerance") &&
        !(number_or(j["quadrature"], "config.quadrature", "inner_tolerance", 1e-9) > 0.0))
      throw ConfigError("config error at config.quadrature.inner_tolerance: must be positive");
  }
  if (j.contains("scenario")) validate_scenario(j["scenario"], "config.scenario");
  if (j.contains("fit")) {
    require_keys(j["fit"], "config.fit",
                 {"sigma", "lambda", "n", "tol_objective", "tol_gradient", "max_iterations"});
    if (j["fit"].contains("n") && (!j["fit"]["n"].is_number_integer() || j["fit"]["n"].get<int>() < 1))
      throw ConfigError("config error at config.fit.n: expected a positive integer");
  }
  if (j.contains("verify")) {
    require_keys(j["verify"], "config.verify", {"lemma1", "thm2", "prop1", "thm3", "thm1", "thm4"});
    const Json& v = j["verify"];
    if (v.contains("lemma1"))
      require_keys(v["lemma1"], "config.verify.lemma1", {"sigma_grid", "lambda_grid", "trials_per_cell", "n"});
    if (v.contains("thm2"))
      require_keys(v["thm2"], "config.verify.thm2", {"sigma", "lambda", "trials", "n", "delta", "epsilon"});
    if (v.contains("prop1"))
      require_keys(v["prop1"], "config.verify.prop1", {"sigma_grid", "lambda_grid", "epsilon"});
    if (v.contains("thm3")) require_keys(v["thm3"], "config.verify.thm3", {"sigma_grid", "count", "epsilon"});
    if (v.contains("thm1")) require_keys(v["thm1"], "config.verify.thm1", {"lambda", "sigma_grid", "epsilon"});
    if (v.contains("thm4")) require_keys(v["thm4"], "config.verify.thm4", {"sigma_grid", "count", "epsilon"});
  }
  if (j.contains("rates")) {
    require_keys(j["rates"], "config.rates", {"n_grid", "reps", "epsilon", "beta", "q", "eta"});
    if (j["rates"].contains("reps") &&
        (!j["rates"]["reps"].is_number_integer() || j["rates"]["reps"].get<int>() < 1))
      throw ConfigError("config error at config.rates.reps: expected a positive integer");
    if (j["rates"].contains("n_grid")) {
      if (!j["rates"]["n_grid"].is_array() || j["rates"]["n_grid"].empty())
        throw ConfigError("config error at config.rates.n_grid: expected a nonempty array");
      for (const auto& v : j["rates"]["n_grid"])
        if (!v.is_number_integer() || v.get<int>() < 1)
          throw ConfigError("config error at config.rates.n_grid: entries must be positive integers");
    }
  }
  if (j.contains("compare"))
    require_keys(j["compare"], "config.compare", {"sigma", "lambda", "n", "reps"});
}

void deep_merge(Json& base, const Json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object())
      deep_merge(base[it.key()], *it);
    else
      base[it.key()] = *it;
  }
}

}  // namespace

Json default_config() {
  Json j;
  j["base_seed"] = 1;
  j["output_dir"] = "out";
  j["jobs"] = 1;
  j["quadrature"] = {{"nodes", 129}, {"inner_tolerance", 1e-9}};
  j["fit"] = {{"sigma", 4.0},         {"lambda", 0.01},           {"n", 200},
              {"tol_objective", 1e-10}, {"tol_gradient", 0.0}, {"max_iterations", 500}};
  j["verify"]["lemma1"] = {{"sigma_grid", {2.0, 4.0, 8.0}},
                           {"lambda_grid", {1e-3, 1e-2, 1e-1}},
                           {"trials_per_cell", 12},
                           {"n", 200}};
  j["verify"]["thm2"] = {{"sigma", 4.0}, {"lambda", 0.01}, {"trials", 500}, {"n", 200}, {"delta", 0.2}};
  j["verify"]["prop1"] = {{"sigma_grid", {2.0, 4.0, 8.0}}, {"lambda_grid", {1e-3, 1e-2, 1e-1}}};
  j["verify"]["thm3"] = {{"sigma_grid", {4.0, 8.0, 16.0, 32.0}}, {"count", 200}};
  j["verify"]["thm1"] = {{"lambda", 0.01}, {"sigma_grid", {2.0, 4.0, 8.0, 16.0, 32.0}}};
  j["verify"]["thm4"] = {{"sigma_grid", {32.0, 64.0, 128.0, 256.0}}, {"count", 100}};
  j["rates"] = {{"n_grid", {200, 400, 800, 1600, 3200}}, {"reps", 20}, {"epsilon", 0.45},
                {"beta", 1.0},  {"q", 1.0},  {"eta", 1.0}};
  j["compare"] = {{"sigma", 4.0}, {"lambda", 0.01}, {"n", 400}, {"reps", 20}};
  return j;
}

Json default_scenario(const std::string& purpose) {
  Json s;
  s["target"] = {{"family", "sinusoid"}, {"amplitude", 0.5}, {"frequency", 1.0}};
  s["marginal"] = {{"family", "uniform_interval"}, {"lo", 0.0}, {"hi", 1.0}};
  s["kernel"] = {{"family", "gaussian"}, {"bandwidth", 0.25}};
  s["probe_points"] = 1024;
  if (purpose == "bias") {
    s["noise"] = {{"family", "asym_two_exp"}, {"epsilon", 1.0}};
  } else if (purpose == "rates") {
    s["target"] = {{"family", "rkhs_element"},
                   {"support", {0.2, 0.5, 0.8}},
                   {"coefficients", {0.5, -0.3, 0.4}}};
    s["noise"] = {{"family", "student_t"}, {"dof", 1.5}, {"scale", 1.0}, {"epsilon", 0.45}};
  } else {
    s["noise"] = {{"family", "student_t"}, {"dof", 2.5}, {"scale", 1.0}, {"epsilon", 1.0}};
  }
  return s;
}

Json ExperimentConfig::scenario_json(const std::string& purpose) const {
  if (has_user_scenario) return doc["scenario"];
  return default_scenario(purpose);
}

Json ExperimentConfig::snapshot(const std::string& command, const Json& scenario_used) const {
  Json snap;
  snap["schema_version"] = 1;
  snap["command"] = command;
  snap["base_seed"] = base_seed;
  snap["quadrature"] = doc["quadrature"];
  snap["scenario"] = scenario_used;
  if (command == "fit") snap["fit"] = doc["fit"];
  if (command == "verify") snap["verify"] = doc["verify"];
  if (command == "rates") snap["rates"] = doc["rates"];
  if (command == "compare") snap["compare"] = doc["compare"];
  return snap;
}

ExperimentConfig load_config(const std::optional<std::string>& path) {
  Json user = Json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config error: cannot open '" + *path + "'");
    try {
      user = Json::parse(in);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
    }
  }
  validate_user_config(user);

  ExperimentConfig cfg;
  cfg.doc = default_config();
  const bool has_scenario = user.contains("scenario");
  deep_merge(cfg.doc, user);
  cfg.has_user_scenario = has_scenario;
  cfg.base_seed = cfg.doc["base_seed"].get<std::uint64_t>();
  cfg.output_dir = cfg.doc["output_dir"].get<std::string>();
  cfg.jobs = cfg.doc["jobs"].get<int>();
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::string> out_dir, std::optional<int> jobs) {
  if (seed) {
    cfg.base_seed = *seed;
    cfg.doc["base_seed"] = *seed;
  }
  if (out_dir) {
    cfg.output_dir = *out_dir;
    cfg.doc["output_dir"] = *out_dir;
  }
  if (jobs) {
    if (*jobs < 1) throw ConfigError("config error: --jobs must be a positive integer");
    cfg.jobs = *jobs;
    cfg.doc["jobs"] = *jobs;
  }
}

KernelSpec kernel_from_json(const Json& j) {
  const std::string fam = j["family"].get<std::string>();
  if (fam == "gaussian") return KernelSpec::Gaussian(j["bandwidth"].get<double>());
  if (fam == "laplacian") return KernelSpec::Laplacian(j["bandwidth"].get<double>());
  return KernelSpec::Polynomial(j["degree"].get<int>(), j["offset"].get<double>());
}

Json kernel_to_json(const KernelSpec& spec) {
  Json j;
  switch (spec.family) {
    case KernelFamily::kGaussian:
      j["family"] = "gaussian";
      j["bandwidth"] = spec.bandwidth;
      break;
    case KernelFamily::kLaplacian:
      j["family"] = "laplacian";
      j["bandwidth"] = spec.bandwidth;
      break;
    case KernelFamily::kPolynomial:
      j["family"] = "polynomial";
      j["degree"] = spec.degree;
      j["offset"] = spec.offset;
      break;
  }
  return j;
}

Scenario build_scenario(const Json& j) {
  Scenario s;
  s.kernel = kernel_from_json(j["kernel"]);

  const Json& mj = j["marginal"];
  if (mj["family"].get<std::string>() == "uniform_interval") {
    s.marginal = MarginalX::Uniform(mj["lo"].get<double>(), mj["hi"].get<double>());
  } else {
    Points pts;
    for (const auto& v : mj["points"]) {
      Point p(1);
      p[0] = v.get<double>();
      pts.push_back(p);
    }
    Vector w(static_cast<Eigen::Index>(mj["weights"].size()));
    Eigen::Index i = 0;
    for (const auto& v : mj["weights"]) w[i++] = v.get<double>();
    s.marginal = MarginalX::WeightedGrid(std::move(pts), std::move(w));
  }

  const Json& tj = j["target"];
  const std::string tfam = tj["family"].get<std::string>();
  if (tfam == "constant") {
    s.target = TargetFunction::Constant(tj["value"].get<double>());
  } else if (tfam == "sinusoid") {
    s.target = TargetFunction::Sinusoid(tj["amplitude"].get<double>(), tj["frequency"].get<double>());
  } else {
    RepresenterFunction g;
    g.kernel = s.kernel;
    for (const auto& v : tj["support"]) {
      Point p(1);
      p[0] = v.get<double>();
      g.support.push_back(p);
    }
    g.coefficients = Vector(static_cast<Eigen::Index>(tj["coefficients"].size()));
    Eigen::Index i = 0;
    for (const auto& v : tj["coefficients"]) g.coefficients[i++] = v.get<double>();
    Points probe = make_probe_grid(s.marginal, 1024);
    s.target = TargetFunction::RkhsElement(std::move(g), &probe);
  }

  const Json& nj = j["noise"];
  const std::string nfam = nj["family"].get<std::string>();
  const double eps = nj["epsilon"].get<double>();
  if (nfam == "gaussian") {
    s.noise = NoiseModel::Gaussian(nj["sd"].get<double>(), eps);
  } else if (nfam == "student_t") {
    s.noise = NoiseModel::StudentT(nj["dof"].get<double>(), nj["scale"].get<double>(), eps);
  } else if (nfam == "symmetric_pareto") {
    s.noise = NoiseModel::SymmetricPareto(nj["tail_exponent"].get<double>(), nj["scale"].get<double>(), eps);
  } else {
    s.noise = NoiseModel::AsymTwoExp(eps);
  }

  s.probe_grid = make_probe_grid(s.marginal, j["probe_points"].get<int>());
  s.validate();
  return s;
}

}  // namespace hkreg
