#include "hkreg/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hkreg {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("write_csv: cannot open '" + path + "'");
  out << "# schema_version 1\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_g17(row[c]);
    out << "\n";
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("write_json_file: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

Json model_to_json(const FittedModel& model) {
  Json j;
  j["schema_version"] = 1;
  j["kernel"] = kernel_to_json(model.function.kernel);
  j["sigma"] = model.sigma;
  j["lambda"] = model.lambda;
  Json support = Json::array();
  for (const Point& p : model.function.support) {
    Json q = Json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) q.push_back(p[i]);
    support.push_back(q);
  }
  j["support_points"] = support;
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < model.function.coefficients.size(); ++i)
    coeffs.push_back(model.function.coefficients[i]);
  j["coefficients"] = coeffs;
  j["rkhs_norm"] = model.rkhs_norm;
  j["sup_norm_probe"] = model.sup_norm_probe;
  j["objective_value"] = model.objective_value;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["gradient_norm"] = model.gradient_norm;
  return j;
}

Json report_to_json(const TheoremReport& report) {
  Json j;
  j["schema_version"] = 1;
  j["theorem_id"] = report.theorem_id;
  j["verdict"] = report.pass ? "pass" : "fail";
  j["measured_margin"] = report.measured_margin;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["details"] = report.details;
  j["config"] = report.config_snapshot;
  return j;
}

std::pair<std::string, std::string> write_theorem_report(const std::string& dir,
                                                         const TheoremReport& report) {
  std::filesystem::create_directories(dir);
  const std::string stem = dir + "/" + report.theorem_id + "_" + std::to_string(report.seed);
  const std::string json_path = stem + ".json";
  const std::string csv_path = stem + ".csv";
  write_json_file(json_path, report_to_json(report));
  write_csv(csv_path, report.csv_columns, report.csv_rows);
  return {json_path, csv_path};
}

void write_predictions_csv(const std::string& path, const FittedModel& model, const Points& probe) {
  std::vector<std::vector<double>> rows;
  rows.reserve(probe.size());
  for (const Point& p : probe) {
    std::vector<double> row;
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p[i]);
    row.push_back(eval_function(model.function, p));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> cols;
  const Eigen::Index dim = probe.empty() ? 1 : probe.front().size();
  for (Eigen::Index i = 0; i < dim; ++i) cols.push_back("x" + std::to_string(i));
  cols.push_back("prediction");
  write_csv(path, cols, rows);
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::vector<double>> rows;
  rows.reserve(data.xs.size());
  for (int i = 0; i < data.n(); ++i) {
    std::vector<double> row;
    const Point& p = data.xs[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < p.size(); ++k) row.push_back(p[k]);
    row.push_back(data.ys[static_cast<std::size_t>(i)]);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> cols;
  const Eigen::Index dim = data.xs.empty() ? 1 : data.xs.front().size();
  for (Eigen::Index i = 0; i < dim; ++i) cols.push_back("x" + std::to_string(i));
  cols.push_back("y");
  write_csv(path, cols, rows);
}

void write_rate_summary_csv(const std::string& path, const std::vector<RateSummaryRow>& rows) {
  std::vector<std::vector<double>> data;
  for (const RateSummaryRow& r : rows)
    data.push_back({static_cast<double>(r.n), r.sigma, r.lambda, r.huber_median, r.huber_q1,
                    r.huber_q3, r.ridge_median, r.ridge_q1, r.ridge_q3,
                    static_cast<double>(r.failures)});
  write_csv(path,
            {"n", "sigma", "lambda", "huber_median", "huber_q1", "huber_q3", "ridge_median",
             "ridge_q1", "ridge_q3", "failures"},
            data);
}

}  // namespace hkreg
