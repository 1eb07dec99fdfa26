#include "wavecast/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wavecast::eval {

namespace {

void require_pair(const std::vector<double>& truth,
                  const std::vector<double>& pred) {
  if (truth.empty()) throw EmptyInput("no samples to score");
  if (truth.size() != pred.size()) {
    throw LengthMismatch("truth has " + std::to_string(truth.size()) +
                         " values, prediction has " +
                         std::to_string(pred.size()));
  }
}

// Lower-triangular Cholesky of a symmetric matrix stored row-major.
// Fails when a pivot is not safely positive, i.e. the system is singular
// to working precision.
std::vector<double> cholesky(std::vector<double> a, std::size_t n) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  }
  const double tiny = std::max(max_diag, 1.0) * 1e-13;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= tiny) {
      throw SingularSystem("normal equations are rank deficient at column " +
                           std::to_string(j) +
                           "; add regularization or features");
    }
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / l;
    }
  }
  return a;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t n,
                                   std::vector<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * b[k];
    b[ii] = s / l[ii * n + ii];
  }
  return b;
}

}  // namespace

double mse(const std::vector<double>& truth, const std::vector<double>& pred) {
  require_pair(truth, pred);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    acc += d * d;
  }
  return acc / static_cast<double>(truth.size());
}

double r2(const std::vector<double>& truth, const std::vector<double>& pred) {
  require_pair(truth, pred);
  if (truth.size() < 2) {
    throw EmptyInput("r2 needs at least two samples, got " +
                     std::to_string(truth.size()));
  }
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());

  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  }
  if (ss_tot == 0.0) {
    throw ConstantTruth("truth is constant (" + std::to_string(mean) +
                        "); r2 is undefined");
  }
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> baseline_persistence(
    const std::vector<data::Sample>& samples, std::size_t swh_index) {
  if (samples.empty()) throw EmptyInput("no samples for persistence");
  std::vector<double> out;
  for (const data::Sample& s : samples) {
    if (swh_index >= s.window.size() || s.window[swh_index].empty()) {
      throw MissingSwhHistory("sample lacks an SWH channel at index " +
                              std::to_string(swh_index));
    }
    const double last = s.window[swh_index].back();
    for (std::size_t j = 0; j < s.target.size(); ++j) out.push_back(last);
  }
  return out;
}

std::vector<double> flatten_targets(const std::vector<data::Sample>& samples) {
  std::vector<double> out;
  for (const data::Sample& s : samples) {
    out.insert(out.end(), s.target.begin(), s.target.end());
  }
  return out;
}

std::vector<double> flatten_window(const data::Sample& sample) {
  std::vector<double> out;
  for (const auto& channel : sample.window) {
    out.insert(out.end(), channel.begin(), channel.end());
  }
  return out;
}

RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& target, double lambda) {
  if (features.empty()) throw EmptyInput("no training rows for ridge");
  if (features.size() != target.size()) {
    throw LengthMismatch(std::to_string(features.size()) + " feature rows vs " +
                         std::to_string(target.size()) + " targets");
  }
  if (lambda < 0.0) throw Error("ridge lambda must be >= 0");
  const std::size_t n = features.size();
  const std::size_t d = features.front().size();
  if (d == 0) throw EmptyInput("feature rows are empty");
  for (const auto& row : features) {
    if (row.size() != d) {
      throw LengthMismatch("ragged feature rows: " + std::to_string(d) +
                           " vs " + std::to_string(row.size()));
    }
  }

  std::vector<double> x_mean(d, 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x_mean[j] += features[i][j];
    y_mean += target[i];
  }
  for (double& m : x_mean) m /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  std::vector<double> gram(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> xc(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xc[j] = features[i][j] - x_mean[j];
    const double yc = target[i] - y_mean;
    for (std::size_t j = 0; j < d; ++j) {
      rhs[j] += xc[j] * yc;
      for (std::size_t k = j; k < d; ++k) gram[j * d + k] += xc[j] * xc[k];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) gram[j * d + k] = gram[k * d + j];
    gram[j * d + j] += lambda;
  }

  const std::vector<double> chol = cholesky(gram, d);
  RidgeModel model;
  model.weights = cholesky_solve(chol, d, rhs);
  model.intercept = y_mean;
  for (std::size_t j = 0; j < d; ++j) {
    model.intercept -= model.weights[j] * x_mean[j];
  }
  return model;
}

double ridge_predict(const RidgeModel& model, const std::vector<double>& x) {
  if (x.size() != model.weights.size()) {
    throw LengthMismatch("ridge expects " +
                         std::to_string(model.weights.size()) +
                         " features, got " + std::to_string(x.size()));
  }
  double v = model.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) v += model.weights[j] * x[j];
  return v;
}

std::vector<RidgeModel> fit_ridge_per_step(
    const std::vector<data::Sample>& samples, double lambda) {
  if (samples.empty()) throw EmptyInput("no samples for ridge baseline");
  const std::size_t horizon = samples.front().target.size();
  std::vector<std::vector<double>> features;
  features.reserve(samples.size());
  for (const data::Sample& s : samples) {
    features.push_back(flatten_window(s));
  }
  std::vector<RidgeModel> models;
  models.reserve(horizon);
  for (std::size_t j = 0; j < horizon; ++j) {
    std::vector<double> target(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      target[i] = samples[i].target[j];
    }
    models.push_back(fit_ridge(features, target, lambda));
  }
  return models;
}

std::vector<double> ridge_forecast(const std::vector<RidgeModel>& models,
                                   const std::vector<data::Sample>& samples) {
  if (models.empty()) throw EmptyInput("no ridge models");
  std::vector<double> out;
  for (const data::Sample& s : samples) {
    const std::vector<double> x = flatten_window(s);
    for (const RidgeModel& m : models) out.push_back(ridge_predict(m, x));
  }
  return out;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  j["seed"] = report.seed;
  j["split"] = report.split;
  j["mse"] = report.mse;
  j["r2"] = report.r2;
  j["n"] = report.n;
  j["units"] = report.units;
  j["config_hash"] = report.config_hash;
  return j.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw BadReport(std::string("cannot parse report JSON: ") + e.what());
  }
  MetricReport r;
  try {
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.split = j.at("split").get<std::string>();
    r.mse = j.at("mse").get<double>();
    r.r2 = j.at("r2").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.units = j.at("units").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
  } catch (const std::exception& e) {
    throw BadReport(std::string("report JSON missing field: ") + e.what());
  }
  if (r.mse < 0.0 || r.n == 0) {
    throw BadReport("report violates mse >= 0 or n >= 1");
  }
  return r;
}

void write_prediction_csv(const std::string& path,
                          const std::vector<double>& truth,
                          const std::vector<double>& pred,
                          const std::string& comment) {
  require_pair(truth, pred);
  std::ostringstream out;
  if (!comment.empty()) {
    std::stringstream cs(comment);
    std::string cl;
    while (std::getline(cs, cl)) out << "# " << cl << "\n";
  }
  out << "index,truth,prediction\n";
  char buf[96];
  for (std::size_t i = 0; i < truth.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, truth[i],
                  pred[i]);
    out << buf;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw BadPredictionFile("cannot open '" + tmp + "' for writing");
    f << out.str();
    if (!f) throw BadPredictionFile("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw BadPredictionFile("cannot move '" + tmp + "' into place");
  }
}

PredictionPairs read_prediction_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadPredictionFile("cannot open '" + path + "'");
  PredictionPairs out;
  std::string line;
  bool saw_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "index,truth,prediction") {
        throw BadPredictionFile("line " + std::to_string(line_no) +
                                ": unexpected header '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    std::size_t idx = 0;
    double t = 0.0, p = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &idx, &t, &p) != 3) {
      throw BadPredictionFile("line " + std::to_string(line_no) +
                              ": cannot parse '" + line + "'");
    }
    out.truth.push_back(t);
    out.pred.push_back(p);
  }
  if (!saw_header) throw BadPredictionFile("'" + path + "' has no header");
  return out;
}

}  // namespace wavecast::eval
