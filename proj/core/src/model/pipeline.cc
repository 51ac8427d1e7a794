#include "cogspeech/model/pipeline.h"

#include <cmath>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"
#include "json.hpp"

namespace cogspeech::model {
namespace {

const std::vector<double> kDefaultPca = {0.95, 0.99};
const std::vector<double> kDefaultLambda = {0.01, 0.1, 1, 10, 100};
const std::vector<double> kDefaultC = {0.01, 0.1, 1, 10};

std::vector<PipelineConfig> Expand(const std::vector<PcaMode>& pcas,
                                   const std::vector<double>& lambdas,
                                   const std::vector<double>& cs,
                                   const std::vector<bool>& balanced, TargetKind kind) {
  std::vector<PipelineConfig> grid;
  for (const PcaMode& p : pcas) {
    for (double l : lambdas) grid.push_back({p, {EstimatorKind::kRidge, l, 1.0, false}});
    if (kind == TargetKind::kRegression) continue;
    for (double c : cs) {
      for (bool b : balanced) grid.push_back({p, {EstimatorKind::kLinearSvm, 1.0, c, b}});
    }
  }
  if (grid.empty()) throw ConfigError("model grid is empty");
  return grid;
}

double Number(std::string_view s, std::string_view what) {
  auto d = ParseDouble(Trim(s));
  if (!d || !std::isfinite(*d)) {
    throw ConfigError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return *d;
}

}  // namespace

std::string_view ToString(TargetKind k) {
  return k == TargetKind::kRegression ? "regression" : "classification";
}

std::string ToString(const PipelineConfig& cfg) {
  std::string s = "pca=";
  s += cfg.pca.passthrough ? "passthrough" : FormatDouble(cfg.pca.threshold);
  s += ";";
  if (cfg.estimator.kind == EstimatorKind::kRidge) {
    s += "ridge(lambda=" + FormatDouble(cfg.estimator.lambda) + ")";
  } else {
    s += "svm(C=" + FormatDouble(cfg.estimator.c) +
         (cfg.estimator.balanced ? ",balanced)" : ",unweighted)");
  }
  return s;
}

PipelineConfig ParsePipelineConfig(std::string_view s) {
  const auto semi = s.find(';');
  if (s.substr(0, 4) != "pca=" || semi == std::string_view::npos) {
    throw ConfigError("bad pipeline config '" + std::string(s) + "'");
  }
  PipelineConfig cfg;
  const std::string_view pca = s.substr(4, semi - 4);
  cfg.pca = pca == "passthrough" ? PcaMode::Passthrough()
                                 : PcaMode::Variance(Number(pca, "PCA threshold"));
  const std::string_view est = s.substr(semi + 1);
  if (est.starts_with("ridge(lambda=") && est.ends_with(")")) {
    cfg.estimator = {EstimatorKind::kRidge, Number(est.substr(13, est.size() - 14), "lambda"),
                     1.0, false};
  } else if (est.starts_with("svm(C=") && est.ends_with(")")) {
    const std::string_view body = est.substr(6, est.size() - 7);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ConfigError("bad svm config '" + std::string(est) + "'");
    const std::string_view w = body.substr(comma + 1);
    if (w != "balanced" && w != "unweighted") throw ConfigError("bad svm weighting '" + std::string(w) + "'");
    cfg.estimator = {EstimatorKind::kLinearSvm, 1.0, Number(body.substr(0, comma), "C"),
                     w == "balanced"};
  } else {
    throw ConfigError("bad estimator '" + std::string(est) + "'");
  }
  return cfg;
}

std::vector<PipelineConfig> DefaultPipelineGrid(TargetKind kind) {
  std::vector<PcaMode> pcas = {PcaMode::Passthrough()};
  for (double t : kDefaultPca) pcas.push_back(PcaMode::Variance(t));
  return Expand(pcas, kDefaultLambda, kDefaultC, {true, false}, kind);
}

std::vector<PipelineConfig> ParsePipelineGrid(std::string_view json_text, TargetKind kind) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model grid: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model grid: expected a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k != "pca" && k != "ridge_lambda" && k != "svm_c" && k != "svm_balanced") {
      throw ConfigError("model grid: unknown key '" + k + "'");
    }
    if (!v.is_array() || v.empty()) throw ConfigError("model grid: '" + k + "' must be a non-empty array");
  }
  std::vector<PcaMode> pcas;
  if (doc.contains("pca")) {
    for (const auto& v : doc["pca"]) {
      if (v.is_string() && v.get<std::string>() == "passthrough") pcas.push_back(PcaMode::Passthrough());
      else if (v.is_number()) pcas.push_back(PcaMode::Variance(v.get<double>()));
      else throw ConfigError("model grid: pca entries are \"passthrough\" or a fraction");
    }
  } else {
    pcas.push_back(PcaMode::Passthrough());
    for (double t : kDefaultPca) pcas.push_back(PcaMode::Variance(t));
  }
  auto numbers = [&](const char* key, const std::vector<double>& def) {
    if (!doc.contains(key)) return def;
    std::vector<double> out;
    for (const auto& v : doc[key]) {
      if (!v.is_number()) throw ConfigError(std::string("model grid: '") + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  std::vector<bool> balanced = {true, false};
  if (doc.contains("svm_balanced")) {
    balanced.clear();
    for (const auto& v : doc["svm_balanced"]) {
      if (!v.is_boolean()) throw ConfigError("model grid: 'svm_balanced' must hold booleans");
      balanced.push_back(v.get<bool>());
    }
  }
  return Expand(pcas, numbers("ridge_lambda", kDefaultLambda), numbers("svm_c", kDefaultC),
                balanced, kind);
}

Eigen::VectorXd FittedPipeline::Predict(const Eigen::MatrixXd& x) const {
  const Eigen::VectorXd d = estimator.Decision(pca.Apply(scaler.Apply(x)));
  if (kind == TargetKind::kRegression) return d;
  return (d.array() > 0.0).cast<double>();
}

FittedPipeline FitPipeline(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const PipelineConfig& cfg, TargetKind kind) {
  FittedPipeline p;
  p.config = cfg;
  p.kind = kind;
  p.scaler = ZScoreFit(x);
  const Eigen::MatrixXd z = p.scaler.Apply(x);
  p.pca = PcaFit(z, cfg.pca);
  const Eigen::MatrixXd feats = p.pca.Apply(z);
  Eigen::VectorXd target = y;
  if (kind == TargetKind::kClassification) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) throw ValidationError("class labels must be 0 or 1");
      target[i] = y[i] == 1.0 ? 1.0 : -1.0;
    }
  }
  if (cfg.estimator.kind == EstimatorKind::kRidge) {
    p.estimator = RidgeFit(feats, target, cfg.estimator.lambda);
  } else {
    if (kind == TargetKind::kRegression) {
      throw ConfigError("linear SVM is a classifier; use ridge for regression targets");
    }
    p.estimator =
        LinearSvmFit(feats, target, {cfg.estimator.c, cfg.estimator.balanced, 1e-8, 0}).model;
  }
  return p;
}

}  // namespace cogspeech::model
