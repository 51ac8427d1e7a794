#ifndef COGSPEECH_MODEL_PIPELINE_H_
#define COGSPEECH_MODEL_PIPELINE_H_

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "cogspeech/model/estimators.h"
#include "cogspeech/model/preprocessing.h"

namespace cogspeech::model {

enum class TargetKind { kRegression, kClassification };
std::string_view ToString(TargetKind k);

enum class EstimatorKind { kRidge, kLinearSvm };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kRidge;
  double lambda = 1.0;    // ridge
  double c = 1.0;         // svm
  bool balanced = false;  // svm
  bool operator==(const EstimatorConfig&) const = default;
};

// z-score -> PCA -> estimator. For classification, ridge is fitted to
// +-1 targets and predicts by sign.
struct PipelineConfig {
  PcaMode pca;
  EstimatorConfig estimator;
  bool operator==(const PipelineConfig&) const = default;
};

// e.g. "pca=passthrough;ridge(lambda=1)" or "pca=0.95;svm(C=1,balanced)".
std::string ToString(const PipelineConfig& cfg);
// Inverse of ToString; throws ConfigError.
PipelineConfig ParsePipelineConfig(std::string_view s);

// pca {passthrough, 0.95, 0.99} x (ridge lambda {0.01, 0.1, 1, 10, 100},
// svm C {0.01, 0.1, 1, 10} x balanced {on, off}); SVM entries are dropped
// for regression targets.
std::vector<PipelineConfig> DefaultPipelineGrid(TargetKind kind);

// JSON grid {"pca": ["passthrough", 0.95], "ridge_lambda": [...],
// "svm_c": [...], "svm_balanced": [true, false]}; absent keys take the
// defaults above. SVM entries are dropped for regression targets.
std::vector<PipelineConfig> ParsePipelineGrid(std::string_view json_text, TargetKind kind);

struct FittedPipeline {
  PipelineConfig config;
  TargetKind kind = TargetKind::kRegression;
  Scaler scaler;
  PcaModel pca;
  LinearModel estimator;

  // Regression: predicted value. Classification: label 0 or 1.
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const;
};

// Classification targets are labels 0/1 (1 = positive class).
FittedPipeline FitPipeline(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const PipelineConfig& cfg, TargetKind kind);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_PIPELINE_H_
