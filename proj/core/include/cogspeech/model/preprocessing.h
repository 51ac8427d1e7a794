#ifndef COGSPEECH_MODEL_PREPROCESSING_H_
#define COGSPEECH_MODEL_PREPROCESSING_H_

#include <Eigen/Dense>
#include <vector>

namespace cogspeech::model {

// Column standardisation with population SD. NaN cells are ignored when
// fitting and replaced by the column mean (0 after scaling) when applying.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  // Columns with zero variance (or no finite value); they map to 0.
  std::vector<bool> constant;

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
};

// Throws ValidationError on an empty matrix or infinite cells.
Scaler ZScoreFit(const Eigen::MatrixXd& x);

struct PcaMode {
  bool passthrough = true;
  // Cumulative explained-variance fraction in (0, 1].
  double threshold = 0.95;

  static PcaMode Passthrough() { return {true, 0.0}; }
  static PcaMode Variance(double t) { return {false, t}; }
  bool operator==(const PcaMode&) const = default;
};

struct PcaModel {
  PcaMode mode;
  Eigen::VectorXd mean;
  // Columns are principal directions, by decreasing variance; each is
  // signed so its largest-magnitude entry is positive.
  Eigen::MatrixXd components;
  // Variance share of every direction of the fit (not only the kept ones).
  Eigen::VectorXd explained_ratio;

  Eigen::Index kept() const { return components.cols(); }
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
};

// Keeps the smallest k whose cumulative explained variance reaches the
// threshold, at least 1. Passthrough stores nothing and Apply returns the
// input unchanged.
PcaModel PcaFit(const Eigen::MatrixXd& x, const PcaMode& mode);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_PREPROCESSING_H_
