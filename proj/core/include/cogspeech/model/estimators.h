#ifndef COGSPEECH_MODEL_ESTIMATORS_H_
#define COGSPEECH_MODEL_ESTIMATORS_H_

#include <Eigen/Dense>

namespace cogspeech::model {

struct LinearModel {
  Eigen::VectorXd w;
  double b = 0.0;

  Eigen::VectorXd Decision(const Eigen::MatrixXd& x) const;
};

// argmin ||y - Xw - b||^2 + lambda ||w||^2 with the intercept unpenalised.
// lambda = 0 gives the minimum-norm least-squares solution. Throws
// ValidationError on non-finite input, n < 2, or lambda < 0.
LinearModel RidgeFit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

struct SvmOptions {
  double c = 1.0;
  // Per-class weight n / (2 n_class), else 1.
  bool balanced = false;
  // Maximal KKT violation at convergence.
  double tolerance = 1e-8;
  long long max_iterations = 0;  // 0 selects max(10^7, 100 n)
};

struct SvmFit {
  LinearModel model;
  bool converged = false;
  long long iterations = 0;
  // Dual objective at the solution.
  double dual_objective = 0.0;
};

// Linear soft-margin SVM, 1/2 ||w||^2 + C sum s_i hinge(y_i (w.x_i + b)),
// solved in the dual with second-order working-set selection. Labels must be
// -1 or +1 with both present (ValidationError otherwise).
SvmFit LinearSvmFit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SvmOptions& options);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_ESTIMATORS_H_
