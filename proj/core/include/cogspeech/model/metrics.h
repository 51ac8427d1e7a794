#ifndef COGSPEECH_MODEL_METRICS_H_
#define COGSPEECH_MODEL_METRICS_H_

#include <Eigen/Dense>
#include <optional>

namespace cogspeech::model {

// nullopt when either side has zero variance or sizes differ.
std::optional<double> PearsonR(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);
// 1 - SS_res / SS_tot; nullopt when y is constant.
std::optional<double> R2(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);
// Mean recall over the classes present in `y` (labels compared exactly).
std::optional<double> BalancedAccuracy(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_METRICS_H_
