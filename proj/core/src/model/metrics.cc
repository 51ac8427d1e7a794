#include "cogspeech/model/metrics.h"

#include <cmath>
#include <map>

namespace cogspeech::model {

std::optional<double> PearsonR(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
  if (y.size() != y_hat.size() || y.size() < 2) return std::nullopt;
  const Eigen::ArrayXd a = y.array() - y.mean();
  const Eigen::ArrayXd b = y_hat.array() - y_hat.mean();
  const double saa = (a * a).sum(), sbb = (b * b).sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return (a * b).sum() / std::sqrt(saa * sbb);
}

std::optional<double> R2(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
  if (y.size() != y_hat.size() || y.size() < 1) return std::nullopt;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  if (!(ss_tot > 0.0)) return std::nullopt;
  return 1.0 - (y - y_hat).squaredNorm() / ss_tot;
}

std::optional<double> BalancedAccuracy(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
  if (y.size() != y_hat.size() || y.size() == 0) return std::nullopt;
  std::map<double, std::pair<double, double>> per_class;  // label -> (hits, total)
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    auto& [hit, total] = per_class[y[i]];
    total += 1.0;
    if (y_hat[i] == y[i]) hit += 1.0;
  }
  double sum = 0.0;
  for (const auto& [label, ht] : per_class) sum += ht.first / ht.second;
  return sum / static_cast<double>(per_class.size());
}

}  // namespace cogspeech::model
