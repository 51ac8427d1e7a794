#include "cogspeech/model/preprocessing.h"

#include <cmath>

#include "cogspeech/common/error.h"

namespace cogspeech::model {

Scaler ZScoreFit(const Eigen::MatrixXd& x) {
  if (x.rows() == 0 || x.cols() == 0) throw ValidationError("z-score fit on an empty matrix");
  Scaler s;
  s.mean = Eigen::VectorXd::Zero(x.cols());
  s.sd = Eigen::VectorXd::Ones(x.cols());
  s.constant.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double v = x(r, c);
      if (std::isinf(v)) throw ValidationError("infinite value in column " + std::to_string(c));
      if (std::isnan(v)) continue;
      sum += v;
      ++n;
    }
    if (n == 0) {
      s.constant[static_cast<std::size_t>(c)] = true;
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (!std::isnan(x(r, c))) ss += (x(r, c) - mean) * (x(r, c) - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[c] = mean;
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      s.sd[c] = sd;
    } else {
      s.constant[static_cast<std::size_t>(c)] = true;
    }
  }
  return s;
}

Eigen::MatrixXd Scaler::Apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw ValidationError("scaler column count mismatch");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const bool flat = constant[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double v = x(r, c);
      out(r, c) = (flat || std::isnan(v)) ? 0.0 : (v - mean[c]) / sd[c];
    }
  }
  return out;
}

PcaModel PcaFit(const Eigen::MatrixXd& x, const PcaMode& mode) {
  PcaModel m;
  m.mode = mode;
  if (mode.passthrough) return m;
  if (!(mode.threshold > 0.0 && mode.threshold <= 1.0)) {
    throw ConfigError("PCA threshold must lie in (0, 1]");
  }
  if (x.rows() == 0) throw ValidationError("PCA fit on an empty matrix");
  m.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw ValidationError("PCA eigendecomposition failed");
  // Ascending -> descending.
  const Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();
  const Eigen::Index d = values.size();
  m.explained_ratio = total > 0.0 ? Eigen::VectorXd(values / total) : Eigen::VectorXd::Zero(d);
  Eigen::Index k = 1;
  if (total > 0.0) {
    double cum = 0.0;
    for (k = 0; k < d;) {
      cum += m.explained_ratio[k];
      ++k;
      if (cum >= mode.threshold - 1e-12) break;
    }
  }
  m.components = vectors.leftCols(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index idx = 0;
    m.components.col(j).cwiseAbs().maxCoeff(&idx);
    if (m.components(idx, j) < 0.0) m.components.col(j) *= -1.0;
  }
  return m;
}

Eigen::MatrixXd PcaModel::Apply(const Eigen::MatrixXd& x) const {
  if (mode.passthrough) return x;
  return (x.rowwise() - mean.transpose()) * components;
}

}  // namespace cogspeech::model
