#include "cogspeech/model/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cogspeech/common/error.h"

namespace cogspeech::model {

Eigen::VectorXd LinearModel::Decision(const Eigen::MatrixXd& x) const {
  return (x * w).array() + b;
}

LinearModel RidgeFit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (x.rows() != y.size()) throw ValidationError("ridge: X and y sizes differ");
  if (x.rows() < 2) throw ValidationError("ridge: need at least two samples");
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("ridge: non-finite input");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("ridge: lambda must be >= 0");
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  LinearModel m;
  if (lambda == 0.0) {
    m.w = xc.completeOrthogonalDecomposition().solve(yc);
  } else {
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    m.w = gram.ldlt().solve(xc.transpose() * yc);
  }
  m.b = y_mean - x_mean.dot(m.w);
  return m;
}

SvmFit LinearSvmFit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SvmOptions& options) {
  const Eigen::Index n = x.rows();
  if (y.size() != n) throw ValidationError("svm: X and y sizes differ");
  if (!x.allFinite()) throw ValidationError("svm: non-finite input");
  if (!(options.c > 0.0)) throw ValidationError("svm: C must be > 0");
  Eigen::Index n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] == 1.0) ++n_pos;
    else if (y[i] == -1.0) ++n_neg;
    else throw ValidationError("svm: labels must be -1 or +1");
  }
  if (n_pos == 0 || n_neg == 0) throw ValidationError("svm: both classes required");

  const double w_pos = options.balanced ? static_cast<double>(n) / (2.0 * n_pos) : 1.0;
  const double w_neg = options.balanced ? static_cast<double>(n) / (2.0 * n_neg) : 1.0;
  std::vector<double> upper(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    upper[i] = options.c * (y[i] > 0 ? w_pos : w_neg);
  }

  const Eigen::MatrixXd k = x * x.transpose();
  // Q_ij = y_i y_j K_ij; gradient of 1/2 a'Qa - sum a is Qa - 1.
  Eigen::MatrixXd q = k;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) *= y[i] * y[j];
  }
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  constexpr double kTau = 1e-12;
  const long long max_iter = options.max_iterations > 0
                                 ? options.max_iterations
                                 : std::max<long long>(10'000'000LL, 100LL * n);

  auto in_up = [&](Eigen::Index t) {
    return (y[t] > 0 && alpha[t] < upper[t]) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < upper[t]);
  };

  SvmFit fit;
  long long iter = 0;
  for (; iter < max_iter; ++iter) {
    Eigen::Index i = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > g_max) {
        g_max = -y[t] * grad[t];
        i = t;
      }
    }
    double g_min = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      g_min = std::min(g_min, v);
      if (i < 0) continue;
      const double diff = g_max - v;
      if (diff > 0.0) {
        double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || g_max - g_min < options.tolerance) {
      fit.converged = true;
      break;
    }

    const double old_i = alpha[i], old_j = alpha[j];
    const double ci = upper[i], cj = upper[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = ci - diff; }
      } else {
        if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = cj + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = sum - ci; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > cj) {
        if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = sum - cj; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    grad += q.col(i) * di + q.col(j) * dj;
  }
  fit.iterations = iter;

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  Eigen::Index n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= upper[t]) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);

  fit.model.w = x.transpose() * (alpha.array() * y.array()).matrix();
  fit.model.b = -rho;
  fit.dual_objective = alpha.sum() - 0.5 * alpha.dot(q * alpha);
  return fit;
}

}  // namespace cogspeech::model
