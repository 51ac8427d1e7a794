#include "cogspeech/model/stats.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <span>

#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"

namespace cogspeech::model {
namespace {

double SampleVariance(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

TTest WelchT(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("t-test needs n >= 2 per sample");
  const double ma = Mean(a), mb = Mean(b);
  const double va = SampleVariance(a, ma) / static_cast<double>(a.size());
  const double vb = SampleVariance(b, mb) / static_cast<double>(b.size());
  TTest r;
  const double se2 = va + vb;
  if (se2 <= 0.0) {
    if (ma == mb) return r;
    r.t = ma > mb ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
    r.df = static_cast<double>(a.size() + b.size() - 2);
    r.p = 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

ChiSquare ChiSquare2x2(const std::array<std::array<double, 2>, 2>& n) {
  const double r0 = n[0][0] + n[0][1], r1 = n[1][0] + n[1][1];
  const double c0 = n[0][0] + n[1][0], c1 = n[0][1] + n[1][1];
  const double total = r0 + r1;
  for (const auto& row : n) {
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("counts must be finite and >= 0");
    }
  }
  const double rows[2] = {r0, r1}, cols[2] = {c0, c1};
  ChiSquare r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double e = total > 0.0 ? rows[i] * cols[j] / total : 0.0;
      if (!(e > 0.0)) throw ValidationError("chi-square: zero expected count");
      r.chi2 += (n[i][j] - e) * (n[i][j] - e) / e;
    }
  }
  boost::math::chi_squared dist(1.0);
  r.p = boost::math::cdf(boost::math::complement(dist, r.chi2));
  return r;
}

}  // namespace cogspeech::model
