#ifndef COGSPEECH_MODEL_STATS_H_
#define COGSPEECH_MODEL_STATS_H_

#include <array>
#include <vector>

namespace cogspeech::model {

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Welch unequal-variance t-test with Welch-Satterthwaite df. Both variances
// zero: equal means give t = 0, p = 1; different means give t = +-inf,
// p = 0. Throws ValidationError with fewer than two values per sample.
TTest WelchT(const std::vector<double>& a, const std::vector<double>& b);

struct ChiSquare {
  double chi2 = 0.0;
  double p = 1.0;
  int df = 1;
};

// Pearson chi-square on a 2x2 table without continuity correction.
// Throws ValidationError when an expected count is zero.
ChiSquare ChiSquare2x2(const std::array<std::array<double, 2>, 2>& counts);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_STATS_H_
