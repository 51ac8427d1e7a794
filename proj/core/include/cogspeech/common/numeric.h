#ifndef COGSPEECH_COMMON_NUMERIC_H_
#define COGSPEECH_COMMON_NUMERIC_H_

#include <span>
#include <vector>

namespace cogspeech {

// Linear-interpolation quantile (the "type 7" rule), q in [0, 1].
// Takes a copy because it partially sorts.
double Quantile(std::vector<double> values, double q);

double Mean(std::span<const double> values);

// Population standard deviation (divides by n).
double PopulationSd(std::span<const double> values);

// 10*log10 of a power value with a floor, so silence maps to `floor_db`.
double PowerToDb(double power, double floor_db = -120.0);

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_NUMERIC_H_
