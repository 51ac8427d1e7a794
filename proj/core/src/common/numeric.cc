#include "cogspeech/common/numeric.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cogspeech/common/error.h"

namespace cogspeech {

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of empty sequence");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile outside [0, 1]");
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double lo_val = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return lo_val;
  const double hi_val =
      *std::min_element(values.begin() + lo + 1, values.end());
  return lo_val + frac * (hi_val - lo_val);
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double PopulationSd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double PowerToDb(double power, double floor_db) {
  if (!(power > 0.0)) return floor_db;
  return std::max(10.0 * std::log10(power), floor_db);
}

}  // namespace cogspeech
