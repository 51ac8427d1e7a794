#include "cogspeech/dsp/loudness.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::dsp {
namespace {

constexpr double kBlockS = 0.400;
constexpr double kStepS = 0.100;
// Offset that puts a 997 Hz full-scale sine at -3.01 LUFS.
constexpr double kLoudnessOffset = -0.691;

double BlockLoudness(double mean_square) {
  return kLoudnessOffset + 10.0 * std::log10(mean_square);
}

}  // namespace

std::array<Biquad, 2> KWeightingFilters(double sample_rate) {
  // Analog parameters that reproduce the tabulated 48 kHz coefficients,
  // re-discretised for other rates.
  std::array<Biquad, 2> out;
  {
    const double f0 = 1681.974450955533;
    const double gain_db = 3.999843853973347;
    const double q = 0.7071752369554196;
    const double k = std::tan(std::numbers::pi * f0 / sample_rate);
    const double vh = std::pow(10.0, gain_db / 20.0);
    const double vb = std::pow(vh, 0.4996667741545416);
    const double a0 = 1.0 + k / q + k * k;
    Biquad& s = out[0];
    s.b0 = (vh + vb * k / q + k * k) / a0;
    s.b1 = 2.0 * (k * k - vh) / a0;
    s.b2 = (vh - vb * k / q + k * k) / a0;
    s.a1 = 2.0 * (k * k - 1.0) / a0;
    s.a2 = (1.0 - k / q + k * k) / a0;
  }
  {
    const double f0 = 38.13547087602444;
    const double q = 0.5003270373238773;
    const double k = std::tan(std::numbers::pi * f0 / sample_rate);
    const double a0 = 1.0 + k / q + k * k;
    Biquad& s = out[1];
    s.b0 = 1.0;
    s.b1 = -2.0;
    s.b2 = 1.0;
    s.a1 = 2.0 * (k * k - 1.0) / a0;
    s.a2 = (1.0 - k / q + k * k) / a0;
  }
  return out;
}

LoudnessResult MeasureLoudness(const Signal& x) {
  std::vector<double> weighted = x.samples;
  for (const Biquad& bq : KWeightingFilters(x.sample_rate)) {
    FilterInPlace(bq, weighted);
  }
  const auto block = static_cast<std::size_t>(std::lround(kBlockS * x.sample_rate));
  const auto step = static_cast<std::size_t>(std::lround(kStepS * x.sample_rate));

  // Prefix sums of squares keep the overlapping blocks O(n).
  std::vector<double> prefix(weighted.size() + 1, 0.0);
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    prefix[i + 1] = prefix[i] + weighted[i] * weighted[i];
  }
  std::vector<double> block_ms;
  for (std::size_t start = 0; start + block <= weighted.size(); start += step) {
    block_ms.push_back((prefix[start + block] - prefix[start]) /
                       static_cast<double>(block));
  }

  const double kNegInf = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  for (double z : block_ms) {
    if (z > 0.0 && BlockLoudness(z) > kAbsoluteGateLufs) {
      sum += z;
      ++count;
    }
  }
  if (count == 0) return {kNegInf, 0};
  const double relative_gate =
      BlockLoudness(sum / static_cast<double>(count)) + kRelativeGateLu;

  sum = 0.0;
  count = 0;
  for (double z : block_ms) {
    if (z > 0.0) {
      const double l = BlockLoudness(z);
      if (l > kAbsoluteGateLufs && l > relative_gate) {
        sum += z;
        ++count;
      }
    }
  }
  if (count == 0) return {kNegInf, 0};
  return {BlockLoudness(sum / static_cast<double>(count)), count};
}

NormalizedSignal NormalizeLoudness(const Signal& x, double target_lufs) {
  if (!std::isfinite(target_lufs)) throw ConfigError("target must be finite");
  const LoudnessResult measured = MeasureLoudness(x);
  if (measured.BelowGate()) {
    throw ValidationError("signal is below the -70 LUFS absolute gate");
  }
  const double gain_db = target_lufs - measured.integrated_lufs;
  const double g = std::pow(10.0, gain_db / 20.0);
  NormalizedSignal out{x, gain_db, 0};
  for (double& s : out.signal.samples) {
    s *= g;
    if (std::abs(s) > 1.0) ++out.samples_over_full_scale;
  }
  return out;
}

}  // namespace cogspeech::dsp
