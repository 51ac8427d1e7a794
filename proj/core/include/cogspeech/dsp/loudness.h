#ifndef COGSPEECH_DSP_LOUDNESS_H_
#define COGSPEECH_DSP_LOUDNESS_H_

#include <array>
#include <cstddef>

#include "cogspeech/common/signal.h"
#include "cogspeech/dsp/filter.h"

namespace cogspeech::dsp {

inline constexpr double kAbsoluteGateLufs = -70.0;
inline constexpr double kRelativeGateLu = -10.0;
inline constexpr double kDefaultTargetLufs = -23.0;

// Integrated loudness. `integrated_lufs` is -infinity when no block passes
// the absolute gate; use BelowGate() to test for that case.
struct LoudnessResult {
  double integrated_lufs;
  std::size_t gated_block_count;

  bool BelowGate() const { return gated_block_count == 0; }
};

// Pre-filter (high shelf) and RLB high-pass of the K-weighting curve,
// derived for any sample rate.
std::array<Biquad, 2> KWeightingFilters(double sample_rate);

// Mono integrated loudness: K-weighting, 400 ms blocks with 75% overlap, an
// absolute gate at -70 LUFS followed by a relative gate 10 LU below the
// mean of the surviving blocks.
LoudnessResult MeasureLoudness(const Signal& x);

struct NormalizedSignal {
  Signal signal;
  double applied_gain_db;
  // Samples with |x| > 1 after the gain; they are reported, not clipped.
  std::size_t samples_over_full_scale;
};

// Applies one scalar gain so the result measures `target_lufs`. Throws
// ValidationError when the input is below the absolute gate.
NormalizedSignal NormalizeLoudness(const Signal& x,
                                   double target_lufs = kDefaultTargetLufs);

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_LOUDNESS_H_
