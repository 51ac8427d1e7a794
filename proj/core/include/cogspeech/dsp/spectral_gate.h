#ifndef COGSPEECH_DSP_SPECTRAL_GATE_H_
#define COGSPEECH_DSP_SPECTRAL_GATE_H_

#include <cstddef>
#include <vector>

#include "cogspeech/common/signal.h"

namespace cogspeech::dsp {

// Frame and hop are in samples. A bin whose STFT magnitude falls below
// profile * 10^(threshold_margin_db / 20) is scaled by (1 - alpha), so
// alpha = 0 leaves the signal untouched and alpha = 1 removes those bins.
struct GateConfig {
  std::size_t frame_len = 400;
  std::size_t hop = 160;
  double noise_quantile = 0.10;
  double threshold_margin_db = 18.0;
  double alpha = 0.3;

  // 25 ms frames, 10 ms hop at the given rate.
  static GateConfig ForSampleRate(double sample_rate);
};

// Throws ConfigError for hop == 0, hop > frame_len, alpha outside [0, 1] or
// a quantile outside [0, 1].
void ValidateGateConfig(const GateConfig& cfg);

// Per-bin (frame_len/2 + 1 values) noise_quantile of the Hann-windowed STFT
// magnitudes over all frames lying fully inside the signal. Throws
// ValidationError if the signal is shorter than one frame.
std::vector<double> EstimateNoiseProfile(const Signal& x, const GateConfig& cfg);

// Gates with a profile estimated from `x` itself. Analysis and synthesis
// both use the Hann window with overlap-add normalisation by the summed
// squared window, which reconstructs exactly when no bin is attenuated.
// Throws ConfigError when the frame/hop pair leaves samples with no window
// support (e.g. hop == frame_len).
Signal SpectralGate(const Signal& x, const GateConfig& cfg);
Signal SpectralGate(const Signal& x, const GateConfig& cfg,
                    const std::vector<double>& noise_profile);

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_SPECTRAL_GATE_H_
