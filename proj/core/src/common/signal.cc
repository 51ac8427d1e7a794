#include "cogspeech/common/signal.h"

#include <cmath>
#include <string>

#include "cogspeech/common/error.h"

namespace cogspeech {

void ValidateSignal(const Signal& x) {
  if (!(x.sample_rate >= kMinSampleRate && x.sample_rate <= kMaxSampleRate)) {
    throw ValidationError("unsupported sample rate " +
                          std::to_string(x.sample_rate));
  }
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    if (!std::isfinite(x.samples[i])) {
      throw ValidationError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::size_t TimeToSample(double t_s, double sample_rate, std::size_t size) {
  const double idx = std::round(t_s * sample_rate);
  if (idx <= 0.0) return 0;
  if (idx >= static_cast<double>(size)) return size;
  return static_cast<std::size_t>(idx);
}

Signal ApplyGainDb(const Signal& x, double gain_db) {
  Signal out = x;
  const double g = std::pow(10.0, gain_db / 20.0);
  for (double& s : out.samples) s *= g;
  return out;
}

}  // namespace cogspeech
