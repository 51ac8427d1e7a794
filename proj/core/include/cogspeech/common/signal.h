#ifndef COGSPEECH_COMMON_SIGNAL_H_
#define COGSPEECH_COMMON_SIGNAL_H_

#include <cstddef>
#include <vector>

namespace cogspeech {

// Mono audio at nominal full scale [-1, 1].
struct Signal {
  std::vector<double> samples;
  double sample_rate = 16000.0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline constexpr double kMinSampleRate = 8000.0;
inline constexpr double kMaxSampleRate = 192000.0;

// Throws ValidationError on non-finite samples or an unsupported rate.
void ValidateSignal(const Signal& x);

// Nearest sample index of time `t_s`, clamped to [0, size].
std::size_t TimeToSample(double t_s, double sample_rate, std::size_t size);

Signal ApplyGainDb(const Signal& x, double gain_db);

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_SIGNAL_H_
