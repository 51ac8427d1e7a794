#ifndef COGSPEECH_DSP_FILTER_H_
#define COGSPEECH_DSP_FILTER_H_

#include <vector>

#include "cogspeech/common/signal.h"

namespace cogspeech::dsp {

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

enum class FilterKind { kHighpass };

struct FilterDesign {
  int order = 6;
  double cutoff_hz = 100.0;
  FilterKind kind = FilterKind::kHighpass;
};

// Cascade of ceil(order/2) second-order sections; an odd order puts the
// first-order section last (b2 = a2 = 0).
struct FilterSpec {
  std::vector<Biquad> sections;
  FilterDesign design;
  double sample_rate = 16000.0;
};

// Butterworth high-pass via the bilinear transform, prewarped so the
// response is exactly -3.01 dB at the cutoff. Throws ConfigError when the
// cutoff is not inside (0, fs/2) or order < 1.
FilterSpec DesignHighpass(int order, double cutoff_hz, double sample_rate);

// Magnitude response in dB at `freq_hz`.
double MagnitudeDb(const FilterSpec& spec, double freq_hz);

// Largest pole radius over all sections; < 1 means stable.
double MaxPoleRadius(const FilterSpec& spec);

// Cascaded transposed direct-form II with zero initial state. Throws
// ConfigError when the signal rate differs from the design rate.
Signal ApplyFilter(const FilterSpec& spec, const Signal& x);

// Runs one section in place.
void FilterInPlace(const Biquad& bq, std::vector<double>& samples);

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_FILTER_H_
