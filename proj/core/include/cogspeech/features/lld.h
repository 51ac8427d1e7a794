#ifndef COGSPEECH_FEATURES_LLD_H_
#define COGSPEECH_FEATURES_LLD_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cogspeech/common/signal.h"

namespace cogspeech::features {

// How functionals summarise a contour.
enum class Scale {
  kLinear,    // mean and coefficient of variation
  kSemitone,  // Hz converted to semitones re 27.5 Hz, then mean and CoV
  kLevel,     // dB-like quantities: mean and standard deviation
};

// Per-frame low-level descriptor. `valid[i]` marks frames that carry a
// value; invalid frames hold 0.
struct LldContour {
  std::string name;
  std::vector<double> values;
  std::vector<bool> valid;
  double frame_s = 0.010;
  Scale scale = Scale::kLinear;

  std::size_t ValidCount() const;
  std::vector<double> ValidValues() const;
};

struct FrameConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;

  std::size_t FrameLength(double fs) const;
  std::size_t Hop(double fs) const;
  // floor((n - frame) / hop) + 1, or 0 when the signal is shorter.
  std::size_t FrameCount(std::size_t n, double fs) const;
};

struct F0Config {
  double min_hz = 60.0;
  double max_hz = 400.0;
  double voicing_clarity = 0.45;
  // Candidate peaks within this fraction of the best one are eligible; the
  // shortest lag among them wins (guards against octave-down errors).
  double peak_ratio = 0.9;
  FrameConfig frames;
};

// Normalised cross-correlation pitch tracker with parabolic lag refinement.
// Frames of exact digital silence are unvoiced. Throws ValidationError for
// fs < 8 kHz.
LldContour TrackF0(const Signal& x, const F0Config& cfg = {});

struct VoiceQuality {
  LldContour jitter;
  LldContour shimmer;
  LldContour hnr_db;
};

// HNR is capped to [-40, 40] dB.
inline constexpr double kHnrCapDb = 40.0;

// Local jitter and shimmer from pitch marks (one waveform peak per period,
// searched in [0.7 T, 1.3 T] after the previous mark) inside voiced runs of
// `f0`. A frame's jitter is mean |P[k+1] - P[k]| / mean period over the
// period pairs ending in the frame; shimmer uses mark amplitudes likewise.
// HNR is 10 log10(r / (1 - r)) from the best normalised autocorrelation
// peak r, on every non-silent frame. All contours are empty when `f0` has
// no voiced frame.
VoiceQuality JitterShimmerHnr(const Signal& x, const LldContour& f0,
                              const F0Config& cfg = {});

struct SlopeBand {
  double lo_hz;
  double hi_hz;
};

// Least-squares slope of the Hann-windowed log magnitude spectrum (dB per
// kHz) over the bins inside each band (DC excluded), split into a voiced and
// an unvoiced contour per band using `f0.valid`. Silent frames are invalid
// in both. Names: slope<lo>_<hi>_voiced / _unvoiced. Throws ConfigError when
// a band holds fewer than two bins.
std::vector<LldContour> SpectralSlopes(const Signal& x, const LldContour& f0,
                                       const std::vector<SlopeBand>& bands,
                                       const FrameConfig& frames = {});

// Default bands 0-500 Hz and 500-1500 Hz.
std::vector<SlopeBand> DefaultSlopeBands();

// Slope (dB/kHz) of a straight-line fit; exposed for oracles.
double LeastSquaresSlope(const std::vector<double>& freq_khz,
                         const std::vector<double>& db);

struct FormantConfig {
  double f1_lo_hz = 200.0, f1_hi_hz = 1000.0;
  double f2_lo_hz = 800.0, f2_hi_hz = 2800.0;
  double max_bandwidth_hz = 500.0;
  // 0 selects fs/1000 + 2.
  int lpc_order = 0;
  FrameConfig frames;
};

struct FormantTracks {
  LldContour f1_hz, f1_bw_hz, f2_hz, f2_bw_hz;
  // Voiced frames discarded because LPC was unstable or degenerate.
  std::size_t skipped_frames = 0;
};

// Autocorrelation LPC (Hamming window, Levinson-Durbin) on voiced frames;
// formants from pole angles, bandwidth -(fs/pi) ln|pole|.
FormantTracks FormantBandwidths(const Signal& x, const LldContour& f0,
                                const FormantConfig& cfg = {});

// Autocorrelation-method LPC coefficients a[0..order] with a[0] = 1;
// empty when the frame is degenerate. Exposed for tests.
std::vector<double> LpcCoefficients(const std::vector<double>& frame, int order);

}  // namespace cogspeech::features

#endif  // COGSPEECH_FEATURES_LLD_H_
