#include "cogspeech/dsp/spectral_gate.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"
#include "cogspeech/dsp/fft.h"

namespace cogspeech::dsp {

GateConfig GateConfig::ForSampleRate(double sample_rate) {
  GateConfig cfg;
  cfg.frame_len = static_cast<std::size_t>(std::lround(0.025 * sample_rate));
  cfg.hop = static_cast<std::size_t>(std::lround(0.010 * sample_rate));
  return cfg;
}

void ValidateGateConfig(const GateConfig& cfg) {
  if (cfg.frame_len < 2) throw ConfigError("gate frame_len must be >= 2");
  if (cfg.hop == 0 || cfg.hop > cfg.frame_len) {
    throw ConfigError("gate hop must satisfy 0 < hop <= frame_len");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw ConfigError("gate alpha must lie in [0, 1]");
  }
  if (!(cfg.noise_quantile >= 0.0 && cfg.noise_quantile <= 1.0)) {
    throw ConfigError("gate noise_quantile must lie in [0, 1]");
  }
  if (!std::isfinite(cfg.threshold_margin_db)) {
    throw ConfigError("gate threshold_margin_db must be finite");
  }
}

std::vector<double> EstimateNoiseProfile(const Signal& x,
                                         const GateConfig& cfg) {
  ValidateGateConfig(cfg);
  if (x.size() < cfg.frame_len) {
    throw ValidationError("signal shorter than one gate frame");
  }
  const std::size_t n_frames = (x.size() - cfg.frame_len) / cfg.hop + 1;
  const std::size_t n_bins = cfg.frame_len / 2 + 1;
  const std::vector<double> window = HannWindow(cfg.frame_len);
  RealFft fft(cfg.frame_len);
  std::vector<double> frame(cfg.frame_len);
  std::vector<std::complex<double>> spec;
  // mags[bin][frame]
  std::vector<std::vector<double>> mags(n_bins, std::vector<double>(n_frames));
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      frame[i] = x.samples[start + i] * window[i];
    }
    fft.Forward(frame, spec);
    for (std::size_t b = 0; b < n_bins; ++b) mags[b][f] = std::abs(spec[b]);
  }
  std::vector<double> profile(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    profile[b] = Quantile(std::move(mags[b]), cfg.noise_quantile);
  }
  return profile;
}

Signal SpectralGate(const Signal& x, const GateConfig& cfg) {
  return SpectralGate(x, cfg, EstimateNoiseProfile(x, cfg));
}

Signal SpectralGate(const Signal& x, const GateConfig& cfg,
                    const std::vector<double>& noise_profile) {
  ValidateGateConfig(cfg);
  const std::size_t n = cfg.frame_len;
  const std::size_t n_bins = n / 2 + 1;
  if (noise_profile.size() != n_bins) {
    throw ConfigError("noise profile has the wrong number of bins");
  }
  const std::vector<double> window = HannWindow(n);

  // Pad by one frame on each side so every input sample is covered by the
  // same number of window positions as in the interior.
  const std::size_t pad = n;
  const std::size_t body = x.size() + 2 * pad;
  const std::size_t n_frames = (body - n + cfg.hop - 1) / cfg.hop + 1;
  const std::size_t total = (n_frames - 1) * cfg.hop + n;
  std::vector<double> padded(total, 0.0);
  std::copy(x.samples.begin(), x.samples.end(), padded.begin() + pad);

  std::vector<double> out(total, 0.0);
  std::vector<double> norm(total, 0.0);
  const double gain = 1.0 - cfg.alpha;
  const double margin = std::pow(10.0, cfg.threshold_margin_db / 20.0);
  std::vector<double> threshold(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    threshold[b] = noise_profile[b] * margin;
  }

  RealFft fft(n);
  std::vector<double> frame(n);
  std::vector<double> synth;
  std::vector<std::complex<double>> spec;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) frame[i] = padded[start + i] * window[i];
    fft.Forward(frame, spec);
    for (std::size_t b = 0; b < n_bins; ++b) {
      if (std::abs(spec[b]) < threshold[b]) spec[b] *= gain;
    }
    fft.Inverse(spec, synth);
    for (std::size_t i = 0; i < n; ++i) {
      out[start + i] += synth[i] * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }

  double max_norm = 0.0;
  for (double v : norm) max_norm = std::max(max_norm, v);
  Signal y;
  y.sample_rate = x.sample_rate;
  y.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w2 = norm[pad + i];
    if (!(w2 > 1e-6 * max_norm)) {
      throw ConfigError(
          "frame/hop combination is not overlap-add reconstructible");
    }
    y.samples[i] = out[pad + i] / w2;
  }
  return y;
}

}  // namespace cogspeech::dsp
