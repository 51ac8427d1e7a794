#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"
#include "cogspeech/dsp/fft.h"
#include "cogspeech/features/lld.h"
#include "frame_analysis.h"

namespace cogspeech::features {
namespace {

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::string BandName(const SlopeBand& b) {
  return "slope" + FormatDouble(b.lo_hz) + "_" + FormatDouble(b.hi_hz);
}

}  // namespace

std::vector<SlopeBand> DefaultSlopeBands() { return {{0.0, 500.0}, {500.0, 1500.0}}; }

double LeastSquaresSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<LldContour> SpectralSlopes(const Signal& x, const LldContour& f0,
                                       const std::vector<SlopeBand>& bands,
                                       const FrameConfig& frames) {
  const double fs = x.sample_rate;
  const std::size_t len = frames.FrameLength(fs);
  const std::size_t hop = frames.Hop(fs);
  const std::size_t n_frames = frames.FrameCount(x.size(), fs);
  const std::size_t nfft = NextPow2(len);
  const double bin_hz = fs / static_cast<double>(nfft);

  std::vector<std::vector<std::size_t>> bins(bands.size());
  std::vector<std::vector<double>> khz(bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b) {
    for (std::size_t k = 1; k < nfft / 2 + 1; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f >= bands[b].lo_hz && f <= bands[b].hi_hz) {
        bins[b].push_back(k);
        khz[b].push_back(f * 1e-3);
      }
    }
    if (bins[b].size() < 2) {
      throw ConfigError("spectral slope band " + BandName(bands[b]) +
                        " holds fewer than two bins at this sample rate");
    }
  }

  std::vector<LldContour> out;
  for (const auto& band : bands) {
    out.push_back(internal::EmptyContour(BandName(band) + "_voiced", n_frames, Scale::kLevel));
    out.push_back(internal::EmptyContour(BandName(band) + "_unvoiced", n_frames, Scale::kLevel));
  }

  dsp::RealFft fft(nfft);
  const std::vector<double> window = dsp::HannWindow(len);
  std::vector<double> buf(nfft);
  std::vector<std::complex<double>> spec;
  std::vector<double> db;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * hop;
    if (internal::FrameIsSilent(x, start, len)) continue;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < len; ++i) buf[i] = x.samples[start + i] * window[i];
    fft.Forward(buf, spec);
    const bool voiced = f < f0.valid.size() && f0.valid[f];
    for (std::size_t b = 0; b < bands.size(); ++b) {
      db.clear();
      for (std::size_t k : bins[b]) db.push_back(20.0 * std::log10(std::abs(spec[k]) + 1e-12));
      LldContour& c = out[2 * b + (voiced ? 0 : 1)];
      c.values[f] = LeastSquaresSlope(khz[b], db);
      c.valid[f] = true;
    }
  }
  return out;
}

std::vector<double> LpcCoefficients(const std::vector<double>& frame, int order) {
  const std::size_t n = frame.size();
  const auto p = static_cast<std::size_t>(order);
  if (order < 1 || n <= p) return {};
  std::vector<double> r(p + 1, 0.0);
  for (std::size_t lag = 0; lag <= p; ++lag) {
    for (std::size_t i = lag; i < n; ++i) r[lag] += frame[i] * frame[i - lag];
  }
  if (!(r[0] > 0.0)) return {};
  std::vector<double> a(p + 1, 0.0), prev;
  a[0] = 1.0;
  double err = r[0];
  for (std::size_t i = 1; i <= p; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    prev = a;
    for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= 1.0 - k * k;
    if (!(err > 0.0)) return {};
  }
  return a;
}

FormantTracks FormantBandwidths(const Signal& x, const LldContour& f0,
                                const FormantConfig& cfg) {
  const double fs = x.sample_rate;
  if (fs < kMinSampleRate) throw ValidationError("formant analysis needs fs >= 8 kHz");
  const int order = cfg.lpc_order > 0 ? cfg.lpc_order
                                      : static_cast<int>(std::lround(fs / 1000.0)) + 2;
  const std::size_t len = cfg.frames.FrameLength(fs);
  const std::size_t hop = cfg.frames.Hop(fs);
  const std::size_t n_frames = cfg.frames.FrameCount(x.size(), fs);

  FormantTracks t;
  t.f1_hz = internal::EmptyContour("f1_hz", n_frames, Scale::kLinear);
  t.f1_bw_hz = internal::EmptyContour("f1_bw_hz", n_frames, Scale::kLinear);
  t.f2_hz = internal::EmptyContour("f2_hz", n_frames, Scale::kLinear);
  t.f2_bw_hz = internal::EmptyContour("f2_bw_hz", n_frames, Scale::kLinear);

  std::vector<double> hamming(len);
  for (std::size_t i = 0; i < len; ++i) {
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(len - 1));
  }
  std::vector<double> frame(len);
  const auto p = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd companion(p, p);
  for (std::size_t f = 0; f < n_frames; ++f) {
    if (f >= f0.valid.size() || !f0.valid[f]) continue;
    for (std::size_t i = 0; i < len; ++i) frame[i] = x.samples[f * hop + i] * hamming[i];
    const std::vector<double> a = LpcCoefficients(frame, order);
    if (a.empty()) {
      ++t.skipped_frames;
      continue;
    }
    companion.setZero();
    for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = -a[static_cast<std::size_t>(j) + 1];
    for (Eigen::Index j = 1; j < p; ++j) companion(j, j - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      ++t.skipped_frames;
      continue;
    }
    const Eigen::VectorXcd roots = solver.eigenvalues();
    bool unstable = false;
    std::vector<std::pair<double, double>> cands;  // (freq, bandwidth)
    for (Eigen::Index j = 0; j < roots.size(); ++j) {
      const std::complex<double> z = roots[j];
      if (std::abs(z) >= 1.0) unstable = true;
      if (z.imag() <= 1e-12) continue;
      const double freq = std::arg(z) * fs / (2.0 * std::numbers::pi);
      const double bw = -(fs / std::numbers::pi) * std::log(std::abs(z));
      if (bw <= cfg.max_bandwidth_hz) cands.emplace_back(freq, bw);
    }
    if (unstable) {
      ++t.skipped_frames;
      continue;
    }
    std::sort(cands.begin(), cands.end());
    double f1 = -1.0;
    for (const auto& [freq, bw] : cands) {
      if (freq >= cfg.f1_lo_hz && freq <= cfg.f1_hi_hz) {
        f1 = freq;
        t.f1_hz.values[f] = freq;
        t.f1_bw_hz.values[f] = bw;
        t.f1_hz.valid[f] = t.f1_bw_hz.valid[f] = true;
        break;
      }
    }
    for (const auto& [freq, bw] : cands) {
      if (freq > f1 && freq >= cfg.f2_lo_hz && freq <= cfg.f2_hi_hz) {
        t.f2_hz.values[f] = freq;
        t.f2_bw_hz.values[f] = bw;
        t.f2_hz.valid[f] = t.f2_bw_hz.valid[f] = true;
        break;
      }
    }
  }
  return t;
}

}  // namespace cogspeech::features
