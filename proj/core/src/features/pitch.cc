#include <algorithm>
#include <cmath>

#include "cogspeech/common/error.h"
#include "cogspeech/features/lld.h"
#include "frame_analysis.h"

namespace cogspeech::features {

std::size_t LldContour::ValidCount() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

std::vector<double> LldContour::ValidValues() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid[i]) out.push_back(values[i]);
  }
  return out;
}

std::size_t FrameConfig::FrameLength(double fs) const {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(frame_ms * 1e-3 * fs)));
}

std::size_t FrameConfig::Hop(double fs) const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_ms * 1e-3 * fs)));
}

std::size_t FrameConfig::FrameCount(std::size_t n, double fs) const {
  const std::size_t len = FrameLength(fs);
  if (n < len) return 0;
  return (n - len) / Hop(fs) + 1;
}

namespace internal {

bool FrameIsSilent(const Signal& x, std::size_t start, std::size_t len) {
  for (std::size_t i = start; i < start + len; ++i) {
    if (x.samples[i] != 0.0) return false;
  }
  return true;
}

LldContour EmptyContour(const std::string& name, std::size_t frames, Scale scale) {
  LldContour c;
  c.name = name;
  c.values.assign(frames, 0.0);
  c.valid.assign(frames, false);
  c.scale = scale;
  return c;
}

NccfAnalyzer::NccfAnalyzer(const Signal& x, const F0Config& cfg)
    : frame_len_(cfg.frames.FrameLength(x.sample_rate)),
      hop_(cfg.frames.Hop(x.sample_rate)),
      min_lag_(std::max<std::size_t>(
          2, static_cast<std::size_t>(std::floor(x.sample_rate / cfg.max_hz)))),
      max_lag_(static_cast<std::size_t>(std::ceil(x.sample_rate / cfg.min_hz))),
      frame_count_(cfg.frames.FrameCount(x.size(), x.sample_rate)) {
  if (x.sample_rate < kMinSampleRate) {
    throw ValidationError("pitch analysis needs fs >= 8 kHz");
  }
  if (!(cfg.min_hz > 0.0) || !(cfg.max_hz > cfg.min_hz)) {
    throw ConfigError("pitch range must satisfy 0 < min_hz < max_hz");
  }
  padded_ = x.samples;
  padded_.resize(x.size() + max_lag_ + 2, 0.0);
}

NccfFrame NccfAnalyzer::Analyze(std::size_t frame) const {
  NccfFrame out;
  out.min_lag = min_lag_;
  const double* a = padded_.data() + frame * hop_;
  double e0 = 0.0;
  for (std::size_t i = 0; i < frame_len_; ++i) e0 += a[i] * a[i];
  if (e0 <= 0.0) return out;
  out.silent = false;
  out.r.resize(max_lag_ - min_lag_ + 3);
  for (std::size_t k = 0; k < out.r.size(); ++k) {
    const double* b = a + (min_lag_ - 1 + k);
    double xy = 0.0, e1 = 0.0;
    for (std::size_t i = 0; i < frame_len_; ++i) {
      xy += a[i] * b[i];
      e1 += b[i] * b[i];
    }
    out.r[k] = e1 > 0.0 ? xy / std::sqrt(e0 * e1) : 0.0;
  }
  return out;
}

}  // namespace internal

LldContour TrackF0(const Signal& x, const F0Config& cfg) {
  const internal::NccfAnalyzer nccf(x, cfg);
  LldContour f0 = internal::EmptyContour("f0_hz", nccf.frame_count(), Scale::kSemitone);
  f0.frame_s = cfg.frames.hop_ms * 1e-3;
  for (std::size_t f = 0; f < nccf.frame_count(); ++f) {
    const internal::NccfFrame fr = nccf.Analyze(f);
    if (fr.silent) continue;
    const auto& r = fr.r;
    // Local maxima strictly inside the lag range.
    double best = -1.0;
    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
      if (r[k] >= r[k - 1] && r[k] > r[k + 1]) {
        peaks.push_back(k);
        best = std::max(best, r[k]);
      }
    }
    if (peaks.empty() || best <= 0.0) continue;
    for (std::size_t k : peaks) {
      if (r[k] < cfg.peak_ratio * best) continue;
      const double denom = r[k - 1] - 2.0 * r[k] + r[k + 1];
      const double delta = denom != 0.0 ? 0.5 * (r[k - 1] - r[k + 1]) / denom : 0.0;
      const double clarity = r[k] - 0.25 * (r[k - 1] - r[k + 1]) * delta;
      const double lag = static_cast<double>(fr.min_lag - 1 + k) + delta;
      if (clarity >= cfg.voicing_clarity) {
        f0.values[f] = x.sample_rate / lag;
        f0.valid[f] = true;
      }
      break;
    }
  }
  return f0;
}

namespace {

struct Mark {
  double pos;
  double amp;
};

Mark RefinePeak(const std::vector<double>& x, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return {static_cast<double>(i), x[i]};
  const double l = x[i - 1], c = x[i], r = x[i + 1];
  const double denom = l - 2.0 * c + r;
  const double d = denom != 0.0 ? std::clamp(0.5 * (l - r) / denom, -0.5, 0.5) : 0.0;
  return {static_cast<double>(i) + d, c - 0.25 * (l - r) * d};
}

std::size_t ArgMax(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

}  // namespace

VoiceQuality JitterShimmerHnr(const Signal& x, const LldContour& f0,
                              const F0Config& cfg) {
  VoiceQuality vq;
  const std::size_t n_frames = f0.values.size();
  if (f0.ValidCount() == 0) {
    vq.jitter = internal::EmptyContour("jitter", 0, Scale::kLinear);
    vq.shimmer = internal::EmptyContour("shimmer", 0, Scale::kLinear);
    vq.hnr_db = internal::EmptyContour("hnr_db", 0, Scale::kLevel);
    return vq;
  }
  vq.jitter = internal::EmptyContour("jitter", n_frames, Scale::kLinear);
  vq.shimmer = internal::EmptyContour("shimmer", n_frames, Scale::kLinear);
  vq.hnr_db = internal::EmptyContour("hnr_db", n_frames, Scale::kLevel);

  const std::size_t len = cfg.frames.FrameLength(x.sample_rate);
  const std::size_t hop = cfg.frames.Hop(x.sample_rate);
  const double fs = x.sample_rate;

  // Per-frame accumulators of period / amplitude pair statistics.
  std::vector<double> dp(n_frames, 0.0), pm(n_frames, 0.0);
  std::vector<double> da(n_frames, 0.0), am(n_frames, 0.0);
  std::vector<std::size_t> cnt(n_frames, 0);

  auto frame_of = [&](double pos) {
    const double c = (pos - 0.5 * static_cast<double>(len)) / static_cast<double>(hop);
    return static_cast<std::size_t>(
        std::clamp(std::lround(c), 0L, static_cast<long>(n_frames) - 1));
  };

  std::size_t f = 0;
  while (f < n_frames) {
    if (!f0.valid[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < n_frames && f0.valid[g]) ++g;
    const std::size_t begin = f * hop;
    const std::size_t end = std::min(x.size(), (g - 1) * hop + len);
    auto period_at = [&](double pos) {
      std::size_t k = std::clamp(frame_of(pos), f, g - 1);
      return fs / f0.values[k];
    };

    std::vector<Mark> marks;
    const double t0 = period_at(static_cast<double>(begin));
    const auto first_hi = std::min(end, begin + static_cast<std::size_t>(std::ceil(t0)));
    if (first_hi > begin + 1) {
      marks.push_back(RefinePeak(x.samples, ArgMax(x.samples, begin, first_hi)));
      while (true) {
        const double m = marks.back().pos;
        const double t = period_at(m);
        const auto lo = static_cast<std::size_t>(std::ceil(m + 0.7 * t));
        const auto hi = static_cast<std::size_t>(std::floor(m + 1.3 * t)) + 1;
        if (hi > end) break;
        marks.push_back(RefinePeak(x.samples, ArgMax(x.samples, lo, hi)));
      }
    }
    for (std::size_t k = 2; k < marks.size(); ++k) {
      const double p0 = marks[k - 1].pos - marks[k - 2].pos;
      const double p1 = marks[k].pos - marks[k - 1].pos;
      const double a0 = std::abs(marks[k - 1].amp);
      const double a1 = std::abs(marks[k].amp);
      // Attach the pair to every frame whose window contains the last mark.
      const double pos = marks[k].pos;
      for (std::size_t fr = f; fr < g; ++fr) {
        const double s = static_cast<double>(fr * hop);
        if (pos < s || pos >= s + static_cast<double>(len)) continue;
        dp[fr] += std::abs(p1 - p0);
        pm[fr] += 0.5 * (p0 + p1);
        da[fr] += std::abs(a1 - a0);
        am[fr] += 0.5 * (a0 + a1);
        ++cnt[fr];
      }
    }
    f = g;
  }
  for (std::size_t fr = 0; fr < n_frames; ++fr) {
    if (cnt[fr] == 0) continue;
    vq.jitter.values[fr] = dp[fr] / pm[fr];
    vq.jitter.valid[fr] = true;
    if (am[fr] > 0.0) {
      vq.shimmer.values[fr] = da[fr] / am[fr];
      vq.shimmer.valid[fr] = true;
    }
  }

  const internal::NccfAnalyzer nccf(x, cfg);
  const double r_cap = 1.0 / (1.0 + std::pow(10.0, -kHnrCapDb / 10.0));
  for (std::size_t fr = 0; fr < std::min(n_frames, nccf.frame_count()); ++fr) {
    const internal::NccfFrame a = nccf.Analyze(fr);
    if (a.silent) continue;
    double best = *std::max_element(a.r.begin() + 1, a.r.end() - 1);
    best = std::clamp(best, 1.0 - r_cap, r_cap);
    vq.hnr_db.values[fr] = 10.0 * std::log10(best / (1.0 - best));
    vq.hnr_db.valid[fr] = true;
  }
  return vq;
}

}  // namespace cogspeech::features
