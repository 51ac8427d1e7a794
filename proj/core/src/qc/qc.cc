#include "cogspeech/qc/qc.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"
#include "json.hpp"

namespace cogspeech::qc {
namespace {

constexpr double kMinAnalysisS = 1.0;

double MetricValue(const QcMetrics& m, Metric metric) {
  switch (metric) {
    case Metric::kDurationS: return m.duration_s;
    case Metric::kRmsDbfs: return m.rms_dbfs;
    case Metric::kClipRatio: return m.clip_ratio;
    case Metric::kSnrDb: return m.snr_db;
    case Metric::kActivityRatio: return m.activity_ratio;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void RequireAnalysisLength(const Signal& x) {
  if (x.duration_s() < kMinAnalysisS) {
    throw ValidationError("signal shorter than 1 s");
  }
}

struct FrameGeometry {
  std::size_t len;
  std::size_t hop;
};

FrameGeometry Geometry(const Signal& x, const FrameSettings& f) {
  const auto len = static_cast<std::size_t>(std::lround(f.frame_s * x.sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(f.hop_s * x.sample_rate));
  if (len == 0 || hop == 0) throw ConfigError("frame and hop must be positive");
  return {len, hop};
}


}  // namespace

std::vector<ReviewRule> DefaultReviewRules() {
  using Cmp = Condition::Cmp;
  return {
      {"high speech activity ratio with low SNR",
       {{Metric::kActivityRatio, Cmp::kGreater, 0.5},
        {Metric::kSnrDb, Cmp::kAtMost, 10.0}}},
      {"high SNR with low energy",
       {{Metric::kSnrDb, Cmp::kGreater, 25.0},
        {Metric::kRmsDbfs, Cmp::kAtMost, -55.0}}},
  };
}

std::string_view ToString(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kReview: return "review";
  }
  return "?";
}

double RmsDbfs(const Signal& x) {
  if (x.empty()) throw ValidationError("RMS of an empty signal");
  double ss = 0.0;
  for (double s : x.samples) ss += s * s;
  return PowerToDb(ss / static_cast<double>(x.size()), kSilenceDbfs);
}

double ClippingRatio(const Signal& x, double clip_level) {
  if (x.empty()) throw ValidationError("clipping ratio of an empty signal");
  std::size_t n = 0;
  for (double s : x.samples) {
    if (std::abs(s) >= clip_level) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(x.size());
}

std::vector<double> FrameLevelsDb(const Signal& x, const FrameSettings& frames) {
  const FrameGeometry g = Geometry(x, frames);
  std::vector<double> levels;
  if (x.size() < g.len) return levels;
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    prefix[i + 1] = prefix[i] + x.samples[i] * x.samples[i];
  }
  for (std::size_t start = 0; start + g.len <= x.size(); start += g.hop) {
    const double ms = (prefix[start + g.len] - prefix[start]) /
                      static_cast<double>(g.len);
    levels.push_back(PowerToDb(ms, kSilenceDbfs));
  }
  return levels;
}

double EstimateSnrQuantile(const Signal& x, const FrameSettings& frames,
                           double speech_quantile, double noise_quantile) {
  RequireAnalysisLength(x);
  const std::vector<double> levels = FrameLevelsDb(x, frames);
  return Quantile(levels, speech_quantile) - Quantile(levels, noise_quantile);
}

std::vector<bool> ActiveFrames(const Signal& x, const QcOptions& options) {
  RequireAnalysisLength(x);
  const std::vector<double> levels = FrameLevelsDb(x, options.frames);
  const double noise = Quantile(levels, options.noise_quantile);
  const double speech = Quantile(levels, options.speech_quantile);
  const double threshold = std::min(noise + options.vad_margin_db,
                                    speech - options.vad_margin_db);
  std::vector<bool> active(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    active[i] = levels[i] > options.vad_floor_dbfs && levels[i] > threshold;
  }
  return active;
}

double SpeechActivityRatio(const Signal& x, const QcOptions& options) {
  const std::vector<bool> active = ActiveFrames(x, options);
  if (active.empty()) return 0.0;
  const auto n = std::count(active.begin(), active.end(), true);
  return static_cast<double>(n) / static_cast<double>(active.size());
}

QcMetrics MeasureQc(const Signal& x, const QcOptions& options) {
  QcMetrics m;
  m.duration_s = x.duration_s();
  if (x.empty()) {
    m.snr_db = m.activity_ratio = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.clip_ratio = ClippingRatio(x, options.clip_level);
  if (x.duration_s() < kMinAnalysisS) {
    m.rms_dbfs = RmsDbfs(x);
    m.snr_db = m.activity_ratio = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.snr_db = EstimateSnrQuantile(x, options.frames, options.speech_quantile,
                                 options.noise_quantile);
  const std::vector<bool> active = ActiveFrames(x, options);
  const auto n_active = std::count(active.begin(), active.end(), true);
  m.activity_ratio = active.empty() ? 0.0
                                    : static_cast<double>(n_active) /
                                          static_cast<double>(active.size());
  if (options.rms_on_active_frames && n_active > 0) {
    const FrameGeometry g = Geometry(x, options.frames);
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < active.size(); ++f) {
      if (!active[f]) continue;
      for (std::size_t i = f * g.hop; i < f * g.hop + g.len; ++i) {
        ss += x.samples[i] * x.samples[i];
      }
      count += g.len;
    }
    m.rms_dbfs = PowerToDb(ss / static_cast<double>(count), kSilenceDbfs);
  } else {
    m.rms_dbfs = RmsDbfs(x);
  }
  return m;
}

QcReport DecideQc(const QcMetrics& metrics, const QcThresholds& t,
                  const std::vector<ReviewRule>& rules) {
  QcReport r;
  r.metrics = metrics;
  r.duration_ok = metrics.duration_s > t.min_duration_s;
  r.rms_ok = metrics.rms_dbfs > t.min_rms_dbfs;
  r.clip_ok = metrics.clip_ratio < t.max_clip_ratio;
  r.snr_ok = metrics.snr_db > t.min_snr_db;  // NaN compares false

  for (const ReviewRule& rule : rules) {
    bool fires = !rule.all_of.empty();
    for (const Condition& c : rule.all_of) {
      const double v = MetricValue(metrics, c.metric);
      const bool holds = c.cmp == Condition::Cmp::kGreater ? v > c.value
                                                           : v <= c.value;
      fires = fires && holds;
    }
    if (fires) r.review_reasons.push_back(rule.reason);
  }

  const bool all_ok = r.duration_ok && r.rms_ok && r.clip_ok && r.snr_ok;
  if (!r.review_reasons.empty()) {
    r.overall = (r.duration_ok && r.clip_ok) ? Verdict::kReview : Verdict::kFail;
  } else {
    r.overall = all_ok ? Verdict::kPass : Verdict::kFail;
  }
  return r;
}

QcReport QcGate(const Signal& x, const QcThresholds& t,
                const QcOptions& options) {
  return DecideQc(MeasureQc(x, options), t, options.review_rules);
}

std::string ReportToJson(const QcReport& report, const std::string& session_id) {
  nlohmann::ordered_json j;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  j["session_id"] = session_id;
  j["duration_s"] = num(report.metrics.duration_s);
  j["rms_dbfs"] = num(report.metrics.rms_dbfs);
  j["clip_ratio"] = num(report.metrics.clip_ratio);
  j["snr_db"] = num(report.metrics.snr_db);
  j["activity_ratio"] = num(report.metrics.activity_ratio);
  j["duration_ok"] = report.duration_ok;
  j["rms_ok"] = report.rms_ok;
  j["clip_ok"] = report.clip_ok;
  j["snr_ok"] = report.snr_ok;
  j["overall"] = std::string(ToString(report.overall));
  j["review_reasons"] = report.review_reasons;
  return j.dump();
}

}  // namespace cogspeech::qc
