#ifndef COGSPEECH_QC_QC_H_
#define COGSPEECH_QC_QC_H_

#include <string>
#include <vector>

#include "cogspeech/common/signal.h"

namespace cogspeech::qc {

// Acceptance thresholds. Every comparison is strict: a value sitting exactly
// on a threshold fails.
struct QcThresholds {
  double min_duration_s = 15.0;
  double min_rms_dbfs = -55.0;
  double max_clip_ratio = 0.015;
  double min_snr_db = 10.0;
};

inline constexpr double kSilenceDbfs = -120.0;

struct FrameSettings {
  double frame_s = 0.025;
  double hop_s = 0.010;
};

enum class Metric { kDurationS, kRmsDbfs, kClipRatio, kSnrDb, kActivityRatio };

// One clause of a review rule: `metric > value` or `metric <= value`.
struct Condition {
  enum class Cmp { kGreater, kAtMost };
  Metric metric;
  Cmp cmp;
  double value;
};

// Fires when every condition holds; `reason` goes into the report.
struct ReviewRule {
  std::string reason;
  std::vector<Condition> all_of;
};

// activity > 0.5 with SNR <= 10 dB, and SNR > 25 dB with RMS <= -55 dBFS.
std::vector<ReviewRule> DefaultReviewRules();

struct QcOptions {
  double clip_level = 0.999;
  FrameSettings frames;
  double speech_quantile = 0.95;
  double noise_quantile = 0.15;
  double vad_margin_db = 6.0;
  // Frames at or below this level never count as active.
  double vad_floor_dbfs = -90.0;
  // Compute the energy gate on active frames instead of the whole file.
  bool rms_on_active_frames = false;
  std::vector<ReviewRule> review_rules = DefaultReviewRules();
};

struct QcMetrics {
  double duration_s = 0.0;
  double rms_dbfs = kSilenceDbfs;
  double clip_ratio = 0.0;
  double snr_db = 0.0;          // NaN when the signal is shorter than 1 s
  double activity_ratio = 0.0;  // NaN when the signal is shorter than 1 s
};

enum class Verdict { kPass, kFail, kReview };
std::string_view ToString(Verdict v);

struct QcReport {
  QcMetrics metrics;
  bool duration_ok = false;
  bool rms_ok = false;
  bool clip_ok = false;
  bool snr_ok = false;
  Verdict overall = Verdict::kFail;
  std::vector<std::string> review_reasons;
};

// 20*log10(RMS), floored at -120 dBFS. Throws ValidationError when empty.
double RmsDbfs(const Signal& x);

// Fraction of samples with |x| >= clip_level. Throws when empty.
double ClippingRatio(const Signal& x, double clip_level = 0.999);

// Per-frame RMS level in dBFS over frames fully inside the signal.
std::vector<double> FrameLevelsDb(const Signal& x, const FrameSettings& frames);

// speech_quantile minus noise_quantile of the frame levels, in dB. Throws
// ValidationError when the signal is shorter than 1 s.
double EstimateSnrQuantile(const Signal& x, const FrameSettings& frames = {},
                           double speech_quantile = 0.95,
                           double noise_quantile = 0.15);

// Per-frame activity decisions of the energy VAD. A frame is active when its
// level exceeds the vad floor and
//   min(noise level + margin, speech level - margin),
// where the levels are the noise/speech quantiles of the frame levels. The
// second term keeps a constant-level recording classified as active.
std::vector<bool> ActiveFrames(const Signal& x, const QcOptions& options);

// Fraction of frames classified active. Throws when shorter than 1 s.
double SpeechActivityRatio(const Signal& x, const QcOptions& options = {});

QcMetrics MeasureQc(const Signal& x, const QcOptions& options = {});

// Pure decision over measured metrics. If a review rule fires the verdict
// is kReview, unless the duration or clipping gate fails (no rule can
// rescue those). Otherwise kPass iff all four gates pass.
QcReport DecideQc(const QcMetrics& metrics, const QcThresholds& t = {},
                  const std::vector<ReviewRule>& rules = DefaultReviewRules());

QcReport QcGate(const Signal& x, const QcThresholds& t = {},
                const QcOptions& options = {});

// Single-line JSON rendering of a report.
std::string ReportToJson(const QcReport& report, const std::string& session_id);

}  // namespace cogspeech::qc

#endif  // COGSPEECH_QC_QC_H_
