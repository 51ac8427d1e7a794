#include "cogspeech/streams/streams.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cogspeech/common/error.h"

namespace cogspeech::streams {
namespace {

void RequireParticipant(const corpus::Timeline& tl, const std::string& participant) {
  if (!tl.HasSpeaker(participant)) {
    throw ValidationError("participant '" + participant + "' not in timeline");
  }
}

double WindowDb(const Signal& x, std::size_t begin, std::size_t end, double floor_db) {
  if (end <= begin) return floor_db;
  double e = 0.0;
  for (std::size_t i = begin; i < end; ++i) e += x.samples[i] * x.samples[i];
  const double ms = e / static_cast<double>(end - begin);
  if (ms <= 0.0) return floor_db;
  return std::max(floor_db, 10.0 * std::log10(ms));
}

}  // namespace

Signal BuildProsodyPreserved(const Signal& x, const corpus::Timeline& tl,
                             const std::string& participant,
                             const MaskOptions& options) {
  RequireParticipant(tl, participant);
  const std::size_t n = x.size();
  std::vector<char> masked(n, 0);
  for (const auto& seg : tl.segments()) {
    if (seg.speaker == participant) continue;
    const std::size_t b = TimeToSample(seg.onset, x.sample_rate, n);
    const std::size_t e = TimeToSample(seg.end(), x.sample_rate, n);
    std::fill(masked.begin() + b, masked.begin() + e, 1);
  }
  if (options.participant_priority) {
    for (const auto& seg : tl.SegmentsOf(participant)) {
      const std::size_t b = TimeToSample(seg.onset, x.sample_rate, n);
      const std::size_t e = TimeToSample(seg.end(), x.sample_rate, n);
      std::fill(masked.begin() + b, masked.begin() + e, 0);
    }
  }

  Signal out = x;
  const auto taper =
      static_cast<std::size_t>(std::lround(options.taper_ms * 1e-3 * x.sample_rate));
  std::size_t i = 0;
  while (i < n) {
    if (!masked[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && masked[j]) ++j;
    // Masked run [i, j).
    const std::size_t len = j - i;
    const std::size_t fade = std::min(taper, len / 2);
    for (std::size_t k = i; k < j; ++k) out.samples[k] = 0.0;
    for (std::size_t k = 0; k < fade; ++k) {
      // Gain falls from ~1 to ~0 across the fade.
      const double g = 0.5 * (1.0 + std::cos(std::numbers::pi * (k + 1.0) / (fade + 1.0)));
      if (i > 0) out.samples[i + k] = x.samples[i + k] * g;
      if (j < n) out.samples[j - 1 - k] = x.samples[j - 1 - k] * g;
    }
    i = j;
  }
  return out;
}

ConcatResult BuildConcatenated(const Signal& x, const corpus::Timeline& tl,
                               const std::string& participant, double crossfade_ms) {
  RequireParticipant(tl, participant);
  if (!(crossfade_ms >= 0.0)) throw ConfigError("crossfade_ms must be >= 0");
  const auto fade = static_cast<std::size_t>(std::lround(crossfade_ms * 1e-3 * x.sample_rate));

  ConcatResult out;
  out.signal.sample_rate = x.sample_rate;
  for (const auto& seg : tl.SegmentsOf(participant)) {
    const std::size_t b = TimeToSample(seg.onset, x.sample_rate, x.size());
    const std::size_t e = TimeToSample(seg.end(), x.sample_rate, x.size());
    if (e > b) out.spans.push_back({b, e});
  }
  if (out.spans.empty()) {
    throw ValidationError("participant '" + participant + "' has no audio segments");
  }

  std::vector<double>& y = out.signal.samples;
  const SegmentSpan& first = out.spans.front();
  y.assign(x.samples.begin() + first.begin, x.samples.begin() + first.end);
  for (std::size_t s = 1; s < out.spans.size(); ++s) {
    const SegmentSpan& prev = out.spans[s - 1];
    const SegmentSpan& cur = out.spans[s];
    const bool hard = fade == 0 || prev.size() < 2 * fade || cur.size() < 2 * fade;
    out.hard_joins.push_back(hard);
    const auto* src = x.samples.data() + cur.begin;
    if (hard) {
      out.boundaries.push_back(y.size());
      y.insert(y.end(), src, src + cur.size());
      continue;
    }
    const std::size_t start = y.size() - fade;
    out.boundaries.push_back(start);
    const double len = static_cast<double>(fade);
    for (std::size_t k = 0; k < fade; ++k) {
      const double r = static_cast<double>(k) / len;
      y[start + k] = (1.0 - r) * y[start + k] + r * src[k];
    }
    y.insert(y.end(), src + fade, src + cur.size());
  }
  return out;
}

std::vector<TransitionFlag> AuditTransitions(const Signal& x,
                                             const std::vector<std::size_t>& boundaries,
                                             const AuditOptions& options) {
  const auto win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(options.window_ms * 1e-3 * x.sample_rate)));
  std::vector<TransitionFlag> flags;
  for (std::size_t b : boundaries) {
    if (b == 0 || b >= x.size()) {
      throw ValidationError("boundary " + std::to_string(b) + " outside signal");
    }
    TransitionFlag f;
    f.boundary = b;
    f.step = std::abs(x.samples[b] - x.samples[b - 1]);
    const double before = WindowDb(x, b >= win ? b - win : 0, b, options.floor_dbfs);
    const double after = WindowDb(x, b, std::min(x.size(), b + win), options.floor_dbfs);
    f.rms_jump_db = std::abs(after - before);
    f.flagged = f.step > options.max_step || f.rms_jump_db > options.max_rms_jump_db;
    flags.push_back(f);
  }
  return flags;
}

}  // namespace cogspeech::streams
