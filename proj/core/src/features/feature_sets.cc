#include "cogspeech/features/feature_sets.h"

#include <algorithm>
#include <cmath>

#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"
#include "cogspeech/common/text.h"
#include "frame_analysis.h"

namespace cogspeech::features {
namespace {

std::string Prefixed(std::string_view s) { return std::string(kFeaturePrefix) + std::string(s); }

std::vector<std::string> FunctionalNames(const std::string& contour, Scale scale) {
  return {Prefixed(contour + "_mean"),
          Prefixed(contour + (scale == Scale::kLevel ? "_sd" : "_cov"))};
}

// Runs of `flag` as (start, length) in frames or samples.
template <typename Pred>
std::vector<std::pair<std::size_t, std::size_t>> Runs(std::size_t n, Pred pred) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < n) {
    if (!pred(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && pred(j)) ++j;
    runs.emplace_back(i, j - i);
    i = j;
  }
  return runs;
}

const std::vector<std::string>& ProsodyScalars() {
  static const std::vector<std::string> names = {
      "voiced_ratio",        "voiced_segments_per_s", "voiced_segment_mean_s",
      "unvoiced_segment_mean_s", "pause_rate_per_s",  "pause_mean_s",
      "pause_max_s",         "pause_ratio"};
  return names;
}

LldContour LevelContour(const Signal& x, const FrameConfig& frames) {
  const std::size_t len = frames.FrameLength(x.sample_rate);
  const std::size_t hop = frames.Hop(x.sample_rate);
  const std::size_t n = frames.FrameCount(x.size(), x.sample_rate);
  LldContour c = internal::EmptyContour("level_db", n, Scale::kLevel);
  for (std::size_t f = 0; f < n; ++f) {
    double e = 0.0;
    for (std::size_t i = f * hop; i < f * hop + len; ++i) e += x.samples[i] * x.samples[i];
    if (e <= 0.0) continue;
    c.values[f] = 10.0 * std::log10(e / static_cast<double>(len));
    c.valid[f] = true;
  }
  return c;
}

void AddProsody(const Signal& x, const ExtractionConfig& cfg, FeatureVector& out,
                std::vector<Absence>& absences) {
  LldContour f0 = TrackF0(x, cfg.f0);
  f0.name = "f0_st";
  ApplyFunctionals(f0, out, absences);
  ApplyFunctionals(LevelContour(x, cfg.f0.frames), out, absences);

  const double dur = x.duration_s();
  const double hop_s = static_cast<double>(cfg.f0.frames.Hop(x.sample_rate)) / x.sample_rate;
  const std::size_t n_frames = f0.valid.size();
  auto absent = [&](const std::string& name, const std::string& why) {
    absences.push_back({Prefixed(name), why});
  };
  if (n_frames == 0 || dur <= 0.0) {
    for (const auto& s : ProsodyScalars()) absent(s, "stream shorter than one frame");
    return;
  }
  const auto voiced = Runs(n_frames, [&](std::size_t i) { return bool(f0.valid[i]); });
  const auto unvoiced = Runs(n_frames, [&](std::size_t i) { return !f0.valid[i]; });
  out.Add(Prefixed("voiced_ratio"),
          static_cast<double>(f0.ValidCount()) / static_cast<double>(n_frames));
  out.Add(Prefixed("voiced_segments_per_s"), static_cast<double>(voiced.size()) / dur);
  auto mean_len = [&](const auto& runs) {
    double s = 0.0;
    for (const auto& r : runs) s += static_cast<double>(r.second);
    return s * hop_s / static_cast<double>(runs.size());
  };
  if (voiced.empty()) absent("voiced_segment_mean_s", "no voiced frames");
  else out.Add(Prefixed("voiced_segment_mean_s"), mean_len(voiced));
  if (unvoiced.empty()) absent("unvoiced_segment_mean_s", "no unvoiced frames");
  else out.Add(Prefixed("unvoiced_segment_mean_s"), mean_len(unvoiced));

  const auto min_len = static_cast<std::size_t>(std::ceil(cfg.min_pause_s * x.sample_rate - 1e-9));
  auto zero_runs = Runs(x.size(), [&](std::size_t i) { return x.samples[i] == 0.0; });
  std::erase_if(zero_runs, [&](const auto& r) { return r.second < min_len; });
  double total = 0.0, longest = 0.0;
  for (const auto& r : zero_runs) {
    const double s = static_cast<double>(r.second) / x.sample_rate;
    total += s;
    longest = std::max(longest, s);
  }
  out.Add(Prefixed("pause_rate_per_s"), static_cast<double>(zero_runs.size()) / dur);
  out.Add(Prefixed("pause_mean_s"),
          zero_runs.empty() ? 0.0 : total / static_cast<double>(zero_runs.size()));
  out.Add(Prefixed("pause_max_s"), longest);
  out.Add(Prefixed("pause_ratio"), total / dur);
}

void AddVqual(const Signal& x, const ExtractionConfig& cfg, FeatureVector& out,
              std::vector<Absence>& absences, std::size_t& skipped) {
  const LldContour f0 = TrackF0(x, cfg.f0);
  const VoiceQuality vq = JitterShimmerHnr(x, f0, cfg.f0);
  ApplyFunctionals(vq.jitter, out, absences);
  ApplyFunctionals(vq.shimmer, out, absences);
  ApplyFunctionals(vq.hnr_db, out, absences);
  for (const LldContour& c : SpectralSlopes(x, f0, cfg.slope_bands, cfg.f0.frames)) {
    ApplyFunctionals(c, out, absences);
  }
  FormantConfig fc = cfg.formants;
  fc.frames = cfg.f0.frames;
  const FormantTracks ft = FormantBandwidths(x, f0, fc);
  skipped = ft.skipped_frames;
  for (const LldContour* c : {&ft.f1_hz, &ft.f1_bw_hz, &ft.f2_hz, &ft.f2_bw_hz}) {
    ApplyFunctionals(*c, out, absences);
  }
}

void MarkAbsent(SetTag tag, const ExtractionConfig& cfg, const std::string& why,
                std::vector<Absence>& absences) {
  for (auto& n : CanonicalFeatureNames(tag, cfg)) absences.push_back({n, why});
}

}  // namespace

std::string_view ToString(SetTag tag) {
  switch (tag) {
    case SetTag::kEgProsody: return "EG_PROSODY";
    case SetTag::kEgVqual: return "EG_VQUAL";
    case SetTag::kEgAll: return "EG_ALL";
    case SetTag::kEmbedding: return "EMBEDDING";
  }
  return "";
}

SetTag ParseSetTag(std::string_view s) {
  for (SetTag t : {SetTag::kEgProsody, SetTag::kEgVqual, SetTag::kEgAll, SetTag::kEmbedding}) {
    if (ToString(t) == s) return t;
  }
  throw ConfigError("unknown feature set '" + std::string(s) + "'");
}

bool FeatureVector::Has(std::string_view name) const {
  return std::any_of(values.begin(), values.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

double FeatureVector::Get(std::string_view name) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  throw ValidationError("feature '" + std::string(name) + "' absent");
}

void FeatureVector::Add(std::string name, double value) {
  if (!std::isfinite(value)) {
    throw ValidationError("feature '" + name + "' is not finite");
  }
  if (Has(name)) throw ValidationError("duplicate feature '" + name + "'");
  values.emplace_back(std::move(name), value);
}

double HzToSemitone(double hz) { return 12.0 * std::log2(hz / kSemitoneRefHz); }

void ApplyFunctionals(const LldContour& contour, FeatureVector& out,
                      std::vector<Absence>& absences) {
  const auto names = FunctionalNames(contour.name, contour.scale);
  std::vector<double> v = contour.ValidValues();
  if (v.empty()) {
    for (const auto& n : names) absences.push_back({n, "no valid frames in " + contour.name});
    return;
  }
  if (contour.scale == Scale::kSemitone) {
    for (double& x : v) x = HzToSemitone(x);
  }
  const double mean = Mean(v);
  const double sd = PopulationSd(v);
  out.Add(names[0], mean);
  if (contour.scale == Scale::kLevel || std::abs(mean) < 1e-12) {
    out.Add(names[1], sd);
  } else {
    out.Add(names[1], sd / mean);
  }
}

FeatureVector ApplyFunctionals(const std::vector<LldContour>& contours,
                               std::vector<Absence>* absences) {
  if (contours.empty()) throw ValidationError("no contours given");
  FeatureVector out;
  std::vector<Absence> local;
  for (const auto& c : contours) ApplyFunctionals(c, out, local);
  if (absences) absences->insert(absences->end(), local.begin(), local.end());
  return out;
}

std::vector<std::string> CanonicalFeatureNames(SetTag tag, const ExtractionConfig& cfg) {
  std::vector<std::string> names;
  auto add = [&](const std::string& c, Scale s) {
    for (auto& n : FunctionalNames(c, s)) names.push_back(std::move(n));
  };
  if (tag == SetTag::kEgProsody || tag == SetTag::kEgAll) {
    add("f0_st", Scale::kSemitone);
    add("level_db", Scale::kLevel);
    for (const auto& s : ProsodyScalars()) names.push_back(Prefixed(s));
  }
  if (tag == SetTag::kEgVqual || tag == SetTag::kEgAll) {
    add("jitter", Scale::kLinear);
    add("shimmer", Scale::kLinear);
    add("hnr_db", Scale::kLevel);
    for (const auto& b : cfg.slope_bands) {
      const std::string base = "slope" + FormatDouble(b.lo_hz) + "_" + FormatDouble(b.hi_hz);
      add(base + "_voiced", Scale::kLevel);
      add(base + "_unvoiced", Scale::kLevel);
    }
    for (const char* c : {"f1_hz", "f1_bw_hz", "f2_hz", "f2_bw_hz"}) add(c, Scale::kLinear);
  }
  if (tag == SetTag::kEmbedding) throw ValidationError("embedding names depend on the input");
  return names;
}

FeatureSets ExtractFeatureSets(const Signal* prosody_stream, const Signal* concat_stream,
                               const ExtractionConfig& cfg) {
  FeatureSets fs;
  if (prosody_stream) {
    AddProsody(*prosody_stream, cfg, fs.prosody, fs.absences);
  } else {
    MarkAbsent(SetTag::kEgProsody, cfg, "prosody stream unavailable", fs.absences);
  }
  if (concat_stream) {
    AddVqual(*concat_stream, cfg, fs.vqual, fs.absences, fs.formant_frames_skipped);
  } else {
    MarkAbsent(SetTag::kEgVqual, cfg, "concatenated stream unavailable", fs.absences);
  }
  for (const auto* part : {&fs.prosody, &fs.vqual}) {
    for (const auto& [k, v] : part->values) fs.all.Add(k, v);
  }
  return fs;
}

}  // namespace cogspeech::features
