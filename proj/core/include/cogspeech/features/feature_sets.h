#ifndef COGSPEECH_FEATURES_FEATURE_SETS_H_
#define COGSPEECH_FEATURES_FEATURE_SETS_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogspeech/common/signal.h"
#include "cogspeech/features/lld.h"

namespace cogspeech::features {

enum class SetTag { kEgProsody, kEgVqual, kEgAll, kEmbedding };

std::string_view ToString(SetTag tag);
SetTag ParseSetTag(std::string_view s);  // ConfigError

inline constexpr const char* kFeaturePrefix = "egx.";
// Reference pitch for the semitone scale (A0).
inline constexpr double kSemitoneRefHz = 27.5;

// Ordered name -> value; names unique, values finite.
struct FeatureVector {
  SetTag tag = SetTag::kEgAll;
  std::vector<std::pair<std::string, double>> values;

  bool Has(std::string_view name) const;
  // Throws ValidationError when absent.
  double Get(std::string_view name) const;
  // Appends; throws ValidationError on a duplicate name or non-finite value.
  void Add(std::string name, double value);
};

// Feature that could not be computed, with the reason.
struct Absence {
  std::string name;
  std::string reason;
};

// Functionals of one contour over its valid frames, appended to `out` as
// egx.<contour>_mean plus egx.<contour>_cov (kLinear, kSemitone) or
// egx.<contour>_sd (kLevel). CoV = population SD / mean; when |mean| is
// below 1e-12 the CoV slot carries the SD. A contour with no valid frame
// yields absences instead.
void ApplyFunctionals(const LldContour& contour, FeatureVector& out,
                      std::vector<Absence>& absences);
FeatureVector ApplyFunctionals(const std::vector<LldContour>& contours,
                               std::vector<Absence>* absences = nullptr);

double HzToSemitone(double hz);

struct ExtractionConfig {
  F0Config f0;
  FormantConfig formants;
  std::vector<SlopeBand> slope_bands = DefaultSlopeBands();
  // Runs of exact digital zero at least this long count as pauses.
  double min_pause_s = 0.100;
};

struct FeatureSets {
  FeatureVector prosody{SetTag::kEgProsody, {}};
  FeatureVector vqual{SetTag::kEgVqual, {}};
  FeatureVector all{SetTag::kEgAll, {}};
  std::vector<Absence> absences;
  std::size_t formant_frames_skipped = 0;
};

// Feature names each set can carry, in canonical order.
std::vector<std::string> CanonicalFeatureNames(SetTag tag,
                                               const ExtractionConfig& cfg = {});

// Prosody features from the prosody-preserved stream, voice-quality features
// from the concatenated stream. A null stream (missing or failed QC) makes
// its whole set absent. EG_ALL is the union in canonical order.
FeatureSets ExtractFeatureSets(const Signal* prosody_stream,
                               const Signal* concat_stream,
                               const ExtractionConfig& cfg = {});

}  // namespace cogspeech::features

#endif  // COGSPEECH_FEATURES_FEATURE_SETS_H_
