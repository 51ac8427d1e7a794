#ifndef COGSPEECH_DIAR_GRID_SEARCH_H_
#define COGSPEECH_DIAR_GRID_SEARCH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogspeech/diar/adapter.h"
#include "cogspeech/diar/metrics.h"
#include "cogspeech/dsp/chain.h"

namespace cogspeech::diar {

// Parameter name -> candidate values, in declaration order. Values are kept
// as canonical text (numbers in shortest round-trip form, booleans as
// true/false).
//
// Accepted names: highpass.enabled, highpass.order, highpass.cutoff_hz,
// gate.enabled, gate.frame_ms, gate.hop_ms, gate.noise_quantile,
// gate.margin_db, gate.alpha, loudness.enabled, loudness.target_lufs,
// output_gain_db, and any diarizer.<x> or vad.<x> (forwarded to the adapter).
struct GridParameter {
  std::string name;
  std::vector<std::string> values;
};

struct GridSchema {
  std::vector<GridParameter> parameters;
  // Number of points in the Cartesian product.
  std::size_t Size() const;
};

// JSON object {"name": [v, ...], ...}; throws ConfigError.
GridSchema ParseGridSchema(std::string_view json_text);
GridSchema LoadGridSchema(const std::filesystem::path& path);

// Ordered as the schema parameters.
using GridPoint = std::vector<std::pair<std::string, std::string>>;

// Point `index` of the product; the last parameter varies fastest.
GridPoint PointAt(const GridSchema& schema, std::size_t index);

// Overlays the dsp entries of `point` onto `base`; throws ConfigError on a
// malformed value.
dsp::PreprocessConfig ApplyGridPoint(const GridPoint& point,
                                     dsp::PreprocessConfig base);
// diarizer.* and vad.* entries.
std::map<std::string, std::string> AdapterParams(const GridPoint& point);

struct ParticipantSplit {
  std::set<std::string> tuning;
  std::set<std::string> validation;
};

// Shuffles distinct subject ids with `seed` and assigns
// round(fraction * n) of them (at least 1, at most n - 1) to validation.
// Throws ValidationError with fewer than two subjects.
ParticipantSplit SplitParticipants(const std::vector<DiarSession>& sessions,
                                   double validation_fraction,
                                   std::uint64_t seed);

// Aggregate over a session set. DER, purity and coverage are pooled over
// time; JER is the mean over sessions. NaN when undefined.
struct DiarMetrics {
  double der = 0.0;
  double jer = 0.0;
  double purity = 0.0;
  double coverage = 0.0;
};

struct GridResult {
  std::size_t index = 0;
  GridPoint point;
  bool failed = false;
  std::string error;
  DiarMetrics tuning;
  // Filled for the top-ranked point only.
  std::optional<DiarMetrics> validation;
};

struct GridSearchOptions {
  ScoringConfig scoring;
  dsp::PreprocessConfig base;
  double validation_fraction = 0.3;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct GridSearchResult {
  // Successful points by tuning DER asc, JER asc, purity desc, index asc;
  // failed points follow in index order.
  std::vector<GridResult> ranked;
  ParticipantSplit split;
  std::size_t failed_count = 0;
};

// Throws AdapterError when every point fails.
GridSearchResult RunGridSearch(const GridSchema& schema,
                               const std::vector<DiarSession>& sessions,
                               DiarizerAdapter& adapter,
                               const GridSearchOptions& options);

// Header: rank,index,<parameters>,status,tuning_der,tuning_jer,
// tuning_purity,tuning_coverage,validation_der,... ; empty cells when absent.
std::string GridResultsToCsv(const GridSchema& schema,
                             const GridSearchResult& result);

}  // namespace cogspeech::diar

#endif  // COGSPEECH_DIAR_GRID_SEARCH_H_
