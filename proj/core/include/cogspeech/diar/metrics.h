#ifndef COGSPEECH_DIAR_METRICS_H_
#define COGSPEECH_DIAR_METRICS_H_

#include <map>
#include <optional>
#include <string>

#include "cogspeech/corpus/types.h"

namespace cogspeech::diar {

using corpus::Timeline;

struct ScoringConfig {
  // Half-width of the exclusion zone around every reference boundary.
  double collar_s = 0.250;
  // Resolution of frame-based cross-checks; interval scoring is exact.
  double frame_s = 0.010;
  // When false, regions with more than one reference speaker are skipped.
  bool score_overlap = true;
};

// Hypothesis speaker -> reference speaker.
using SpeakerMapping = std::map<std::string, std::string>;

// One-to-one partial mapping maximising total overlap duration. Pairs with
// zero overlap are left unmapped.
SpeakerMapping OptimalSpeakerMapping(const Timeline& ref, const Timeline& hyp);

struct DerBreakdown {
  double missed_s = 0.0;
  double false_alarm_s = 0.0;
  double confusion_s = 0.0;
  double scored_total_s = 0.0;
  // nullopt when no reference time is scored.
  std::optional<double> der;
  // Mapping that was optimal over the scored region.
  SpeakerMapping mapping;

  double errors_s() const { return missed_s + false_alarm_s + confusion_s; }
};

// md-eval style scoring: the collar zones [b - collar, b + collar] around
// every reference segment boundary are removed, the speaker mapping is
// optimised over what remains, and each elementary interval contributes
//   missed = max(0, Nref - Nhyp), false alarm = max(0, Nhyp - Nref),
//   confusion = min(Nref, Nhyp) - Ncorrect
// times its duration.
DerBreakdown ComputeDer(const Timeline& ref, const Timeline& hyp,
                        const ScoringConfig& cfg = {});

// Mean over reference speakers of 1 - |ref ∩ hyp| / |ref ∪ hyp|, with the
// mapping chosen to minimise that mean; unmapped reference speakers score 1.
// No collar is applied. nullopt for an empty reference.
std::optional<double> ComputeJer(const Timeline& ref, const Timeline& hyp);

struct PurityCoverage {
  double purity_overlap_s = 0.0;   // sum over hyp clusters of best overlap
  double hyp_total_s = 0.0;
  double coverage_overlap_s = 0.0; // sum over ref speakers of best overlap
  double ref_total_s = 0.0;

  std::optional<double> purity() const {
    if (!(hyp_total_s > 0.0)) return std::nullopt;
    return purity_overlap_s / hyp_total_s;
  }
  std::optional<double> coverage() const {
    if (!(ref_total_s > 0.0)) return std::nullopt;
    return coverage_overlap_s / ref_total_s;
  }
};

PurityCoverage ComputePurityCoverage(const Timeline& ref, const Timeline& hyp);

struct DiarizationScores {
  DerBreakdown der;
  std::optional<double> jer;
  PurityCoverage purity_coverage;
};

DiarizationScores ScoreDiarization(const Timeline& ref, const Timeline& hyp,
                                   const ScoringConfig& cfg = {});

// Total duration of the overlap of two speakers' merged intervals.
double SpeakerOverlap(const Timeline& a, const std::string& speaker_a,
                      const Timeline& b, const std::string& speaker_b);

}  // namespace cogspeech::diar

#endif  // COGSPEECH_DIAR_METRICS_H_
