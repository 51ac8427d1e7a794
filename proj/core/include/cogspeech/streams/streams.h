#ifndef COGSPEECH_STREAMS_STREAMS_H_
#define COGSPEECH_STREAMS_STREAMS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cogspeech/common/signal.h"
#include "cogspeech/corpus/types.h"

namespace cogspeech::streams {

struct MaskOptions {
  // Participant speech wins where it overlaps other speakers.
  bool participant_priority = true;
  // Raised-cosine fade applied inside the masked region at each edge.
  // 0 disables it; then masked samples are exact zeros.
  double taper_ms = 0.0;
};

// Examiner (every non-participant speaker) masked to digital zero; length
// and all other samples unchanged. Throws ValidationError when
// `participant` is not in the timeline.
Signal BuildProsodyPreserved(const Signal& x, const corpus::Timeline& tl,
                             const std::string& participant,
                             const MaskOptions& options = {});

// Sample range [begin, end) of one extracted participant segment.
struct SegmentSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct ConcatResult {
  Signal signal;
  // Output sample index where each segment after the first starts.
  std::vector<std::size_t> boundaries;
  // Source span of each segment, in output order.
  std::vector<SegmentSpan> spans;
  // Per junction: true when a segment was shorter than two fades and was
  // butted without a cross-fade.
  std::vector<bool> hard_joins;
};

// Participant segments in temporal order, adjacent ones overlapped by
// `crossfade_ms` with ramps r_i = i/L and 1 - r_i. Output length is
// sum(len) - (joins faded) * L. Throws ValidationError when the participant
// has no segment of nonzero sample length.
ConcatResult BuildConcatenated(const Signal& x, const corpus::Timeline& tl,
                               const std::string& participant,
                               double crossfade_ms = 10.0);

struct TransitionFlag {
  std::size_t boundary = 0;
  double step = 0.0;         // |x[b] - x[b-1]|
  double rms_jump_db = 0.0;  // |level after - level before| over 10 ms
  bool flagged = false;
};

struct AuditOptions {
  double max_step = 0.2;
  double max_rms_jump_db = 20.0;
  double window_ms = 10.0;
  // Windows quieter than this are clamped so silence-to-silence is 0 dB.
  double floor_dbfs = -100.0;
};

// One entry per boundary; throws ValidationError for a boundary outside
// (0, size).
std::vector<TransitionFlag> AuditTransitions(const Signal& x,
                                             const std::vector<std::size_t>& boundaries,
                                             const AuditOptions& options = {});

}  // namespace cogspeech::streams

#endif  // COGSPEECH_STREAMS_STREAMS_H_
