#ifndef COGSPEECH_CORPUS_VALIDATE_H_
#define COGSPEECH_CORPUS_VALIDATE_H_

#include <string>
#include <vector>

#include "cogspeech/corpus/manifest.h"
#include "cogspeech/corpus/types.h"

namespace cogspeech::corpus {

enum class IssueKind {
  kThresholdMismatch,
  kOutOfRange,
  kNonFinite,
  kGroupContradiction,
  kSplitLeakage,
};

std::string_view ToString(IssueKind kind);

struct Issue {
  IssueKind kind;
  std::string session_id;
  std::string subject_id;
  std::string message;
};

// Pure report over in-memory records; never throws.
std::vector<Issue> ValidateHierarchy(const std::vector<SessionRecord>& records,
                                     const ScoreRanges& ranges);
std::vector<Issue> ValidateHierarchy(const std::vector<SessionRecord>& records);

}  // namespace cogspeech::corpus

#endif  // COGSPEECH_CORPUS_VALIDATE_H_
