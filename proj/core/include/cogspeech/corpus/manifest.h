#ifndef COGSPEECH_CORPUS_MANIFEST_H_
#define COGSPEECH_CORPUS_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cogspeech/corpus/types.h"

namespace cogspeech::corpus {

// Closed interval of admissible values for one score column.
struct ScoreRange {
  double lo;
  double hi;
  bool Contains(double v) const { return v >= lo && v <= hi; }
};

// Keyed by manifest column name (pf, mmse, lan, cerad_total, ...). Columns
// without an entry are only checked for finiteness.
using ScoreRanges = std::map<std::string, ScoreRange>;

// Task score ranges assumed when the header declares none.
ScoreRanges DefaultScoreRanges();

struct Manifest {
  std::vector<SessionRecord> records;
  ScoreRanges ranges;
  std::filesystem::path base_dir;  // audio paths are relative to this

  std::filesystem::path AudioPath(const SessionRecord& r) const;
};

// Manifest CSV layout:
//
//   # range lan 0 1            <- optional directives before the header
//   session_id,subject_id,group,task,split,audio_path,sample_rate,pf,vf,rl,
//   rw,bnt,mmse,lan,mem,exe,vis,cerad_total,cerad_binary,mci[,participant]
//
// The first seven columns are required, the score columns may be omitted or
// left empty. cerad_binary is derived from cerad_total when empty; a
// contradiction between the two, or between group and mci, is an error.
Manifest ParseManifest(const std::string& text);
Manifest LoadManifest(const std::filesystem::path& path);

std::string SerializeManifest(const Manifest& manifest);

}  // namespace cogspeech::corpus

#endif  // COGSPEECH_CORPUS_MANIFEST_H_
