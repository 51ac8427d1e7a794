#ifndef COGSPEECH_CORPUS_RTTM_H_
#define COGSPEECH_CORPUS_RTTM_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "cogspeech/corpus/types.h"

namespace cogspeech::corpus {

// Parses SPEAKER lines (type, file, channel, onset, duration, ortho, stype,
// name, conf[, slat]). Blank lines and lines starting with ';' or '#' are
// skipped. Times are rounded to milliseconds. Throws ParseError with the
// offending line number for malformed lines and ValidationError for
// non-positive durations or same-speaker overlap.
Timeline ParseRttm(std::string_view text);
Timeline ReadRttmFile(const std::filesystem::path& path);

// One SPEAKER line per segment, times printed with three decimals.
std::string SerializeRttm(const Timeline& timeline,
                          std::string_view recording_id);
void WriteRttmFile(const std::filesystem::path& path, const Timeline& timeline,
                   std::string_view recording_id);

}  // namespace cogspeech::corpus

#endif  // COGSPEECH_CORPUS_RTTM_H_
