#include "cogspeech/corpus/rttm.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::corpus {
namespace {

double RoundToMillis(double t) { return std::round(t * 1000.0) / 1000.0; }

}  // namespace

Timeline ParseRttm(std::string_view text) {
  std::vector<Segment> segments;
  std::vector<int> line_of;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#' || trimmed.front() == ';') {
      if (nl == text.size()) break;
      continue;
    }
    const auto fields = SplitWhitespace(trimmed);
    if (fields.size() < 9) {
      throw ParseError("expected at least 9 fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    if (fields[0] != "SPEAKER") {
      throw ParseError("unsupported record type '" + std::string(fields[0]) +
                           "'",
                       line_no);
    }
    const auto onset = ParseDouble(fields[3]);
    const auto duration = ParseDouble(fields[4]);
    if (!onset || !duration || !std::isfinite(*onset) ||
        !std::isfinite(*duration)) {
      throw ParseError("onset/duration are not finite numbers", line_no);
    }
    Segment seg{std::string(fields[7]), RoundToMillis(*onset),
                RoundToMillis(*duration)};
    if (seg.onset < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": negative onset");
    }
    if (!(seg.duration > 0.0)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": non-positive duration");
    }
    segments.push_back(std::move(seg));
    line_of.push_back(line_no);
    if (nl == text.size()) break;
  }

  // Same-speaker overlap, reported against the later line.
  std::vector<std::size_t> order(segments.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segments[a].onset < segments[b].onset;
  });
  std::map<std::string, std::size_t> last;
  for (std::size_t idx : order) {
    const Segment& s = segments[idx];
    auto it = last.find(s.speaker);
    if (it != last.end() &&
        s.onset < segments[it->second].end() - kTimeEpsilon) {
      throw ValidationError(
          "line " + std::to_string(line_of[idx]) + ": same-speaker overlap for " +
          s.speaker + " with line " + std::to_string(line_of[it->second]));
    }
    last[s.speaker] = idx;
  }
  return Timeline(std::move(segments));
}

Timeline ReadRttmFile(const std::filesystem::path& path) {
  return ParseRttm(ReadTextFile(path));
}

std::string SerializeRttm(const Timeline& timeline,
                          std::string_view recording_id) {
  std::string out;
  char buf[64];
  for (const Segment& s : timeline.segments()) {
    out += "SPEAKER ";
    out += recording_id;
    std::snprintf(buf, sizeof(buf), " 1 %.3f %.3f", s.onset, s.duration);
    out += buf;
    out += " <NA> <NA> ";
    out += s.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

void WriteRttmFile(const std::filesystem::path& path, const Timeline& timeline,
                   std::string_view recording_id) {
  WriteTextFile(path, SerializeRttm(timeline, recording_id));
}

}  // namespace cogspeech::corpus
