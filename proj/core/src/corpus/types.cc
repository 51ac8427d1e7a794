#include "cogspeech/corpus/types.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::corpus {

std::string_view ToString(Group g) { return g == Group::kHc ? "HC" : "MCI"; }

std::string_view ToString(Task t) {
  switch (t) {
    case Task::kMmse: return "MMSE";
    case Task::kRw: return "RW";
    case Task::kBnt: return "BNT";
    case Task::kRl: return "RL";
    case Task::kVf: return "VF";
    case Task::kPf: return "PF";
  }
  return "?";
}

std::string_view ToString(Split s) {
  return s == Split::kDevelopment ? "development" : "holdout";
}

std::string_view ToString(Domain d) {
  switch (d) {
    case Domain::kLan: return "LAN";
    case Domain::kMem: return "MEM";
    case Domain::kExe: return "EXE";
    case Domain::kVis: return "VIS";
  }
  return "?";
}

std::optional<Group> ParseGroup(std::string_view token) {
  const std::string t = ToLower(Trim(token));
  if (t == "hc") return Group::kHc;
  if (t == "mci") return Group::kMci;
  return std::nullopt;
}

std::optional<Task> ParseTask(std::string_view token) {
  const std::string t = ToLower(Trim(token));
  for (Task task : kAllTasks) {
    if (t == ToLower(ToString(task))) return task;
  }
  return std::nullopt;
}

std::optional<Split> ParseSplit(std::string_view token) {
  const std::string t = ToLower(Trim(token));
  if (t == "development" || t == "dev") return Split::kDevelopment;
  if (t == "holdout" || t == "hold-out" || t == "ho") return Split::kHoldout;
  return std::nullopt;
}

std::optional<Domain> ParseDomain(std::string_view token) {
  const std::string t = ToLower(Trim(token));
  for (Domain d : kAllDomains) {
    if (t == ToLower(ToString(d))) return d;
  }
  return std::nullopt;
}

Timeline::Timeline(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  for (const Segment& s : segments_) {
    if (!std::isfinite(s.onset) || !std::isfinite(s.duration) ||
        !std::isfinite(s.end())) {
      throw ValidationError("non-finite segment time for speaker " + s.speaker);
    }
    if (s.onset < 0.0) {
      throw ValidationError("negative onset for speaker " + s.speaker);
    }
    if (!(s.duration > 0.0)) {
      throw ValidationError("non-positive duration for speaker " + s.speaker);
    }
  }
  std::stable_sort(segments_.begin(), segments_.end(),
                   [](const Segment& a, const Segment& b) {
                     return a.onset < b.onset;
                   });
  std::map<std::string, double, std::less<>> last_end;
  for (const Segment& s : segments_) {
    auto it = last_end.find(s.speaker);
    if (it != last_end.end() && s.onset < it->second - kTimeEpsilon) {
      throw ValidationError("same-speaker overlap for " + s.speaker + " at " +
                            FormatDouble(s.onset) + " s");
    }
    last_end[s.speaker] = s.end();
  }
}

std::vector<std::string> Timeline::Speakers() const {
  std::vector<std::string> out;
  for (const Segment& s : segments_) {
    if (std::find(out.begin(), out.end(), s.speaker) == out.end()) {
      out.push_back(s.speaker);
    }
  }
  return out;
}

bool Timeline::HasSpeaker(std::string_view speaker) const {
  return std::any_of(segments_.begin(), segments_.end(),
                     [&](const Segment& s) { return s.speaker == speaker; });
}

std::vector<Segment> Timeline::SegmentsOf(std::string_view speaker) const {
  std::vector<Segment> out;
  for (const Segment& s : segments_) {
    if (s.speaker == speaker) out.push_back(s);
  }
  return out;
}

}  // namespace cogspeech::corpus
