#include "cogspeech/corpus/manifest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::corpus {
namespace {

constexpr const char* kRequired[] = {"session_id", "subject_id", "group",
                                     "task",       "split",      "audio_path",
                                     "sample_rate"};

struct TaskColumn {
  const char* name;
  Task task;
};
constexpr TaskColumn kTaskColumns[] = {{"pf", Task::kPf},   {"vf", Task::kVf},
                                       {"rl", Task::kRl},   {"rw", Task::kRw},
                                       {"bnt", Task::kBnt}, {"mmse", Task::kMmse}};

struct DomainColumn {
  const char* name;
  Domain domain;
};
constexpr DomainColumn kDomainColumns[] = {{"lan", Domain::kLan},
                                           {"mem", Domain::kMem},
                                           {"exe", Domain::kExe},
                                           {"vis", Domain::kVis}};

const std::vector<std::string>& CanonicalColumns() {
  static const std::vector<std::string> cols = {
      "session_id", "subject_id", "group", "task",  "split",
      "audio_path", "sample_rate", "pf",   "vf",    "rl",
      "rw",         "bnt",         "mmse", "lan",   "mem",
      "exe",        "vis",         "cerad_total", "cerad_binary", "mci"};
  return cols;
}

void ParseRangeDirective(std::string_view body, int line_no,
                         ScoreRanges& ranges) {
  const auto f = SplitWhitespace(body);
  if (f.empty() || f[0] != "range") return;  // other comments are ignored
  if (f.size() != 4) {
    throw ParseError("range directive needs: range <column> <lo> <hi>", line_no);
  }
  const std::string col = ToLower(f[1]);
  const auto lo = ParseDouble(f[2]);
  const auto hi = ParseDouble(f[3]);
  if (!lo || !hi || std::isnan(*lo) || std::isnan(*hi) || *lo > *hi) {
    throw ParseError("invalid bounds in range directive for " + col, line_no);
  }
  ranges[col] = ScoreRange{*lo, *hi};
}

std::optional<double> OptionalScore(const std::vector<std::string>& row,
                                    const std::map<std::string, std::size_t>& idx,
                                    const char* name, int line_no) {
  auto it = idx.find(name);
  if (it == idx.end()) return std::nullopt;
  const std::string_view cell = Trim(row[it->second]);
  if (cell.empty()) return std::nullopt;
  const auto v = ParseDouble(cell);
  if (!v) {
    throw ParseError(std::string("column ") + name + ": not a number '" +
                         std::string(cell) + "'",
                     line_no);
  }
  if (!std::isfinite(*v)) {
    throw ValidationError("line " + std::to_string(line_no) + ": column " +
                          name + " is not finite");
  }
  return v;
}

std::optional<int> OptionalBinary(const std::vector<std::string>& row,
                                  const std::map<std::string, std::size_t>& idx,
                                  const char* name, int line_no) {
  const auto v = OptionalScore(row, idx, name, line_no);
  if (!v) return std::nullopt;
  if (*v != 0.0 && *v != 1.0) {
    throw ValidationError("line " + std::to_string(line_no) + ": column " +
                          name + " must be 0 or 1");
  }
  return static_cast<int>(*v);
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

}  // namespace

ScoreRanges DefaultScoreRanges() {
  const double inf = std::numeric_limits<double>::infinity();
  return {{"pf", {0.0, inf}},  {"vf", {0.0, inf}},  {"rl", {0.0, inf}},
          {"rw", {0.0, inf}},  {"bnt", {0.0, inf}}, {"mmse", {0.0, 30.0}}};
}

std::filesystem::path Manifest::AudioPath(const SessionRecord& r) const {
  const std::filesystem::path p(r.audio_path);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest ParseManifest(const std::string& text) {
  Manifest m;
  m.ranges = DefaultScoreRanges();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::map<std::string, std::size_t> idx;
  std::size_t n_cols = 0;
  bool have_header = false;
  std::set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      if (have_header) continue;
      ParseRangeDirective(trimmed.substr(1), line_no, m.ranges);
      continue;
    }
    const auto row = SplitCsvLine(line);
    if (!have_header) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string name = ToLower(Trim(row[i]));
        if (!idx.emplace(name, i).second) {
          throw ParseError("duplicate column " + name, line_no);
        }
      }
      for (const char* req : kRequired) {
        if (!idx.count(req)) {
          throw ParseError(std::string("missing required column ") + req,
                           line_no);
        }
      }
      n_cols = row.size();
      have_header = true;
      continue;
    }
    if (row.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " fields, found " +
                           std::to_string(row.size()),
                       line_no);
    }
    auto cell = [&](const char* name) {
      return std::string(Trim(row[idx.at(name)]));
    };

    SessionRecord r;
    r.session_id = cell("session_id");
    r.subject_id = cell("subject_id");
    if (r.session_id.empty() || r.subject_id.empty()) {
      throw ParseError("empty session_id or subject_id", line_no);
    }
    if (!seen_ids.insert(r.session_id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate session_id " + r.session_id);
    }
    const auto group = ParseGroup(cell("group"));
    if (!group) throw ParseError("unknown group '" + cell("group") + "'", line_no);
    r.group = *group;
    const auto task = ParseTask(cell("task"));
    if (!task) throw ParseError("unknown task '" + cell("task") + "'", line_no);
    r.task = *task;
    const auto split = ParseSplit(cell("split"));
    if (!split) throw ParseError("unknown split '" + cell("split") + "'", line_no);
    r.split = *split;
    r.audio_path = cell("audio_path");
    const auto sr = ParseDouble(cell("sample_rate"));
    if (!sr) throw ParseError("sample_rate is not a number", line_no);
    if (!(*sr > 0.0) || !std::isfinite(*sr)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": sample_rate must be positive");
    }
    r.sample_rate = *sr;
    if (idx.count("participant")) r.participant = cell("participant");

    for (const auto& tc : kTaskColumns) {
      if (auto v = OptionalScore(row, idx, tc.name, line_no)) {
        r.labels.level1[tc.task] = *v;
      }
    }
    for (const auto& dc : kDomainColumns) {
      if (auto v = OptionalScore(row, idx, dc.name, line_no)) {
        r.labels.level2[dc.domain] = *v;
      }
    }
    GlobalScores& g = r.labels.level3;
    g.cerad_total = OptionalScore(row, idx, "cerad_total", line_no);
    g.cerad_binary = OptionalBinary(row, idx, "cerad_binary", line_no);
    g.mci = OptionalBinary(row, idx, "mci", line_no);
    if (g.cerad_total) {
      const int derived = *g.cerad_total >= kCeradBinaryThreshold ? 1 : 0;
      if (g.cerad_binary && *g.cerad_binary != derived) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": cerad_binary contradicts cerad_total " +
                              FormatDouble(*g.cerad_total));
      }
      g.cerad_binary = derived;
    }
    if (g.mci && (*g.mci == 1) != (r.group == Group::kMci)) {
      throw ValidationError("line " + std::to_string(line_no) + ": group " +
                            std::string(ToString(r.group)) +
                            " contradicts mci=" + std::to_string(*g.mci));
    }
    m.records.push_back(std::move(r));
  }
  if (!have_header) throw ParseError("manifest has no header row", 0);
  return m;
}

Manifest LoadManifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InputError("manifest not found: " + path.string());
  }
  Manifest m = ParseManifest(ReadTextFile(path));
  m.base_dir = path.parent_path();
  return m;
}

std::string SerializeManifest(const Manifest& manifest) {
  std::ostringstream out;
  const ScoreRanges defaults = DefaultScoreRanges();
  for (const auto& [col, range] : manifest.ranges) {
    auto it = defaults.find(col);
    if (it != defaults.end() && it->second.lo == range.lo &&
        it->second.hi == range.hi) {
      continue;
    }
    out << "# range " << col << ' ' << FormatDouble(range.lo) << ' '
        << FormatDouble(range.hi) << '\n';
  }
  const bool with_participant =
      std::any_of(manifest.records.begin(), manifest.records.end(),
                  [](const SessionRecord& r) { return !r.participant.empty(); });
  const auto& cols = CanonicalColumns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  if (with_participant) out << ",participant";
  out << '\n';
  for (const SessionRecord& r : manifest.records) {
    const LabelHierarchy& l = r.labels;
    auto task_score = [&](Task t) -> std::optional<double> {
      auto it = l.level1.find(t);
      return it == l.level1.end() ? std::nullopt : std::optional(it->second);
    };
    auto domain_score = [&](Domain d) -> std::optional<double> {
      auto it = l.level2.find(d);
      return it == l.level2.end() ? std::nullopt : std::optional(it->second);
    };
    auto binary = [](const std::optional<int>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    out << CsvField(r.session_id) << ',' << CsvField(r.subject_id) << ','
        << ToString(r.group) << ',' << ToString(r.task) << ','
        << ToString(r.split) << ',' << CsvField(r.audio_path) << ','
        << FormatDouble(r.sample_rate);
    for (const auto& tc : kTaskColumns) out << ',' << FormatOptional(task_score(tc.task));
    for (const auto& dc : kDomainColumns) out << ',' << FormatOptional(domain_score(dc.domain));
    out << ',' << FormatOptional(l.level3.cerad_total) << ','
        << binary(l.level3.cerad_binary) << ',' << binary(l.level3.mci);
    if (with_participant) out << ',' << CsvField(r.participant);
    out << '\n';
  }
  return out.str();
}

}  // namespace cogspeech::corpus
