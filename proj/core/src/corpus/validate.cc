#include "cogspeech/corpus/validate.h"

#include <cmath>
#include <map>
#include <set>

#include "cogspeech/common/text.h"

namespace cogspeech::corpus {

std::string_view ToString(IssueKind kind) {
  switch (kind) {
    case IssueKind::kThresholdMismatch: return "binary/threshold mismatch";
    case IssueKind::kOutOfRange: return "out of range";
    case IssueKind::kNonFinite: return "non-finite score";
    case IssueKind::kGroupContradiction: return "group/mci contradiction";
    case IssueKind::kSplitLeakage: return "split leakage";
  }
  return "?";
}

std::vector<Issue> ValidateHierarchy(const std::vector<SessionRecord>& records,
                                     const ScoreRanges& ranges) {
  std::vector<Issue> issues;
  auto check = [&](const SessionRecord& r, const std::string& column,
                   double v) {
    if (!std::isfinite(v)) {
      issues.push_back({IssueKind::kNonFinite, r.session_id, r.subject_id,
                        column + " is not finite"});
      return;
    }
    auto it = ranges.find(column);
    if (it != ranges.end() && !it->second.Contains(v)) {
      issues.push_back({IssueKind::kOutOfRange, r.session_id, r.subject_id,
                        column + "=" + FormatDouble(v) + " outside [" +
                            FormatDouble(it->second.lo) + ", " +
                            FormatDouble(it->second.hi) + "]"});
    }
  };

  std::map<std::string, std::set<Split>> splits_of_subject;
  for (const SessionRecord& r : records) {
    splits_of_subject[r.subject_id].insert(r.split);
    for (const auto& [task, v] : r.labels.level1) {
      check(r, ToLower(ToString(task)), v);
    }
    for (const auto& [domain, v] : r.labels.level2) {
      check(r, ToLower(ToString(domain)), v);
    }
    const GlobalScores& g = r.labels.level3;
    if (g.cerad_total) check(r, "cerad_total", *g.cerad_total);
    if (g.cerad_total && g.cerad_binary && std::isfinite(*g.cerad_total)) {
      const int expected = *g.cerad_total >= kCeradBinaryThreshold ? 1 : 0;
      if (*g.cerad_binary != expected) {
        issues.push_back({IssueKind::kThresholdMismatch, r.session_id,
                          r.subject_id,
                          "binary/threshold mismatch: cerad_total=" +
                              FormatDouble(*g.cerad_total) +
                              " cerad_binary=" +
                              std::to_string(*g.cerad_binary)});
      }
    }
    if (g.cerad_binary && *g.cerad_binary != 0 && *g.cerad_binary != 1) {
      issues.push_back({IssueKind::kOutOfRange, r.session_id, r.subject_id,
                        "cerad_binary not in {0,1}"});
    }
    if (g.mci) {
      if (*g.mci != 0 && *g.mci != 1) {
        issues.push_back({IssueKind::kOutOfRange, r.session_id, r.subject_id,
                          "mci not in {0,1}"});
      } else if ((*g.mci == 1) != (r.group == Group::kMci)) {
        issues.push_back({IssueKind::kGroupContradiction, r.session_id,
                          r.subject_id,
                          "group " + std::string(ToString(r.group)) +
                              " with mci=" + std::to_string(*g.mci)});
      }
    }
  }
  for (const auto& [subject, splits] : splits_of_subject) {
    if (splits.size() > 1) {
      issues.push_back({IssueKind::kSplitLeakage, "", subject,
                        "split leakage: subject " + subject +
                            " appears in development and holdout"});
    }
  }
  return issues;
}

std::vector<Issue> ValidateHierarchy(const std::vector<SessionRecord>& records) {
  return ValidateHierarchy(records, DefaultScoreRanges());
}

}  // namespace cogspeech::corpus
