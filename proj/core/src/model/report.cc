#include "cogspeech/model/report.h"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "cogspeech/common/text.h"

namespace cogspeech::model {
namespace {

std::string Tag(const std::vector<std::pair<std::string, std::string>>& tags,
                const std::string& key) {
  for (const auto& [k, v] : tags) {
    if (k == key) return v;
  }
  return "all";
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<ReportEntry> Sorted(std::vector<ReportEntry> e) {
  std::stable_sort(e.begin(), e.end(), [](const ReportEntry& a, const ReportEntry& b) {
    return std::make_tuple(a.cv.target.level, a.cv.target.name, Tag(a.cv.tags, "task"),
                           Tag(a.cv.tags, "feature_set")) <
           std::make_tuple(b.cv.target.level, b.cv.target.name, Tag(b.cv.tags, "task"),
                           Tag(b.cv.tags, "feature_set"));
  });
  return e;
}

std::string LevelTarget(const CvReport& r) {
  return "L" + std::to_string(r.target.level) + " " + r.target.name;
}

}  // namespace

std::vector<ReportEntry> PairReports(
    const std::vector<CvReport>& cv, const std::vector<std::pair<HoldoutResult, TargetSpec>>& ho) {
  std::vector<ReportEntry> out;
  for (const auto& r : cv) {
    ReportEntry e{r, std::nullopt};
    for (const auto& [h, t] : ho) {
      if (t == r.target && h.tags == r.tags) e.holdout = h;
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string RenderHierarchyCsv(const std::vector<ReportEntry>& entries) {
  std::string out = "level_target,input_test,feature,metric,dev,ho\n";
  for (const auto& e : Sorted(entries)) {
    out += CsvField(LevelTarget(e.cv)) + "," + CsvField(Tag(e.cv.tags, "task")) + "," +
           CsvField(Tag(e.cv.tags, "feature_set")) + "," + e.cv.metric + "," +
           CsvField(Fixed(e.cv.mean) + " ± " + Fixed(e.cv.sd)) + "," +
           (e.holdout ? Fixed(e.holdout->value) : std::string("-")) + "\n";
  }
  return out;
}

std::string RenderHierarchyMarkdown(const std::vector<ReportEntry>& entries) {
  std::string out =
      "| Level–Target | Input Test | Feature | Metric | DEV | HO |\n"
      "|---|---|---|---|---|---|\n";
  for (const auto& e : Sorted(entries)) {
    out += "| " + LevelTarget(e.cv) + " | " + Tag(e.cv.tags, "task") + " | " +
           Tag(e.cv.tags, "feature_set") + " | " + e.cv.metric + " | " + Fixed(e.cv.mean) +
           " ± " + Fixed(e.cv.sd) + " | " + (e.holdout ? Fixed(e.holdout->value) : "-") + " |\n";
  }
  return out;
}

std::string RenderLevelChartCsv(const std::vector<ReportEntry>& entries) {
  std::string out = "task,level,target,metric,dev_mean,dev_sd,ho\n";
  auto sorted = Sorted(entries);
  std::stable_sort(sorted.begin(), sorted.end(), [](const ReportEntry& a, const ReportEntry& b) {
    return std::make_tuple(Tag(a.cv.tags, "task"), a.cv.target.level) <
           std::make_tuple(Tag(b.cv.tags, "task"), b.cv.target.level);
  });
  for (const auto& e : sorted) {
    out += CsvField(Tag(e.cv.tags, "task")) + "," + std::to_string(e.cv.target.level) + "," +
           CsvField(e.cv.target.name) + "," + e.cv.metric + "," + FormatDouble(e.cv.mean) + "," +
           FormatDouble(e.cv.sd) + "," + (e.holdout ? FormatDouble(e.holdout->value) : "") + "\n";
  }
  return out;
}

}  // namespace cogspeech::model
