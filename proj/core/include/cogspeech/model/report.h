#ifndef COGSPEECH_MODEL_REPORT_H_
#define COGSPEECH_MODEL_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "cogspeech/model/cv.h"

namespace cogspeech::model {

// One table row: a CV run plus its optional holdout evaluation. The "task"
// and "feature_set" tags fill the Input Test and Feature columns.
struct ReportEntry {
  CvReport cv;
  std::optional<HoldoutResult> holdout;
};

// Pairs each holdout with the CV report of the same target and tags.
std::vector<ReportEntry> PairReports(const std::vector<CvReport>& cv,
                                     const std::vector<std::pair<HoldoutResult, TargetSpec>>& ho);

// Columns Level-Target, Input Test, Feature, Metric, DEV (mean +- SD), HO.
// Rows sorted by level, target, input, feature.
std::string RenderHierarchyCsv(const std::vector<ReportEntry>& entries);
std::string RenderHierarchyMarkdown(const std::vector<ReportEntry>& entries);

// task,level,target,metric,dev_mean,dev_sd,ho: one line per (task, level)
// entry, for plotting correlation across label levels.
std::string RenderLevelChartCsv(const std::vector<ReportEntry>& entries);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_REPORT_H_
