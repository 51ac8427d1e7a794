#ifndef COGSPEECH_MODEL_DATASET_H_
#define COGSPEECH_MODEL_DATASET_H_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogspeech/corpus/types.h"
#include "cogspeech/features/table.h"
#include "cogspeech/model/pipeline.h"

namespace cogspeech::model {

// Level 1: task name (mmse, rw, bnt, rl, vf, pf). Level 2: domain (lan, mem,
// exe, vis). Level 3: cerad_total, cerad_binary, mci. The binary targets are
// classification, all others regression.
struct TargetSpec {
  int level = 1;
  std::string name = "mmse";
  TargetKind kind = TargetKind::kRegression;

  std::string ToString() const;  // "<level>:<name>"
  bool operator==(const TargetSpec&) const = default;
};

// Accepts "<level>:<name>"; throws ConfigError.
TargetSpec ParseTarget(std::string_view s);
TargetSpec MakeTarget(int level, std::string_view name);

// The target value of one session, if labelled. A missing mci flag falls
// back to the diagnostic group.
std::optional<double> TargetValue(const corpus::SessionRecord& r, const TargetSpec& t);

struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> session_ids;
  std::vector<std::string> subject_ids;
  std::vector<std::string> feature_names;
  TargetSpec target;
  // Sessions dropped for a missing feature row or target.
  std::size_t dropped = 0;

  Eigen::Index rows() const { return x.rows(); }
  Dataset Subset(const std::vector<Eigen::Index>& rows) const;
};

struct DatasetFilter {
  std::optional<corpus::Split> split;
  std::optional<corpus::Task> task;
};

// Rows follow the record order. Throws ValidationError when no row remains.
Dataset BuildDataset(const features::FeatureTable& table,
                     const std::vector<corpus::SessionRecord>& records,
                     const TargetSpec& target, const DatasetFilter& filter = {});

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_DATASET_H_
