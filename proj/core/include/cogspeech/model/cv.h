#ifndef COGSPEECH_MODEL_CV_H_
#define COGSPEECH_MODEL_CV_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cogspeech/model/dataset.h"
#include "cogspeech/model/pipeline.h"

namespace cogspeech::model {

struct SubjectInfo {
  std::string id;
  std::size_t sessions = 1;
  // Class used for stratification; nullopt for regression targets.
  std::optional<int> label;
};

// One subject per entry; label is the rounded mean of its session labels
// for classification targets.
std::vector<SubjectInfo> SubjectsOf(const Dataset& d);

// Subject-id groups. outer[o] is the test fold o; inner[o][i] is inner
// validation fold i within the training subjects of outer fold o.
struct FoldPlan {
  int k_outer = 5;
  int k_inner = 3;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> outer;
  std::vector<std::vector<std::vector<std::string>>> inner;
};

// Subjects are sorted by id, shuffled with mt19937_64(seed), grouped by
// label (when present) and dealt round-robin, so fold sizes differ by at
// most one and class ratios are kept. Inner plans repeat this on each
// outer-train set with a seed derived from (seed, outer fold). Throws
// ValidationError with fewer subjects than folds.
FoldPlan MakeFoldPlan(const std::vector<SubjectInfo>& subjects, int k_outer = 5,
                      int k_inner = 3, std::uint64_t seed = 0);

// Records the subjects behind every fit and the evaluation it serves.
class LeakageAuditor {
 public:
  struct Record {
    std::string stage;
    std::set<std::string> fit_subjects;
    std::set<std::string> eval_subjects;
  };

  void Add(Record r);
  std::size_t size() const;
  // One message per record whose fit and eval subject sets intersect.
  std::vector<std::string> Violations() const;
  std::vector<Record> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<Record> records_;
};

struct CvOptions {
  int jobs = 1;
};

struct FoldOutcome {
  int fold = 0;
  std::size_t best_index = 0;
  PipelineConfig best;
  double inner_score = 0.0;
  // Pearson r (regression) or balanced accuracy (classification).
  double test_metric = 0.0;
  std::optional<double> test_r2;  // regression only
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct CvReport {
  TargetSpec target;
  std::string metric;        // pearson_r | balanced_accuracy
  std::string inner_metric;  // r2 | balanced_accuracy
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::vector<FoldOutcome> folds;
  double mean = 0.0;
  double sd = 0.0;  // population SD over the outer folds
  std::size_t majority_index = 0;
  PipelineConfig majority;
  std::vector<std::string> warnings;
  std::size_t audited_fits = 0;
  std::size_t leakage_violations = 0;
  // Free-form descriptors carried into reports (task, feature set, ...).
  std::vector<std::pair<std::string, std::string>> tags;
};

// Nested CV over `plan`. Scaler, PCA and estimator are refitted inside every
// training split only. Inner selection maximises mean R^2 (regression) or
// balanced accuracy (classification); a config-fold pair whose training or
// validation split lacks a class is skipped with a warning. Results do not
// depend on options.jobs. Every fit is recorded in `auditor` when given.
CvReport NestedCv(const Dataset& data, const std::vector<PipelineConfig>& grid,
                  const FoldPlan& plan, const CvOptions& options = {},
                  LeakageAuditor* auditor = nullptr);

// Modal per-fold winner; ties prefer PCA passthrough, then the lower index.
std::size_t MajorityVote(const std::vector<std::size_t>& winners,
                         const std::vector<PipelineConfig>& grid);

struct HoldoutResult {
  PipelineConfig config;
  std::string metric;
  double value = 0.0;
  std::optional<double> r2;
  std::size_t n_dev = 0;
  std::size_t n_holdout = 0;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> tags;
};

// Fits on every dev session and scores the holdout once. Throws
// ValidationError naming a subject present in both sets.
HoldoutResult HoldoutEval(const Dataset& dev, const Dataset& holdout,
                          const PipelineConfig& config, LeakageAuditor* auditor = nullptr);

struct FeatureWeight {
  std::string name;
  double weight = 0.0;
};

struct ImportanceResult {
  // By |weight| descending; weights live in z-scored feature space and a
  // positive sign points toward class 1.
  std::vector<FeatureWeight> ranking;
  std::vector<std::string> warnings;
};

// Throws ValidationError when PCA is active or the name count differs.
ImportanceResult SvmFeatureImportance(const FittedPipeline& model,
                                      const std::vector<std::string>& names);

std::string CvReportToJson(const CvReport& report);
// Throws ParseError.
CvReport ParseCvReport(std::string_view json_text);
// fold,best_config,inner_score,test_metric,test_r2 plus a mean/sd footer.
std::string CvSummaryCsv(const CvReport& report);
std::string HoldoutToJson(const HoldoutResult& result, const TargetSpec& target);
// Throws ParseError. Returns the result and its target.
std::pair<HoldoutResult, TargetSpec> ParseHoldout(std::string_view json_text);

}  // namespace cogspeech::model

#endif  // COGSPEECH_MODEL_CV_H_
