#include "cogspeech/model/cv.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "cogspeech/common/error.h"
#include "cogspeech/common/numeric.h"
#include "cogspeech/common/parallel.h"
#include "cogspeech/common/text.h"
#include "cogspeech/model/metrics.h"
#include "json.hpp"

namespace cogspeech::model {
namespace {

using Rows = std::vector<Eigen::Index>;

std::vector<std::vector<std::string>> Deal(std::vector<SubjectInfo> subjects, int k,
                                           std::uint64_t seed) {
  std::sort(subjects.begin(), subjects.end(),
            [](const SubjectInfo& a, const SubjectInfo& b) { return a.id < b.id; });
  std::mt19937_64 rng(seed);
  for (std::size_t i = subjects.size(); i-- > 1;) {
    std::swap(subjects[i], subjects[rng() % (i + 1)]);
  }
  std::stable_sort(subjects.begin(), subjects.end(),
                   [](const SubjectInfo& a, const SubjectInfo& b) {
                     return a.label.value_or(0) < b.label.value_or(0);
                   });
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    folds[i % folds.size()].push_back(subjects[i].id);
  }
  return folds;
}

std::uint64_t InnerSeed(std::uint64_t seed, int fold) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(fold + 1));
}

std::set<std::string> SubjectsOfRows(const Dataset& d, const Rows& rows) {
  std::set<std::string> s;
  for (auto r : rows) s.insert(d.subject_ids[static_cast<std::size_t>(r)]);
  return s;
}

Rows RowsOf(const Dataset& d, const std::set<std::string>& subjects, bool member) {
  Rows rows;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (subjects.contains(d.subject_ids[static_cast<std::size_t>(i)]) == member) rows.push_back(i);
  }
  return rows;
}

Eigen::MatrixXd TakeX(const Dataset& d, const Rows& rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), d.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = d.x.row(rows[i]);
  return x;
}

Eigen::VectorXd TakeY(const Dataset& d, const Rows& rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = d.y[rows[i]];
  return y;
}

bool HasBothClasses(const Eigen::VectorXd& y) {
  return (y.array() == 1.0).any() && (y.array() == 0.0).any();
}

// Fit on `train`, predict `eval`, record the subjects involved.
Eigen::VectorXd FitPredict(const Dataset& d, const Rows& train, const Rows& eval,
                           const PipelineConfig& cfg, const std::string& stage,
                           LeakageAuditor& auditor) {
  auditor.Add({stage, SubjectsOfRows(d, train), SubjectsOfRows(d, eval)});
  const FittedPipeline p = FitPipeline(TakeX(d, train), TakeY(d, train), cfg, d.target.kind);
  return p.Predict(TakeX(d, eval));
}

struct Score {
  std::optional<double> headline;  // r or balanced accuracy
  std::optional<double> r2;
};

Score Evaluate(const Eigen::VectorXd& y, const Eigen::VectorXd& pred, TargetKind kind) {
  if (kind == TargetKind::kClassification) return {BalancedAccuracy(y, pred), std::nullopt};
  return {PearsonR(y, pred), R2(y, pred)};
}

std::optional<double> Opt(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

nlohmann::ordered_json Num(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

std::vector<SubjectInfo> SubjectsOf(const Dataset& d) {
  std::map<std::string, std::pair<std::size_t, double>> acc;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    auto& [n, sum] = acc[d.subject_ids[static_cast<std::size_t>(i)]];
    ++n;
    sum += d.y[i];
  }
  std::vector<SubjectInfo> out;
  for (const auto& [id, ns] : acc) {
    SubjectInfo s{id, ns.first, std::nullopt};
    if (d.target.kind == TargetKind::kClassification) {
      s.label = static_cast<int>(std::lround(ns.second / static_cast<double>(ns.first)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

FoldPlan MakeFoldPlan(const std::vector<SubjectInfo>& subjects, int k_outer, int k_inner,
                      std::uint64_t seed) {
  if (k_outer < 2 || k_inner < 2) throw ConfigError("fold counts must be at least 2");
  std::set<std::string> ids;
  for (const auto& s : subjects) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate subject " + s.id);
  }
  if (subjects.size() < static_cast<std::size_t>(k_outer)) {
    throw ValidationError(std::to_string(subjects.size()) + " subjects for " +
                          std::to_string(k_outer) + " outer folds");
  }
  FoldPlan plan{k_outer, k_inner, seed, Deal(subjects, k_outer, seed), {}};
  for (int o = 0; o < k_outer; ++o) {
    const std::set<std::string> test(plan.outer[o].begin(), plan.outer[o].end());
    std::vector<SubjectInfo> train;
    for (const auto& s : subjects) {
      if (!test.contains(s.id)) train.push_back(s);
    }
    if (train.size() < static_cast<std::size_t>(k_inner)) {
      throw ValidationError("outer fold " + std::to_string(o) + " leaves " +
                            std::to_string(train.size()) + " training subjects for " +
                            std::to_string(k_inner) + " inner folds");
    }
    plan.inner.push_back(Deal(train, k_inner, InnerSeed(seed, o)));
  }
  return plan;
}

void LeakageAuditor::Add(Record r) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(r));
}

std::size_t LeakageAuditor::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<LeakageAuditor::Record> LeakageAuditor::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<std::string> LeakageAuditor::Violations() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& r : records_) {
    for (const auto& s : r.fit_subjects) {
      if (r.eval_subjects.contains(s)) {
        out.push_back(r.stage + ": subject " + s + " on both sides");
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t MajorityVote(const std::vector<std::size_t>& winners,
                         const std::vector<PipelineConfig>& grid) {
  if (winners.empty()) throw ValidationError("no fold winners to vote on");
  std::map<std::size_t, int> votes;
  for (auto w : winners) ++votes[w];
  std::size_t best = votes.begin()->first;
  for (const auto& [idx, n] : votes) {
    const int nb = votes[best];
    if (n > nb) {
      best = idx;
    } else if (n == nb && idx != best) {
      const bool pass_new = grid[idx].pca.passthrough;
      const bool pass_best = grid[best].pca.passthrough;
      if (pass_new && !pass_best) best = idx;
      else if (pass_new == pass_best && idx < best) best = idx;
    }
  }
  return best;
}

CvReport NestedCv(const Dataset& data, const std::vector<PipelineConfig>& grid,
                  const FoldPlan& plan, const CvOptions& options, LeakageAuditor* external) {
  if (grid.empty()) throw ConfigError("model grid is empty");
  const bool cls = data.target.kind == TargetKind::kClassification;
  LeakageAuditor local;
  LeakageAuditor& auditor = external ? *external : local;

  CvReport rep;
  rep.target = data.target;
  rep.metric = cls ? "balanced_accuracy" : "pearson_r";
  rep.inner_metric = cls ? "balanced_accuracy" : "r2";
  rep.seed = plan.seed;
  rep.grid_size = grid.size();

  const std::size_t n_outer = plan.outer.size();
  const std::size_t n_cfg = grid.size();
  // Per (outer, config): mean inner score, or nullopt, plus warnings.
  std::vector<std::optional<double>> inner_mean(n_outer * n_cfg);
  std::vector<std::vector<std::string>> unit_warnings(n_outer * n_cfg);

  ParallelFor(n_outer * n_cfg, options.jobs, [&](std::size_t unit) {
    const std::size_t o = unit / n_cfg, c = unit % n_cfg;
    const std::set<std::string> test(plan.outer[o].begin(), plan.outer[o].end());
    double sum = 0.0;
    int valid = 0;
    for (std::size_t i = 0; i < plan.inner[o].size(); ++i) {
      const std::set<std::string> val(plan.inner[o][i].begin(), plan.inner[o][i].end());
      Rows train, eval;
      for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const auto& s = data.subject_ids[static_cast<std::size_t>(r)];
        if (test.contains(s)) continue;
        (val.contains(s) ? eval : train).push_back(r);
      }
      const std::string where = "outer " + std::to_string(o) + " inner " + std::to_string(i) +
                                " config " + std::to_string(c);
      if (train.size() < 2 || eval.empty()) {
        unit_warnings[unit].push_back(where + ": too few sessions, skipped");
        continue;
      }
      if (cls && (!HasBothClasses(TakeY(data, train)) || !HasBothClasses(TakeY(data, eval)))) {
        unit_warnings[unit].push_back(where + ": single class, skipped");
        continue;
      }
      const Eigen::VectorXd pred = FitPredict(data, train, eval, grid[c], where, auditor);
      const Eigen::VectorXd y = TakeY(data, eval);
      const auto score = cls ? BalancedAccuracy(y, pred) : R2(y, pred);
      if (!score) {
        unit_warnings[unit].push_back(where + ": undefined inner metric, skipped");
        continue;
      }
      sum += *score;
      ++valid;
    }
    if (valid > 0) inner_mean[unit] = sum / valid;
  });

  std::vector<FoldOutcome> folds(n_outer);
  std::vector<std::vector<std::string>> fold_warnings(n_outer);
  ParallelFor(n_outer, options.jobs, [&](std::size_t o) {
    FoldOutcome& f = folds[o];
    f.fold = static_cast<int>(o);
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < n_cfg; ++c) {
      const auto& m = inner_mean[o * n_cfg + c];
      if (m && (!best || *m > *inner_mean[o * n_cfg + *best])) best = c;
    }
    if (!best) {
      best = 0;
      fold_warnings[o].push_back("outer " + std::to_string(o) +
                                 ": no valid inner score, using config 0");
    } else {
      f.inner_score = *inner_mean[o * n_cfg + *best];
    }
    f.best_index = *best;
    f.best = grid[*best];
    const std::set<std::string> test(plan.outer[o].begin(), plan.outer[o].end());
    const Rows train = RowsOf(data, test, false);
    const Rows eval = RowsOf(data, test, true);
    f.n_train = train.size();
    f.n_test = eval.size();
    if (cls && !HasBothClasses(TakeY(data, train))) {
      throw ValidationError("outer fold " + std::to_string(o) + " training set has one class");
    }
    const Eigen::VectorXd pred =
        FitPredict(data, train, eval, f.best, "outer " + std::to_string(o), auditor);
    const Score s = Evaluate(TakeY(data, eval), pred, data.target.kind);
    f.test_r2 = s.r2;
    if (s.headline) {
      f.test_metric = *s.headline;
    } else {
      f.test_metric = cls ? 0.5 : 0.0;
      fold_warnings[o].push_back("outer " + std::to_string(o) + ": undefined " + rep.metric +
                                 ", scored " + FormatDouble(f.test_metric));
    }
  });

  for (const auto& w : unit_warnings) rep.warnings.insert(rep.warnings.end(), w.begin(), w.end());
  for (const auto& w : fold_warnings) rep.warnings.insert(rep.warnings.end(), w.begin(), w.end());
  rep.folds = std::move(folds);
  std::vector<double> metrics;
  std::vector<std::size_t> winners;
  for (const auto& f : rep.folds) {
    metrics.push_back(f.test_metric);
    winners.push_back(f.best_index);
  }
  rep.mean = Mean(metrics);
  rep.sd = PopulationSd(metrics);
  rep.majority_index = MajorityVote(winners, grid);
  rep.majority = grid[rep.majority_index];
  rep.audited_fits = auditor.size();
  rep.leakage_violations = auditor.Violations().size();
  return rep;
}

HoldoutResult HoldoutEval(const Dataset& dev, const Dataset& holdout,
                          const PipelineConfig& config, LeakageAuditor* auditor) {
  const std::set<std::string> dev_subjects(dev.subject_ids.begin(), dev.subject_ids.end());
  for (const auto& s : holdout.subject_ids) {
    if (dev_subjects.contains(s)) {
      throw ValidationError("subject " + s + " appears in both development and holdout sets");
    }
  }
  if (dev.feature_names != holdout.feature_names) {
    throw ValidationError("development and holdout feature columns differ");
  }
  const std::set<std::string> ho_subjects(holdout.subject_ids.begin(), holdout.subject_ids.end());
  if (auditor) auditor->Add({"holdout", dev_subjects, ho_subjects});
  const FittedPipeline p = FitPipeline(dev.x, dev.y, config, dev.target.kind);
  const Score s = Evaluate(holdout.y, p.Predict(holdout.x), dev.target.kind);
  HoldoutResult r;
  r.config = config;
  r.metric = dev.target.kind == TargetKind::kClassification ? "balanced_accuracy" : "pearson_r";
  r.r2 = s.r2;
  r.n_dev = static_cast<std::size_t>(dev.rows());
  r.n_holdout = static_cast<std::size_t>(holdout.rows());
  if (s.headline) {
    r.value = *s.headline;
  } else {
    r.value = dev.target.kind == TargetKind::kClassification ? 0.5 : 0.0;
    r.warnings.push_back("undefined " + r.metric + " on holdout, scored " + FormatDouble(r.value));
  }
  return r;
}

ImportanceResult SvmFeatureImportance(const FittedPipeline& model,
                                      const std::vector<std::string>& names) {
  if (!model.config.pca.passthrough) {
    throw ValidationError(
        "feature importance needs pca=passthrough: PCA weights are not feature-aligned");
  }
  if (model.estimator.w.size() != static_cast<Eigen::Index>(names.size())) {
    throw ValidationError("weight count differs from feature name count");
  }
  ImportanceResult out;
  if ((model.estimator.w.array() == 0.0).all()) {
    out.warnings.push_back("all weights are zero; nothing to rank");
    return out;
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.ranking.push_back({names[i], model.estimator.w[static_cast<Eigen::Index>(i)]});
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const FeatureWeight& a, const FeatureWeight& b) {
                     return std::abs(a.weight) > std::abs(b.weight);
                   });
  return out;
}

std::string CvReportToJson(const CvReport& r) {
  nlohmann::ordered_json j;
  j["target"] = {{"level", r.target.level},
                 {"name", r.target.name},
                 {"kind", std::string(ToString(r.target.kind))}};
  nlohmann::ordered_json tags = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.tags) tags[k] = v;
  j["tags"] = tags;
  j["metric"] = r.metric;
  j["inner_metric"] = r.inner_metric;
  j["seed"] = r.seed;
  j["grid_size"] = r.grid_size;
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"best_index", f.best_index},
                     {"best_config", ToString(f.best)},
                     {"inner_score", f.inner_score},
                     {"test_metric", f.test_metric},
                     {"test_r2", Num(f.test_r2)},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test}});
  }
  j["folds"] = folds;
  j["summary"] = {{"mean", r.mean}, {"sd", r.sd}, {"n_folds", r.folds.size()}};
  j["majority_vote"] = {{"index", r.majority_index}, {"config", ToString(r.majority)}};
  j["leakage_audit"] = {{"fits", r.audited_fits}, {"violations", r.leakage_violations}};
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

CvReport ParseCvReport(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    CvReport r;
    r.target = MakeTarget(j.at("target").at("level").get<int>(),
                          j.at("target").at("name").get<std::string>());
    if (j.contains("tags")) {
      for (const auto& [k, v] : j["tags"].items()) r.tags.emplace_back(k, v.get<std::string>());
    }
    r.metric = j.at("metric").get<std::string>();
    r.inner_metric = j.at("inner_metric").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.grid_size = j.at("grid_size").get<std::size_t>();
    for (const auto& f : j.at("folds")) {
      FoldOutcome o;
      o.fold = f.at("fold").get<int>();
      o.best_index = f.at("best_index").get<std::size_t>();
      o.best = ParsePipelineConfig(f.at("best_config").get<std::string>());
      o.inner_score = f.at("inner_score").get<double>();
      o.test_metric = f.at("test_metric").get<double>();
      o.test_r2 = Opt(f.at("test_r2"));
      o.n_train = f.at("n_train").get<std::size_t>();
      o.n_test = f.at("n_test").get<std::size_t>();
      r.folds.push_back(o);
    }
    r.mean = j.at("summary").at("mean").get<double>();
    r.sd = j.at("summary").at("sd").get<double>();
    r.majority_index = j.at("majority_vote").at("index").get<std::size_t>();
    r.majority = ParsePipelineConfig(j.at("majority_vote").at("config").get<std::string>());
    r.audited_fits = j.at("leakage_audit").at("fits").get<std::size_t>();
    r.leakage_violations = j.at("leakage_audit").at("violations").get<std::size_t>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("CV report: ") + e.what(), 1);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("CV report: ") + e.what(), 1);
  }
}

std::string CvSummaryCsv(const CvReport& r) {
  std::string out = "fold,best_config,inner_score,test_metric,test_r2\n";
  for (const auto& f : r.folds) {
    out += std::to_string(f.fold) + "," + CsvField(ToString(f.best)) + "," +
           FormatDouble(f.inner_score) + "," + FormatDouble(f.test_metric) + "," +
           (f.test_r2 ? FormatDouble(*f.test_r2) : std::string()) + "\n";
  }
  out += "mean,,," + FormatDouble(r.mean) + ",\n";
  out += "sd,,," + FormatDouble(r.sd) + ",\n";
  return out;
}

std::string HoldoutToJson(const HoldoutResult& r, const TargetSpec& target) {
  nlohmann::ordered_json j;
  j["target"] = {{"level", target.level},
                 {"name", target.name},
                 {"kind", std::string(ToString(target.kind))}};
  nlohmann::ordered_json tags = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.tags) tags[k] = v;
  j["tags"] = tags;
  j["config"] = ToString(r.config);
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["r2"] = Num(r.r2);
  j["n_dev"] = r.n_dev;
  j["n_holdout"] = r.n_holdout;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::pair<HoldoutResult, TargetSpec> ParseHoldout(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    const TargetSpec t = MakeTarget(j.at("target").at("level").get<int>(),
                                    j.at("target").at("name").get<std::string>());
    HoldoutResult r;
    if (j.contains("tags")) {
      for (const auto& [k, v] : j["tags"].items()) r.tags.emplace_back(k, v.get<std::string>());
    }
    r.config = ParsePipelineConfig(j.at("config").get<std::string>());
    r.metric = j.at("metric").get<std::string>();
    r.value = j.at("value").get<double>();
    r.r2 = Opt(j.at("r2"));
    r.n_dev = j.at("n_dev").get<std::size_t>();
    r.n_holdout = j.at("n_holdout").get<std::size_t>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return {r, t};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("holdout result: ") + e.what(), 1);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("holdout result: ") + e.what(), 1);
  }
}

}  // namespace cogspeech::model
