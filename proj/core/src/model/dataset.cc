#include "cogspeech/model/dataset.h"

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::model {

std::string TargetSpec::ToString() const { return std::to_string(level) + ":" + name; }

TargetSpec MakeTarget(int level, std::string_view name_in) {
  const std::string name = ToLower(Trim(name_in));
  TargetSpec t{level, name, TargetKind::kRegression};
  switch (level) {
    case 1:
      if (!corpus::ParseTask(name)) throw ConfigError("unknown level-1 task '" + name + "'");
      break;
    case 2:
      if (!corpus::ParseDomain(name)) throw ConfigError("unknown level-2 domain '" + name + "'");
      break;
    case 3:
      if (name == "cerad_binary" || name == "mci") t.kind = TargetKind::kClassification;
      else if (name != "cerad_total") throw ConfigError("unknown level-3 target '" + name + "'");
      break;
    default:
      throw ConfigError("target level must be 1, 2 or 3");
  }
  return t;
}

TargetSpec ParseTarget(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("target must look like <level>:<name>, got '" + std::string(s) + "'");
  }
  auto level = ParseInt(Trim(s.substr(0, colon)));
  if (!level) throw ConfigError("bad target level in '" + std::string(s) + "'");
  return MakeTarget(static_cast<int>(*level), s.substr(colon + 1));
}

std::optional<double> TargetValue(const corpus::SessionRecord& r, const TargetSpec& t) {
  const auto& l = r.labels;
  if (t.level == 1) {
    auto it = l.level1.find(*corpus::ParseTask(t.name));
    if (it == l.level1.end()) return std::nullopt;
    return it->second;
  }
  if (t.level == 2) {
    auto it = l.level2.find(*corpus::ParseDomain(t.name));
    if (it == l.level2.end()) return std::nullopt;
    return it->second;
  }
  if (t.name == "cerad_total") return l.level3.cerad_total;
  if (t.name == "cerad_binary") {
    if (!l.level3.cerad_binary) return std::nullopt;
    return static_cast<double>(*l.level3.cerad_binary);
  }
  if (l.level3.mci) return static_cast<double>(*l.level3.mci);
  return r.group == corpus::Group::kMci ? 1.0 : 0.0;
}

Dataset Dataset::Subset(const std::vector<Eigen::Index>& rows) const {
  Dataset d;
  d.feature_names = feature_names;
  d.target = target;
  d.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    d.x.row(static_cast<Eigen::Index>(i)) = x.row(r);
    d.y[static_cast<Eigen::Index>(i)] = y[r];
    d.session_ids.push_back(session_ids[static_cast<std::size_t>(r)]);
    d.subject_ids.push_back(subject_ids[static_cast<std::size_t>(r)]);
  }
  return d;
}

Dataset BuildDataset(const features::FeatureTable& table,
                     const std::vector<corpus::SessionRecord>& records,
                     const TargetSpec& target, const DatasetFilter& filter) {
  Dataset d;
  d.feature_names = table.columns;
  d.target = target;
  std::vector<std::size_t> rows;
  std::vector<double> ys;
  for (const auto& r : records) {
    if (filter.split && r.split != *filter.split) continue;
    if (filter.task && r.task != *filter.task) continue;
    const auto row = table.RowOf(r.session_id);
    const auto y = TargetValue(r, target);
    if (!row || !y) {
      ++d.dropped;
      continue;
    }
    rows.push_back(*row);
    ys.push_back(*y);
    d.session_ids.push_back(r.session_id);
    d.subject_ids.push_back(r.subject_id);
  }
  if (rows.empty()) {
    throw ValidationError("no session has both features and target " + target.ToString());
  }
  d.x.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(table.columns.size()));
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = table.rows[rows[i]][c];
    }
    d.y[static_cast<Eigen::Index>(i)] = ys[i];
  }
  return d;
}

}  // namespace cogspeech::model
