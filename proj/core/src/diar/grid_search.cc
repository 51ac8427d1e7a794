#include "cogspeech/diar/grid_search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "cogspeech/common/error.h"
#include "cogspeech/common/parallel.h"
#include "cogspeech/common/text.h"
#include "json.hpp"

namespace cogspeech::diar {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool IsAdapterKey(const std::string& name) {
  return name.rfind("diarizer.", 0) == 0 || name.rfind("vad.", 0) == 0;
}

const std::set<std::string>& DspKeys() {
  static const std::set<std::string> keys = {
      "highpass.enabled", "highpass.order",      "highpass.cutoff_hz",
      "gate.enabled",     "gate.frame_ms",       "gate.hop_ms",
      "gate.noise_quantile", "gate.margin_db",   "gate.alpha",
      "loudness.enabled", "loudness.target_lufs", "output_gain_db"};
  return keys;
}

std::string CanonicalValue(const std::string& name, const nlohmann::ordered_json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return FormatDouble(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("grid schema: value of '" + name +
                    "' must be a number, boolean or string");
}

double NumberOf(const std::string& name, const std::string& value) {
  auto d = ParseDouble(value);
  if (!d || !std::isfinite(*d)) {
    throw ConfigError("grid point: '" + name + "' expects a number, got '" + value + "'");
  }
  return *d;
}

bool BoolOf(const std::string& name, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("grid point: '" + name + "' expects a boolean, got '" + value + "'");
}

struct Tally {
  double errors = 0.0, scored = 0.0;
  double jer_sum = 0.0;
  std::size_t jer_count = 0;
  double purity_overlap = 0.0, hyp_total = 0.0;
  double coverage_overlap = 0.0, ref_total = 0.0;

  void Add(const DiarizationScores& s) {
    errors += s.der.errors_s();
    scored += s.der.scored_total_s;
    if (s.jer) {
      jer_sum += *s.jer;
      ++jer_count;
    }
    purity_overlap += s.purity_coverage.purity_overlap_s;
    hyp_total += s.purity_coverage.hyp_total_s;
    coverage_overlap += s.purity_coverage.coverage_overlap_s;
    ref_total += s.purity_coverage.ref_total_s;
  }
  DiarMetrics Finish() const {
    return {scored > 0.0 ? errors / scored : kNaN,
            jer_count > 0 ? jer_sum / static_cast<double>(jer_count) : kNaN,
            hyp_total > 0.0 ? purity_overlap / hyp_total : kNaN,
            ref_total > 0.0 ? coverage_overlap / ref_total : kNaN};
  }
};

DiarMetrics Evaluate(const GridPoint& point, const std::vector<DiarSession>& sessions,
                     const std::set<std::string>& subjects, DiarizerAdapter& adapter,
                     const GridSearchOptions& options) {
  const dsp::PreprocessConfig cfg = ApplyGridPoint(point, options.base);
  const auto params = AdapterParams(point);
  Tally tally;
  for (const DiarSession& s : sessions) {
    if (!subjects.contains(s.subject_id)) continue;
    const dsp::PreprocessResult pre = dsp::Preprocess(s.audio, cfg);
    const corpus::Timeline hyp = adapter.Diarize({s, pre.signal, params});
    tally.Add(ScoreDiarization(s.reference, hyp, options.scoring));
  }
  return tally.Finish();
}

// NaN sorts last.
double Key(double v, bool descending) {
  if (std::isnan(v)) return std::numeric_limits<double>::infinity();
  return descending ? -v : v;
}

}  // namespace

std::size_t GridSchema::Size() const {
  if (parameters.empty()) return 0;
  std::size_t n = 1;
  for (const auto& p : parameters) n *= p.values.size();
  return n;
}

GridSchema ParseGridSchema(std::string_view json_text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid schema: ") + e.what());
  }
  if (!doc.is_object() || doc.empty()) {
    throw ConfigError("grid schema: expected a non-empty JSON object");
  }
  GridSchema schema;
  for (const auto& [name, values] : doc.items()) {
    if (!DspKeys().contains(name) && !IsAdapterKey(name)) {
      throw ConfigError("grid schema: unknown parameter '" + name + "'");
    }
    if (!values.is_array() || values.empty()) {
      throw ConfigError("grid schema: '" + name + "' must be a non-empty array");
    }
    GridParameter p{name, {}};
    for (const auto& v : values) p.values.push_back(CanonicalValue(name, v));
    schema.parameters.push_back(std::move(p));
  }
  return schema;
}

GridSchema LoadGridSchema(const std::filesystem::path& path) {
  return ParseGridSchema(ReadTextFile(path));
}

GridPoint PointAt(const GridSchema& schema, std::size_t index) {
  GridPoint point(schema.parameters.size());
  for (std::size_t k = schema.parameters.size(); k-- > 0;) {
    const auto& p = schema.parameters[k];
    point[k] = {p.name, p.values[index % p.values.size()]};
    index /= p.values.size();
  }
  return point;
}

dsp::PreprocessConfig ApplyGridPoint(const GridPoint& point,
                                     dsp::PreprocessConfig cfg) {
  for (const auto& [name, value] : point) {
    if (IsAdapterKey(name)) continue;
    if (name == "highpass.enabled") cfg.highpass_enabled = BoolOf(name, value);
    else if (name == "highpass.order") {
      const double v = NumberOf(name, value);
      if (v != std::floor(v)) throw ConfigError("grid point: highpass.order must be an integer");
      cfg.highpass_order = static_cast<int>(v);
    } else if (name == "highpass.cutoff_hz") cfg.highpass_cutoff_hz = NumberOf(name, value);
    else if (name == "gate.enabled") cfg.gate_enabled = BoolOf(name, value);
    else if (name == "gate.frame_ms") cfg.gate_frame_ms = NumberOf(name, value);
    else if (name == "gate.hop_ms") cfg.gate_hop_ms = NumberOf(name, value);
    else if (name == "gate.noise_quantile") cfg.gate_noise_quantile = NumberOf(name, value);
    else if (name == "gate.margin_db") cfg.gate_margin_db = NumberOf(name, value);
    else if (name == "gate.alpha") cfg.gate_alpha = NumberOf(name, value);
    else if (name == "loudness.enabled") cfg.loudness_enabled = BoolOf(name, value);
    else if (name == "loudness.target_lufs") cfg.loudness_target_lufs = NumberOf(name, value);
    else if (name == "output_gain_db") cfg.output_gain_db = NumberOf(name, value);
    else throw ConfigError("grid point: unknown parameter '" + name + "'");
  }
  return cfg;
}

std::map<std::string, std::string> AdapterParams(const GridPoint& point) {
  std::map<std::string, std::string> out;
  for (const auto& [name, value] : point) {
    if (IsAdapterKey(name)) out[name] = value;
  }
  return out;
}

ParticipantSplit SplitParticipants(const std::vector<DiarSession>& sessions,
                                   double validation_fraction, std::uint64_t seed) {
  std::set<std::string> unique;
  for (const auto& s : sessions) unique.insert(s.subject_id);
  if (unique.size() < 2) {
    throw ValidationError("grid search needs at least two participants");
  }
  std::vector<std::string> ids(unique.begin(), unique.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size(); i-- > 1;) {
    std::swap(ids[i], ids[rng() % (i + 1)]);
  }
  auto n_val = static_cast<std::size_t>(
      std::lround(validation_fraction * static_cast<double>(ids.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, ids.size() - 1);
  ParticipantSplit split;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (i < n_val ? split.validation : split.tuning).insert(ids[i]);
  }
  return split;
}

GridSearchResult RunGridSearch(const GridSchema& schema,
                               const std::vector<DiarSession>& sessions,
                               DiarizerAdapter& adapter,
                               const GridSearchOptions& options) {
  const std::size_t n = schema.Size();
  if (n == 0) throw ConfigError("grid schema declares no points");
  GridSearchResult out;
  out.split = SplitParticipants(sessions, options.validation_fraction, options.seed);

  std::vector<GridResult> results(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    GridResult& r = results[i];
    r.index = i;
    r.point = PointAt(schema, i);
    try {
      r.tuning = Evaluate(r.point, sessions, out.split.tuning, adapter, options);
    } catch (const Error& e) {
      r.failed = true;
      r.error = e.what();
    }
  });

  std::vector<GridResult> ok, failed;
  for (auto& r : results) (r.failed ? failed : ok).push_back(std::move(r));
  out.failed_count = failed.size();
  if (ok.empty()) {
    throw AdapterError("all " + std::to_string(n) + " grid points failed; first error: " +
                       failed.front().error);
  }
  std::stable_sort(ok.begin(), ok.end(), [](const GridResult& a, const GridResult& b) {
    const auto ka = std::make_tuple(Key(a.tuning.der, false), Key(a.tuning.jer, false),
                                    Key(a.tuning.purity, true), a.index);
    const auto kb = std::make_tuple(Key(b.tuning.der, false), Key(b.tuning.jer, false),
                                    Key(b.tuning.purity, true), b.index);
    return ka < kb;
  });
  ok.front().validation =
      Evaluate(ok.front().point, sessions, out.split.validation, adapter, options);
  out.ranked = std::move(ok);
  for (auto& r : failed) out.ranked.push_back(std::move(r));
  return out;
}

std::string GridResultsToCsv(const GridSchema& schema, const GridSearchResult& result) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : FormatDouble(v); };
  std::string csv = "rank,index";
  for (const auto& p : schema.parameters) csv += "," + CsvField(p.name);
  csv += ",status,tuning_der,tuning_jer,tuning_purity,tuning_coverage,"
         "validation_der,validation_jer,validation_purity,validation_coverage\n";
  std::size_t rank = 0;
  for (const GridResult& r : result.ranked) {
    csv += r.failed ? std::string() : std::to_string(++rank);
    csv += "," + std::to_string(r.index);
    for (const auto& [name, value] : r.point) csv += "," + CsvField(value);
    if (r.failed) {
      csv += "," + CsvField("failed: " + r.error) + ",,,,,,,,\n";
      continue;
    }
    csv += ",ok," + num(r.tuning.der) + "," + num(r.tuning.jer) + "," +
           num(r.tuning.purity) + "," + num(r.tuning.coverage);
    if (r.validation) {
      csv += "," + num(r.validation->der) + "," + num(r.validation->jer) + "," +
             num(r.validation->purity) + "," + num(r.validation->coverage);
    } else {
      csv += ",,,,";
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace cogspeech::diar
