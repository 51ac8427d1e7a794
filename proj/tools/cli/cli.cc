#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cogspeech/common/error.h"
#include "cogspeech/common/parallel.h"
#include "cogspeech/common/signal.h"
#include "cogspeech/common/text.h"
#include "cogspeech/corpus/manifest.h"
#include "cogspeech/corpus/rttm.h"
#include "cogspeech/diar/grid_search.h"
#include "cogspeech/diar/metrics.h"
#include "cogspeech/dsp/chain.h"
#include "cogspeech/dsp/wav.h"
#include "cogspeech/features/table.h"
#include "cogspeech/model/cv.h"
#include "cogspeech/model/report.h"
#include "cogspeech/qc/qc.h"
#include "cogspeech/streams/streams.h"
#include "config.h"
#include "json.hpp"
#include "run_manifest.h"

#ifndef COGSPEECH_VERSION
#define COGSPEECH_VERSION "0.0.0"
#endif

namespace cogspeech::cli {
namespace {

namespace fs = std::filesystem;

// Flag values shared by the subcommands.
struct Flags {
  std::string config = "default";
  std::vector<std::string> sets;
  int jobs = 1;
  std::string run_manifest;

  std::string manifest, input, out, out_dir, summary, audit;
  std::string rttm, rttm_dir, audio_dir, streams_dir, participant, id;
  std::string prosody, concat, qc_report, set_name = "EG_ALL";
  std::string ref, hyp, grid, adapter;
  std::string features, target, task, feature_set, cv_report, pipeline;
  std::vector<std::string> cv_files, holdout_files;
  std::size_t dim = 0;
};

// Tracks files for the run manifest.
struct RunContext {
  Config config;
  int jobs = 1;
  std::ostream& out;
  std::ostream& err;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  fs::path default_manifest;
  int exit_code = kExitOk;

  void Input(const fs::path& p) {
    if (std::find(inputs.begin(), inputs.end(), p) == inputs.end()) inputs.push_back(p);
  }
  void Output(const fs::path& p) {
    if (std::find(outputs.begin(), outputs.end(), p) == outputs.end()) outputs.push_back(p);
  }
  void WriteText(const fs::path& p, std::string_view text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    WriteTextFile(p, text);
    Output(p);
  }
  void WriteAudio(const fs::path& p, const Signal& x) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const std::size_t clipped = dsp::WriteWav(p, x, config.OutputFormat());
    if (clipped > 0) {
      err << "warning: " << clipped << " samples saturated while writing " << p.string() << "\n";
    }
    Output(p);
  }
  Signal ReadAudio(const fs::path& p) {
    Input(p);
    return dsp::ReadWav(p);
  }
  std::string ReadText(const fs::path& p) {
    Input(p);
    return ReadTextFile(p);
  }
  corpus::Manifest LoadManifest(const fs::path& p) {
    Input(p);
    return corpus::LoadManifest(p);
  }
};

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required flag ") + flag);
}

fs::path WithSuffix(const fs::path& p, const std::string& suffix) {
  fs::path stem = p;
  stem.replace_extension();
  return fs::path(stem.string() + suffix);
}

// ---------------------------------------------------------------- qc

void CmdQc(const Flags& f, RunContext& ctx) {
  Require(f.out, "--out");
  std::vector<std::pair<std::string, fs::path>> items;
  if (!f.manifest.empty()) {
    const corpus::Manifest m = ctx.LoadManifest(f.manifest);
    for (const auto& r : m.records) items.emplace_back(r.session_id, m.AudioPath(r));
  } else {
    Require(f.input, "--manifest or --input");
    items.emplace_back(f.id.empty() ? fs::path(f.input).stem().string() : f.id, f.input);
  }
  for (const auto& [id, p] : items) ctx.Input(p);
  std::vector<qc::QcReport> reports(items.size());
  const auto thresholds = ctx.config.QcThresholds();
  const auto options = ctx.config.QcOptions();
  ParallelFor(items.size(), ctx.jobs, [&](std::size_t i) {
    reports[i] = qc::QcGate(dsp::ReadWav(items[i].second), thresholds, options);
  });
  std::string jsonl;
  std::string csv = "session_id,verdict,duration_s,rms_dbfs,clip_ratio,snr_db,activity_ratio,reasons\n";
  std::size_t n_fail = 0, n_review = 0;
  auto num = [](double v) { return std::isfinite(v) ? FormatDouble(v) : std::string(); };
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& r = reports[i];
    jsonl += qc::ReportToJson(r, items[i].first) + "\n";
    std::string reasons;
    if (!r.duration_ok) reasons += "duration;";
    if (!r.rms_ok) reasons += "rms;";
    if (!r.clip_ok) reasons += "clipping;";
    if (!r.snr_ok) reasons += "snr;";
    for (const auto& rr : r.review_reasons) reasons += rr + ";";
    if (!reasons.empty()) reasons.pop_back();
    csv += CsvField(items[i].first) + "," + std::string(qc::ToString(r.overall)) + "," +
           num(r.metrics.duration_s) + "," + num(r.metrics.rms_dbfs) + "," +
           num(r.metrics.clip_ratio) + "," + num(r.metrics.snr_db) + "," +
           num(r.metrics.activity_ratio) + "," + CsvField(reasons) + "\n";
    if (r.overall == qc::Verdict::kFail) ++n_fail;
    if (r.overall == qc::Verdict::kReview) ++n_review;
  }
  ctx.WriteText(f.out, jsonl);
  ctx.WriteText(f.summary.empty() ? WithSuffix(f.out, ".summary.csv") : fs::path(f.summary), csv);
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "qc: " << items.size() << " sessions, " << n_fail << " fail, " << n_review
          << " review\n";
  if (n_fail > 0) ctx.exit_code = kExitGateFailures;
}

// --------------------------------------------------------- preprocess

std::string AuditLines(const dsp::PreprocessResult& r, const std::string& id) {
  return dsp::AuditToJsonLines(r.audit, id);
}

void CmdPreprocess(const Flags& f, RunContext& ctx) {
  const dsp::PreprocessConfig cfg = ctx.config.Preprocess();
  if (!f.manifest.empty()) {
    Require(f.out_dir, "--out-dir");
    const corpus::Manifest m = ctx.LoadManifest(f.manifest);
    std::vector<dsp::PreprocessResult> results(m.records.size());
    for (const auto& r : m.records) ctx.Input(m.AudioPath(r));
    ParallelFor(m.records.size(), ctx.jobs, [&](std::size_t i) {
      results[i] = dsp::Preprocess(dsp::ReadWav(m.AudioPath(m.records[i])), cfg);
    });
    std::string audit;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::string& id = m.records[i].session_id;
      ctx.WriteAudio(fs::path(f.out_dir) / (id + ".wav"), results[i].signal);
      audit += AuditLines(results[i], id);
    }
    ctx.WriteText(fs::path(f.out_dir) / "audit.jsonl", audit);
    ctx.default_manifest = fs::path(f.out_dir) / "preprocess.run.json";
    ctx.out << "preprocess: " << results.size() << " recordings\n";
    return;
  }
  Require(f.input, "--manifest or --input");
  Require(f.out, "--out");
  const dsp::PreprocessResult r = dsp::Preprocess(ctx.ReadAudio(f.input), cfg);
  ctx.WriteAudio(f.out, r.signal);
  const std::string id = f.id.empty() ? fs::path(f.input).stem().string() : f.id;
  ctx.WriteText(f.audit.empty() ? WithSuffix(f.out, ".audit.jsonl") : fs::path(f.audit),
                AuditLines(r, id));
  ctx.default_manifest = fs::path(f.out + ".run.json");
  std::string order;
  for (const auto& e : r.audit) order += (order.empty() ? "" : " -> ") + e.stage;
  ctx.out << "preprocess: " << order << "\n";
}

// ------------------------------------------------------------ streams

void BuildStreams(const std::string& id, const Signal& x, const corpus::Timeline& tl,
                  const std::string& participant, const fs::path& out_dir, RunContext& ctx) {
  const Signal prosody = streams::BuildProsodyPreserved(x, tl, participant, ctx.config.MaskOptions());
  const streams::ConcatResult concat =
      streams::BuildConcatenated(x, tl, participant, ctx.config.CrossfadeMs());
  const auto flags = streams::AuditTransitions(concat.signal, concat.boundaries);
  ctx.WriteAudio(out_dir / (id + ".prosody.wav"), prosody);
  ctx.WriteAudio(out_dir / (id + ".concat.wav"), concat.signal);

  std::size_t masked = 0;
  for (std::size_t i = 0; i < x.size(); ++i) masked += prosody.samples[i] != x.samples[i];
  std::string audit;
  nlohmann::ordered_json p;
  p["recording"] = id;
  p["stream"] = "prosody";
  p["participant"] = participant;
  p["samples"] = prosody.size();
  p["changed_samples"] = masked;
  p["participant_priority"] = ctx.config.MaskOptions().participant_priority;
  p["taper_ms"] = ctx.config.MaskOptions().taper_ms;
  audit += p.dump() + "\n";
  std::size_t hard = 0, flagged = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    hard += concat.hard_joins[k];
    flagged += flags[k].flagged;
  }
  nlohmann::ordered_json cs;
  cs["recording"] = id;
  cs["stream"] = "concat";
  cs["samples"] = concat.signal.size();
  cs["segments"] = concat.spans.size();
  cs["crossfade_ms"] = ctx.config.CrossfadeMs();
  cs["hard_joins"] = hard;
  cs["flagged_junctions"] = flagged;
  audit += cs.dump() + "\n";
  for (std::size_t k = 0; k < flags.size(); ++k) {
    nlohmann::ordered_json j;
    j["recording"] = id;
    j["stream"] = "concat";
    j["junction"] = k;
    j["boundary"] = flags[k].boundary;
    j["hard_join"] = static_cast<bool>(concat.hard_joins[k]);
    j["step"] = flags[k].step;
    j["rms_jump_db"] = flags[k].rms_jump_db;
    j["flagged"] = flags[k].flagged;
    audit += j.dump() + "\n";
  }
  ctx.WriteText(out_dir / (id + ".streams.jsonl"), audit);
}

void CmdStreams(const Flags& f, RunContext& ctx) {
  Require(f.out_dir, "--out-dir");
  if (!f.manifest.empty()) {
    Require(f.rttm_dir, "--rttm-dir");
    const corpus::Manifest m = ctx.LoadManifest(f.manifest);
    for (const auto& r : m.records) {
      if (r.participant.empty()) {
        throw InputError("session " + r.session_id + " has no participant label in the manifest");
      }
      const fs::path audio = f.audio_dir.empty() ? m.AudioPath(r)
                                                 : fs::path(f.audio_dir) / (r.session_id + ".wav");
      const fs::path rttm = fs::path(f.rttm_dir) / (r.session_id + ".rttm");
      ctx.Input(rttm);
      BuildStreams(r.session_id, ctx.ReadAudio(audio), corpus::ReadRttmFile(rttm), r.participant,
                   f.out_dir, ctx);
    }
    ctx.default_manifest = fs::path(f.out_dir) / "streams.run.json";
    ctx.out << "streams: " << m.records.size() << " recordings\n";
    return;
  }
  Require(f.input, "--manifest or --input");
  Require(f.rttm, "--rttm");
  Require(f.participant, "--participant");
  const std::string id = f.id.empty() ? fs::path(f.input).stem().string() : f.id;
  ctx.Input(f.rttm);
  BuildStreams(id, ctx.ReadAudio(f.input), corpus::ReadRttmFile(f.rttm), f.participant, f.out_dir,
               ctx);
  ctx.default_manifest = fs::path(f.out_dir) / (id + ".streams.run.json");
  ctx.out << "streams: wrote " << id << ".prosody.wav and " << id << ".concat.wav\n";
}

// ----------------------------------------------------------- features

std::set<std::string> FailedQcSessions(const fs::path& path, RunContext& ctx) {
  std::set<std::string> failed;
  const std::string text = ctx.ReadText(path);
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line(Trim(std::string_view(text).substr(pos, nl - pos)));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("overall").get<std::string>() == "fail") {
        failed.insert(j.at("session_id").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("QC report: ") + e.what(), line_no);
    }
  }
  return failed;
}

void CmdFeatures(const Flags& f, RunContext& ctx) {
  Require(f.out, "--out");
  const features::SetTag tag = features::ParseSetTag(f.set_name);
  if (tag == features::SetTag::kEmbedding) throw ConfigError("use embed-import for embeddings");
  const features::ExtractionConfig cfg = ctx.config.Extraction();

  struct Job {
    std::string id;
    std::optional<fs::path> prosody, concat;
  };
  std::vector<Job> jobs;
  if (!f.manifest.empty()) {
    Require(f.streams_dir, "--streams-dir");
    const corpus::Manifest m = ctx.LoadManifest(f.manifest);
    std::set<std::string> failed;
    if (!f.qc_report.empty()) failed = FailedQcSessions(f.qc_report, ctx);
    for (const auto& r : m.records) {
      Job j{r.session_id, std::nullopt, std::nullopt};
      if (!failed.contains(r.session_id)) {
        const fs::path p = fs::path(f.streams_dir) / (r.session_id + ".prosody.wav");
        const fs::path c = fs::path(f.streams_dir) / (r.session_id + ".concat.wav");
        if (fs::exists(p)) j.prosody = p;
        if (fs::exists(c)) j.concat = c;
      }
      jobs.push_back(std::move(j));
    }
  } else {
    Require(f.prosody, "--manifest or --prosody");
    Require(f.concat, "--concat");
    jobs.push_back({f.id.empty() ? fs::path(f.prosody).stem().stem().string() : f.id,
                    fs::path(f.prosody), fs::path(f.concat)});
  }
  for (const auto& j : jobs) {
    if (j.prosody) ctx.Input(*j.prosody);
    if (j.concat) ctx.Input(*j.concat);
  }
  std::vector<features::FeatureSets> sets(jobs.size());
  ParallelFor(jobs.size(), ctx.jobs, [&](std::size_t i) {
    std::optional<Signal> p, c;
    if (jobs[i].prosody) p = dsp::ReadWav(*jobs[i].prosody);
    if (jobs[i].concat) c = dsp::ReadWav(*jobs[i].concat);
    sets[i] = features::ExtractFeatureSets(p ? &*p : nullptr, c ? &*c : nullptr, cfg);
  });
  std::vector<std::pair<std::string, features::FeatureVector>> rows;
  std::string absences;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& s = sets[i];
    rows.emplace_back(jobs[i].id, tag == features::SetTag::kEgProsody ? s.prosody
                                  : tag == features::SetTag::kEgVqual ? s.vqual
                                                                      : s.all);
    const auto names = features::CanonicalFeatureNames(tag, cfg);
    for (const auto& a : s.absences) {
      if (std::find(names.begin(), names.end(), a.name) == names.end()) continue;
      nlohmann::ordered_json j;
      j["session_id"] = jobs[i].id;
      j["feature"] = a.name;
      j["reason"] = a.reason;
      absences += j.dump() + "\n";
    }
  }
  ctx.WriteText(f.out, features::SerializeFeatureTable(features::BuildFeatureTable(
                           rows, features::CanonicalFeatureNames(tag, cfg))));
  ctx.WriteText(WithSuffix(f.out, ".absences.jsonl"), absences);
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "features: " << rows.size() << " sessions, set " << features::ToString(tag) << "\n";
}

// ------------------------------------------------------- embed-import

void CmdEmbedImport(const Flags& f, RunContext& ctx) {
  Require(f.input, "--input");
  Require(f.out, "--out");
  ctx.Input(f.input);
  const auto vectors = features::LoadEmbeddings(f.input, f.dim);
  std::vector<std::pair<std::string, features::FeatureVector>> rows(vectors.begin(),
                                                                   vectors.end());
  std::vector<std::string> columns;
  if (!rows.empty()) {
    for (const auto& [name, v] : rows.front().second.values) columns.push_back(name);
  }
  ctx.WriteText(f.out, features::SerializeFeatureTable(
                           features::BuildFeatureTable(rows, std::move(columns))));
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "embed-import: " << rows.size() << " sessions\n";
}

// ------------------------------------------------------- diar-metrics

diar::ScoringConfig Scoring(const Config& c) {
  diar::ScoringConfig s;
  s.collar_s = c.GetDouble("diar.collar_s");
  s.score_overlap = c.GetBool("diar.score_overlap");
  if (!(s.collar_s >= 0.0)) throw ConfigError("diar.collar_s must be >= 0");
  return s;
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

void CmdDiarMetrics(const Flags& f, RunContext& ctx) {
  Require(f.ref, "--ref");
  Require(f.hyp, "--hyp");
  Require(f.out, "--out");
  const corpus::Timeline ref = corpus::ParseRttm(ctx.ReadText(f.ref));
  const corpus::Timeline hyp = corpus::ParseRttm(ctx.ReadText(f.hyp));
  const diar::DiarizationScores s = diar::ScoreDiarization(ref, hyp, Scoring(ctx.config));
  nlohmann::ordered_json j;
  j["der"] = OptionalJson(s.der.der);
  j["missed_s"] = s.der.missed_s;
  j["false_alarm_s"] = s.der.false_alarm_s;
  j["confusion_s"] = s.der.confusion_s;
  j["scored_s"] = s.der.scored_total_s;
  j["jer"] = OptionalJson(s.jer);
  j["purity"] = OptionalJson(s.purity_coverage.purity());
  j["coverage"] = OptionalJson(s.purity_coverage.coverage());
  j["collar_s"] = ctx.config.GetDouble("diar.collar_s");
  j["mapping"] = nlohmann::ordered_json::object();
  for (const auto& [h, r] : s.der.mapping) j["mapping"][h] = r;
  ctx.WriteText(f.out, j.dump(2) + "\n");
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "diar-metrics: der " << (s.der.der ? FormatDouble(*s.der.der) : "undefined")
          << "\n";
}

// -------------------------------------------------------- grid-search

// "builtin:reference" returns the reference timeline (a perfect diarizer),
// "builtin:energy" runs the energy stub; anything else is a command template.
std::unique_ptr<diar::DiarizerAdapter> MakeAdapter(const std::string& spec) {
  if (spec.empty()) throw ConfigError("no diarizer: pass --adapter or set diar.adapter");
  if (spec == "builtin:reference") {
    return std::make_unique<diar::FunctionAdapter>(
        [](const diar::DiarRequest& r) { return r.session.reference; });
  }
  if (spec == "builtin:energy") {
    return std::make_unique<diar::FunctionAdapter>([](const diar::DiarRequest& r) {
      double threshold = -60.0;
      if (auto it = r.params.find("diarizer.threshold_dbfs"); it != r.params.end()) {
        const auto v = ParseDouble(it->second);
        if (!v) throw AdapterError("diarizer.threshold_dbfs is not a number");
        threshold = *v;
      }
      return diar::EnergyStubDiarize(r.audio, threshold);
    });
  }
  if (spec.starts_with("builtin:")) throw ConfigError("unknown builtin adapter " + spec);
  return std::make_unique<diar::SubprocessAdapter>(spec);
}

void CmdGridSearch(const Flags& f, RunContext& ctx) {
  Require(f.grid, "--grid");
  Require(f.manifest, "--manifest");
  Require(f.rttm_dir, "--rttm-dir");
  Require(f.out, "--out");
  const diar::GridSchema schema = diar::ParseGridSchema(ctx.ReadText(f.grid));
  const corpus::Manifest m = ctx.LoadManifest(f.manifest);
  std::vector<diar::DiarSession> sessions;
  for (const auto& r : m.records) {
    const fs::path audio = f.audio_dir.empty() ? m.AudioPath(r)
                                               : fs::path(f.audio_dir) / (r.session_id + ".wav");
    const fs::path rttm = fs::path(f.rttm_dir) / (r.session_id + ".rttm");
    sessions.push_back({r.session_id, r.subject_id, ctx.ReadAudio(audio),
                        corpus::ParseRttm(ctx.ReadText(rttm))});
  }
  auto adapter = MakeAdapter(f.adapter.empty() ? ctx.config.GetString("diar.adapter") : f.adapter);
  diar::GridSearchOptions opts;
  opts.scoring = Scoring(ctx.config);
  opts.base = ctx.config.Preprocess();
  opts.validation_fraction = ctx.config.GetDouble("diar.validation_fraction");
  opts.seed = static_cast<std::uint64_t>(ctx.config.GetInt("seed"));
  opts.jobs = ctx.jobs;
  const diar::GridSearchResult result = diar::RunGridSearch(schema, sessions, *adapter, opts);
  ctx.WriteText(f.out, diar::GridResultsToCsv(schema, result));
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "grid-search: " << schema.Size() << " points, " << result.failed_count
          << " failed";
  if (!result.ranked.empty() && !result.ranked.front().failed) {
    ctx.out << ", best index " << result.ranked.front().index << " (tuning DER "
            << FormatDouble(result.ranked.front().tuning.der) << ")";
  }
  ctx.out << "\n";
  for (const auto& r : result.ranked) {
    if (r.failed) ctx.err << "warning: grid point " << r.index << " failed: " << r.error << "\n";
  }
}

// ----------------------------------------------------------------- cv

std::string TagValue(const std::vector<std::pair<std::string, std::string>>& tags,
                     const std::string& key) {
  for (const auto& [k, v] : tags) {
    if (k == key) return v;
  }
  return "all";
}

model::DatasetFilter MakeFilter(corpus::Split split, const std::string& task) {
  model::DatasetFilter filter;
  filter.split = split;
  if (!task.empty() && task != "all") {
    filter.task = corpus::ParseTask(task);
    if (!filter.task) throw ConfigError("unknown task '" + task + "'");
  }
  return filter;
}

std::string NormalizedTask(const std::string& task) {
  return task.empty() ? "all" : ToLower(task);
}

void CmdCv(const Flags& f, RunContext& ctx) {
  Require(f.features, "--features");
  Require(f.manifest, "--manifest");
  Require(f.target, "--target");
  Require(f.out, "--out");
  const model::TargetSpec target = model::ParseTarget(f.target);
  const features::FeatureTable table = features::ParseFeatureTable(ctx.ReadText(f.features));
  const corpus::Manifest m = ctx.LoadManifest(f.manifest);
  const std::string task = NormalizedTask(f.task);
  const model::Dataset data =
      model::BuildDataset(table, m.records, target, MakeFilter(corpus::Split::kDevelopment, task));
  const std::vector<model::PipelineConfig> grid =
      f.grid.empty() ? model::DefaultPipelineGrid(target.kind)
                     : model::ParsePipelineGrid(ctx.ReadText(f.grid), target.kind);
  const auto plan = model::MakeFoldPlan(
      model::SubjectsOf(data), static_cast<int>(ctx.config.GetInt("cv.k_outer")),
      static_cast<int>(ctx.config.GetInt("cv.k_inner")),
      static_cast<std::uint64_t>(ctx.config.GetInt("seed")));
  model::LeakageAuditor auditor;
  model::CvReport report = model::NestedCv(data, grid, plan, {ctx.jobs}, &auditor);
  report.tags = {{"task", task}, {"feature_set", f.feature_set.empty() ? "all" : f.feature_set}};
  if (data.dropped > 0) {
    ctx.err << "warning: " << data.dropped << " sessions dropped (missing features or target)\n";
  }
  for (const auto& w : report.warnings) ctx.err << "warning: " << w << "\n";
  if (report.leakage_violations > 0) {
    throw ValidationError("subject leakage detected in " +
                          std::to_string(report.leakage_violations) + " fits");
  }
  ctx.WriteText(f.out, model::CvReportToJson(report));
  ctx.WriteText(f.summary.empty() ? WithSuffix(f.out, ".summary.csv") : fs::path(f.summary),
                model::CvSummaryCsv(report));
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "cv: " << target.ToString() << " " << report.metric << " "
          << FormatDouble(report.mean) << " +- " << FormatDouble(report.sd) << ", majority "
          << model::ToString(report.majority) << "\n";
}

// ------------------------------------------------------------ holdout

void CmdHoldout(const Flags& f, RunContext& ctx) {
  Require(f.features, "--features");
  Require(f.manifest, "--manifest");
  Require(f.cv_report, "--cv-report");
  Require(f.out, "--out");
  const model::CvReport cv = model::ParseCvReport(ctx.ReadText(f.cv_report));
  const features::FeatureTable table = features::ParseFeatureTable(ctx.ReadText(f.features));
  const corpus::Manifest m = ctx.LoadManifest(f.manifest);
  const std::string task = f.task.empty() ? TagValue(cv.tags, "task") : NormalizedTask(f.task);
  const model::PipelineConfig config =
      f.pipeline.empty() ? cv.majority : model::ParsePipelineConfig(f.pipeline);
  const model::Dataset dev = model::BuildDataset(
      table, m.records, cv.target, MakeFilter(corpus::Split::kDevelopment, task));
  const model::Dataset ho =
      model::BuildDataset(table, m.records, cv.target, MakeFilter(corpus::Split::kHoldout, task));
  model::HoldoutResult result = model::HoldoutEval(dev, ho, config);
  result.tags = cv.tags;
  for (const auto& w : result.warnings) ctx.err << "warning: " << w << "\n";
  ctx.WriteText(f.out, model::HoldoutToJson(result, cv.target));
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "holdout: " << cv.target.ToString() << " " << result.metric << " "
          << FormatDouble(result.value) << " (dev " << FormatDouble(cv.mean) << ")\n";
}

// --------------------------------------------------------- importance

void CmdImportance(const Flags& f, RunContext& ctx) {
  Require(f.features, "--features");
  Require(f.manifest, "--manifest");
  Require(f.out, "--out");
  model::TargetSpec target;
  model::PipelineConfig config;
  std::string task = NormalizedTask(f.task);
  if (!f.cv_report.empty()) {
    const model::CvReport cv = model::ParseCvReport(ctx.ReadText(f.cv_report));
    target = cv.target;
    config = cv.majority;
    if (f.task.empty()) task = TagValue(cv.tags, "task");
  } else {
    Require(f.target, "--cv-report or --target");
    target = model::ParseTarget(f.target);
    config = model::ParsePipelineConfig(f.pipeline.empty() ? "pca=passthrough;svm(C=1,balanced)"
                                                           : f.pipeline);
  }
  if (!f.pipeline.empty()) config = model::ParsePipelineConfig(f.pipeline);
  const features::FeatureTable table = features::ParseFeatureTable(ctx.ReadText(f.features));
  const corpus::Manifest m = ctx.LoadManifest(f.manifest);
  const model::Dataset dev = model::BuildDataset(
      table, m.records, target, MakeFilter(corpus::Split::kDevelopment, task));
  const model::FittedPipeline fitted = model::FitPipeline(dev.x, dev.y, config, target.kind);
  const model::ImportanceResult imp = model::SvmFeatureImportance(fitted, dev.feature_names);
  for (const auto& w : imp.warnings) ctx.err << "warning: " << w << "\n";
  std::string csv = "rank,feature,weight\n";
  for (std::size_t i = 0; i < imp.ranking.size(); ++i) {
    csv += std::to_string(i + 1) + "," + CsvField(imp.ranking[i].name) + "," +
           FormatDouble(imp.ranking[i].weight) + "\n";
  }
  ctx.WriteText(f.out, csv);
  ctx.default_manifest = fs::path(f.out + ".run.json");
  ctx.out << "importance: " << imp.ranking.size() << " features ranked with "
          << model::ToString(config) << "\n";
}

// ------------------------------------------------------------- report

void CmdReport(const Flags& f, RunContext& ctx) {
  Require(f.out_dir, "--out-dir");
  if (f.cv_files.empty()) throw ConfigError("missing required flag --cv");
  std::vector<model::CvReport> cvs;
  for (const auto& p : f.cv_files) cvs.push_back(model::ParseCvReport(ctx.ReadText(p)));
  std::vector<std::pair<model::HoldoutResult, model::TargetSpec>> hos;
  for (const auto& p : f.holdout_files) hos.push_back(model::ParseHoldout(ctx.ReadText(p)));
  const auto entries = model::PairReports(cvs, hos);
  const fs::path dir = f.out_dir;
  ctx.WriteText(dir / "hierarchy.csv", model::RenderHierarchyCsv(entries));
  ctx.WriteText(dir / "hierarchy.md", model::RenderHierarchyMarkdown(entries));
  ctx.WriteText(dir / "levels.csv", model::RenderLevelChartCsv(entries));
  ctx.default_manifest = dir / "report.run.json";
  ctx.out << "report: " << entries.size() << " rows\n";
}

// ------------------------------------------------------------- driver

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfigError;
  if (dynamic_cast<const AdapterError*>(&e)) return kExitAdapterFailure;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e)) {
    return kExitInputError;
  }
  return kExitInputError;
}

std::vector<std::pair<std::string, std::string>> HashFiles(const std::vector<fs::path>& files) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : files) out.emplace_back(p.string(), Sha256File(p));
  return out;
}

int Replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const RunManifest m = ParseRunManifest(ReadTextFile(manifest_path));
  for (const auto& [path, hash] : m.inputs) {
    if (Sha256File(path) != hash) {
      err << "error: input changed since the recorded run: " << path << "\n";
      return kExitInputError;
    }
  }
  if (m.version != COGSPEECH_VERSION) {
    err << "warning: manifest written by version " << m.version << ", running "
        << COGSPEECH_VERSION << "\n";
  }
  std::ostringstream sink;
  const int code = Run(m.argv, sink, err);
  if (code != kExitOk && code != kExitGateFailures) {
    err << "error: replayed command exited with " << code << "\n";
    return code;
  }
  std::size_t mismatches = 0;
  for (const auto& [path, hash] : m.outputs) {
    if (!fs::exists(path) || Sha256File(path) != hash) {
      err << "mismatch: " << path << "\n";
      ++mismatches;
    }
  }
  if (mismatches > 0) {
    err << "replay: " << mismatches << " of " << m.outputs.size() << " outputs differ\n";
    return kExitGateFailures;
  }
  out << "replay: " << m.outputs.size() << " outputs byte-identical\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  std::optional<long long> seed;
  CLI::App app{"Speech-to-cognitive-score pipeline", "cogspeech"};
  app.set_version_flag("--version", COGSPEECH_VERSION);
  app.require_subcommand(1);
  app.add_option("--config", f.config, "config file, or 'default' for built-in defaults");
  app.add_option("--set", f.sets, "override one config key (key=value), repeatable");
  app.add_option("--jobs", f.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--run-manifest", f.run_manifest, "where to write the run manifest");

  using Handler = void (*)(const Flags&, RunContext&);
  std::map<CLI::App*, Handler> handlers;
  auto sub = [&](const char* name, const char* help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    handlers[s] = h;
    return s;
  };

  auto* qc = sub("qc", "quality gates per recording", CmdQc);
  qc->add_option("--manifest", f.manifest);
  qc->add_option("--input", f.input, "single wav instead of a manifest");
  qc->add_option("--id", f.id);
  qc->add_option("--out", f.out, "per-session JSON lines");
  qc->add_option("--summary", f.summary, "summary CSV (default <out>.summary.csv)");

  auto* pre = sub("preprocess", "high-pass, spectral gate, loudness", CmdPreprocess);
  pre->add_option("--input", f.input);
  pre->add_option("--out", f.out);
  pre->add_option("--audit", f.audit, "audit JSON lines (default <out>.audit.jsonl)");
  pre->add_option("--id", f.id);
  pre->add_option("--manifest", f.manifest);
  pre->add_option("--out-dir", f.out_dir);

  auto* st = sub("streams", "prosody-preserved and concatenated streams", CmdStreams);
  st->add_option("--input", f.input);
  st->add_option("--rttm", f.rttm);
  st->add_option("--participant", f.participant);
  st->add_option("--id", f.id);
  st->add_option("--manifest", f.manifest);
  st->add_option("--rttm-dir", f.rttm_dir);
  st->add_option("--audio-dir", f.audio_dir, "use <dir>/<session>.wav instead of manifest audio");
  st->add_option("--out-dir", f.out_dir);

  auto* fe = sub("features", "hand-crafted acoustic feature sets", CmdFeatures);
  fe->add_option("--prosody", f.prosody);
  fe->add_option("--concat", f.concat);
  fe->add_option("--id", f.id);
  fe->add_option("--manifest", f.manifest);
  fe->add_option("--streams-dir", f.streams_dir);
  fe->add_option("--qc", f.qc_report, "QC JSON lines; failed sessions become absent");
  fe->add_option("--set-name", f.set_name, "EG_PROSODY, EG_VQUAL or EG_ALL");
  fe->add_option("--out", f.out);

  auto* em = sub("embed-import", "mean-pool external embeddings", CmdEmbedImport);
  em->add_option("--input", f.input);
  em->add_option("--dim", f.dim, "expected dimension, 0 = infer");
  em->add_option("--out", f.out);

  auto* dm = sub("diar-metrics", "DER, JER, purity and coverage", CmdDiarMetrics);
  dm->add_option("--ref", f.ref);
  dm->add_option("--hyp", f.hyp);
  dm->add_option("--out", f.out);

  auto* gs = sub("grid-search", "preprocessing x diarizer parameter search", CmdGridSearch);
  gs->add_option("--grid", f.grid);
  gs->add_option("--manifest", f.manifest);
  gs->add_option("--rttm-dir", f.rttm_dir);
  gs->add_option("--audio-dir", f.audio_dir);
  gs->add_option("--adapter", f.adapter, "command template or builtin:reference|builtin:energy");
  gs->add_option("--out", f.out);

  auto* cv = sub("cv", "nested cross-validation", CmdCv);
  cv->add_option("--features", f.features);
  cv->add_option("--manifest", f.manifest);
  cv->add_option("--target", f.target, "<level>:<name>, e.g. 1:mmse or 3:mci");
  cv->add_option("--task", f.task, "restrict to one task, or all");
  cv->add_option("--feature-set", f.feature_set, "label carried into reports");
  cv->add_option("--grid", f.grid, "pipeline grid JSON");
  cv->add_option("--out", f.out);
  cv->add_option("--summary", f.summary);

  auto* ho = sub("holdout", "fit on development, score holdout once", CmdHoldout);
  ho->add_option("--features", f.features);
  ho->add_option("--manifest", f.manifest);
  ho->add_option("--cv-report", f.cv_report);
  ho->add_option("--pipeline", f.pipeline, "override the majority-vote configuration");
  ho->add_option("--task", f.task);
  ho->add_option("--out", f.out);

  auto* im = sub("importance", "ranked linear weights", CmdImportance);
  im->add_option("--features", f.features);
  im->add_option("--manifest", f.manifest);
  im->add_option("--cv-report", f.cv_report);
  im->add_option("--target", f.target);
  im->add_option("--pipeline", f.pipeline);
  im->add_option("--task", f.task);
  im->add_option("--out", f.out);

  auto* rp = sub("report", "hierarchy table and level chart data", CmdReport);
  rp->add_option("--cv", f.cv_files);
  rp->add_option("--holdout", f.holdout_files);
  rp->add_option("--out-dir", f.out_dir);

  std::string replay_manifest;
  CLI::App* rep = app.add_subcommand("replay", "re-run a run manifest and compare outputs");
  rep->add_option("--run-manifest", replay_manifest)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rep->parsed()) return Replay(replay_manifest, out, err);

    CLI::App* chosen = app.get_subcommands().front();
    RunContext ctx{.out = out, .err = err};
    if (f.config != "default") {
      ctx.config.LoadFile(f.config);
      ctx.Input(f.config);
    }
    for (const auto& s : f.sets) ctx.config.Override(s);
    if (seed) ctx.config.Set("seed", std::to_string(*seed));
    ctx.jobs = f.jobs == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                           : f.jobs;

    handlers.at(chosen)(f, ctx);

    RunManifest m;
    m.version = COGSPEECH_VERSION;
    m.subcommand = chosen->get_name();
    m.argv = args;
    m.config = ctx.config.values();
    m.config_sha256 = Sha256Hex(ctx.config.Canonical());
    m.seed = ctx.config.GetInt("seed");
    m.inputs = HashFiles(ctx.inputs);
    m.outputs = HashFiles(ctx.outputs);
    const fs::path manifest_path =
        f.run_manifest.empty() ? ctx.default_manifest : fs::path(f.run_manifest);
    if (!manifest_path.empty()) {
      if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
      WriteTextFile(manifest_path, RunManifestToJson(m));
    }
    return ctx.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace cogspeech::cli
