#include "cogspeech/dsp/chain.h"

#include <cmath>
#include "json.hpp"

#include "cogspeech/common/numeric.h"
#include "cogspeech/common/text.h"
#include "cogspeech/dsp/filter.h"
#include "cogspeech/dsp/loudness.h"
#include "cogspeech/dsp/spectral_gate.h"

namespace cogspeech::dsp {
namespace {

double RmsDbfs(const Signal& x) {
  if (x.empty()) return -120.0;
  double ss = 0.0;
  for (double s : x.samples) ss += s * s;
  return PowerToDb(ss / static_cast<double>(x.size()));
}

}  // namespace

PreprocessResult Preprocess(const Signal& x, const PreprocessConfig& cfg) {
  PreprocessResult result;
  Signal cur = x;
  if (cfg.highpass_enabled) {
    const FilterSpec spec =
        DesignHighpass(cfg.highpass_order, cfg.highpass_cutoff_hz, cur.sample_rate);
    cur = ApplyFilter(spec, cur);
    result.audit.push_back(
        {"highpass",
         {{"order", std::to_string(cfg.highpass_order)},
          {"cutoff_hz", FormatDouble(cfg.highpass_cutoff_hz)}},
         RmsDbfs(cur)});
  }
  if (cfg.gate_enabled) {
    GateConfig gate;
    gate.frame_len =
        static_cast<std::size_t>(std::lround(cfg.gate_frame_ms * 1e-3 * cur.sample_rate));
    gate.hop =
        static_cast<std::size_t>(std::lround(cfg.gate_hop_ms * 1e-3 * cur.sample_rate));
    gate.noise_quantile = cfg.gate_noise_quantile;
    gate.threshold_margin_db = cfg.gate_margin_db;
    gate.alpha = cfg.gate_alpha;
    AuditEntry entry{"spectral_gate",
                     {{"alpha", FormatDouble(cfg.gate_alpha)},
                      {"frame_len", std::to_string(gate.frame_len)},
                      {"hop", std::to_string(gate.hop)},
                      {"noise_quantile", FormatDouble(cfg.gate_noise_quantile)},
                      {"threshold_margin_db", FormatDouble(cfg.gate_margin_db)}},
                     0.0};
    if (cur.size() >= gate.frame_len) {
      cur = SpectralGate(cur, gate);
    } else {
      ValidateGateConfig(gate);
      entry.params.emplace_back("skipped", "shorter than one frame");
    }
    entry.output_rms_dbfs = RmsDbfs(cur);
    result.audit.push_back(std::move(entry));
  }
  if (cfg.loudness_enabled) {
    AuditEntry entry{"loudness",
                     {{"target_lufs", FormatDouble(cfg.loudness_target_lufs)}},
                     0.0};
    if (MeasureLoudness(cur).BelowGate()) {
      entry.params.emplace_back("skipped", "below absolute gate");
    } else {
      NormalizedSignal norm = NormalizeLoudness(cur, cfg.loudness_target_lufs);
      cur = std::move(norm.signal);
      result.applied_gain_db = norm.applied_gain_db;
      entry.params.emplace_back("gain_db", FormatDouble(norm.applied_gain_db));
      entry.params.emplace_back("samples_over_full_scale",
                                std::to_string(norm.samples_over_full_scale));
    }
    entry.output_rms_dbfs = RmsDbfs(cur);
    result.audit.push_back(std::move(entry));
  }
  if (cfg.output_gain_db != 0.0) {
    cur = ApplyGainDb(cur, cfg.output_gain_db);
    result.audit.push_back({"output_gain",
                            {{"gain_db", FormatDouble(cfg.output_gain_db)}},
                            RmsDbfs(cur)});
  }
  for (double s : cur.samples) {
    if (std::abs(s) > 1.0) ++result.samples_over_full_scale;
  }
  result.signal = std::move(cur);
  return result;
}

std::string AuditToJsonLines(const std::vector<AuditEntry>& audit,
                             const std::string& recording) {
  std::string out;
  for (const AuditEntry& e : audit) {
    nlohmann::ordered_json j;
    if (!recording.empty()) j["recording"] = recording;
    j["stage"] = e.stage;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.params) params[k] = v;
    j["params"] = std::move(params);
    j["output_rms_dbfs"] = e.output_rms_dbfs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace cogspeech::dsp
