#include "config.h"

#include <cmath>

#include "cogspeech/common/error.h"
#include "cogspeech/common/text.h"

namespace cogspeech::cli {
namespace {

bool ParseBool(std::string_view v, bool& out) {
  const std::string s = ToLower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
  return false;
}

enum class Kind { kDouble, kInt, kBool, kString };

Kind KindOf(const std::string& key) {
  static const std::map<std::string, Kind> kinds = {
      {"seed", Kind::kInt},
      {"highpass.enabled", Kind::kBool},
      {"highpass.order", Kind::kInt},
      {"gate.enabled", Kind::kBool},
      {"loudness.enabled", Kind::kBool},
      {"output.wav_format", Kind::kString},
      {"qc.rms_on_active_frames", Kind::kBool},
      {"streams.participant_priority", Kind::kBool},
      {"diar.score_overlap", Kind::kBool},
      {"diar.adapter", Kind::kString},
      {"cv.k_outer", Kind::kInt},
      {"cv.k_inner", Kind::kInt},
  };
  auto it = kinds.find(key);
  return it == kinds.end() ? Kind::kDouble : it->second;
}

}  // namespace

const std::vector<ConfigKey>& ConfigKeys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "0", "seed for every shuffle (folds, participant splits)"},
      {"highpass.enabled", "true", "Butterworth high-pass stage"},
      {"highpass.order", "6", "filter order"},
      {"highpass.cutoff_hz", "100", "-3 dB cutoff"},
      {"gate.enabled", "true", "spectral gate stage"},
      {"gate.frame_ms", "25", "STFT frame"},
      {"gate.hop_ms", "10", "STFT hop"},
      {"gate.noise_quantile", "0.1", "per-bin noise profile quantile"},
      {"gate.margin_db", "18", "gate threshold above the noise profile"},
      {"gate.alpha", "0.3", "attenuation of gated bins (0 = none, 1 = full)"},
      {"loudness.enabled", "true", "integrated loudness normalisation"},
      {"loudness.target_lufs", "-23", "target integrated loudness"},
      {"output_gain_db", "0", "gain applied after all stages"},
      {"output.wav_format", "float32", "float32, pcm16 or pcm24"},
      {"qc.min_duration_s", "15", "duration must exceed this"},
      {"qc.min_rms_dbfs", "-55", "RMS level must exceed this"},
      {"qc.max_clip_ratio", "0.015", "clipped-sample share must stay below this"},
      {"qc.min_snr_db", "10", "estimated SNR must exceed this"},
      {"qc.rms_on_active_frames", "false", "energy gate on active frames only"},
      {"streams.crossfade_ms", "10", "linear cross-fade between participant segments"},
      {"streams.taper_ms", "0", "raised-cosine taper inside masked regions"},
      {"streams.participant_priority", "true", "participant wins in overlapped speech"},
      {"features.frame_ms", "25", "analysis frame"},
      {"features.hop_ms", "10", "analysis hop"},
      {"features.f0_min_hz", "60", "pitch search floor"},
      {"features.f0_max_hz", "400", "pitch search ceiling"},
      {"features.voicing_clarity", "0.45", "autocorrelation peak needed for voicing"},
      {"features.min_pause_s", "0.1", "shortest digital-silence run counted as a pause"},
      {"diar.collar_s", "0.25", "scoring collar around reference boundaries"},
      {"diar.score_overlap", "true", "score overlapped reference speech"},
      {"diar.validation_fraction", "0.3", "share of participants held out for validation"},
      {"diar.adapter", "", "diarizer command template with {input} and {output}"},
      {"cv.k_outer", "5", "outer folds"},
      {"cv.k_inner", "3", "inner folds"},
  };
  return keys;
}

Config::Config() {
  for (const auto& k : ConfigKeys()) values_[k.name] = k.default_value;
}

void Config::Set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  const std::string v(Trim(value));
  switch (KindOf(key)) {
    case Kind::kDouble: {
      auto d = ParseDouble(v);
      if (!d || !std::isfinite(*d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
      break;
    }
    case Kind::kInt:
      if (!ParseInt(v)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
      break;
    case Kind::kBool: {
      bool b;
      if (!ParseBool(v, b)) throw ConfigError(key + ": expected true/false, got '" + v + "'");
      break;
    }
    case Kind::kString:
      if (key == "output.wav_format" && v != "float32" && v != "pcm16" && v != "pcm24") {
        throw ConfigError("output.wav_format must be float32, pcm16 or pcm24");
      }
      break;
  }
  values_[key] = v;
}

void Config::Override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  }
  Set(std::string(Trim(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
}

void Config::LoadText(std::string_view text, const std::string& origin) {
  std::string section;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    std::string key(Trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    std::string_view value = line.substr(eq + 1);
    // Inline comments need whitespace before the marker.
    for (std::size_t i = 1; i < value.size(); ++i) {
      if ((value[i] == ';' || value[i] == '#') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
        value = value.substr(0, i);
        break;
      }
    }
    try {
      Set(key, std::string(Trim(value)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void Config::LoadFile(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  LoadText(text, path.string());
}

std::string Config::GetString(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::GetDouble(const std::string& key) const { return *ParseDouble(GetString(key)); }
long long Config::GetInt(const std::string& key) const { return *ParseInt(GetString(key)); }
bool Config::GetBool(const std::string& key) const {
  bool b = false;
  ParseBool(GetString(key), b);
  return b;
}

std::string Config::Canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

dsp::PreprocessConfig Config::Preprocess() const {
  dsp::PreprocessConfig c;
  c.highpass_enabled = GetBool("highpass.enabled");
  c.highpass_order = static_cast<int>(GetInt("highpass.order"));
  c.highpass_cutoff_hz = GetDouble("highpass.cutoff_hz");
  c.gate_enabled = GetBool("gate.enabled");
  c.gate_frame_ms = GetDouble("gate.frame_ms");
  c.gate_hop_ms = GetDouble("gate.hop_ms");
  c.gate_noise_quantile = GetDouble("gate.noise_quantile");
  c.gate_margin_db = GetDouble("gate.margin_db");
  c.gate_alpha = GetDouble("gate.alpha");
  c.loudness_enabled = GetBool("loudness.enabled");
  c.loudness_target_lufs = GetDouble("loudness.target_lufs");
  c.output_gain_db = GetDouble("output_gain_db");
  return c;
}

dsp::WavFormat Config::OutputFormat() const {
  const std::string f = GetString("output.wav_format");
  if (f == "pcm16") return dsp::WavFormat::kPcm16;
  if (f == "pcm24") return dsp::WavFormat::kPcm24;
  return dsp::WavFormat::kFloat32;
}

qc::QcThresholds Config::QcThresholds() const {
  return {GetDouble("qc.min_duration_s"), GetDouble("qc.min_rms_dbfs"),
          GetDouble("qc.max_clip_ratio"), GetDouble("qc.min_snr_db")};
}

qc::QcOptions Config::QcOptions() const {
  qc::QcOptions o;
  o.rms_on_active_frames = GetBool("qc.rms_on_active_frames");
  return o;
}

streams::MaskOptions Config::MaskOptions() const {
  return {GetBool("streams.participant_priority"), GetDouble("streams.taper_ms")};
}

double Config::CrossfadeMs() const { return GetDouble("streams.crossfade_ms"); }

features::ExtractionConfig Config::Extraction() const {
  features::ExtractionConfig e;
  e.f0.frames = {GetDouble("features.frame_ms"), GetDouble("features.hop_ms")};
  e.f0.min_hz = GetDouble("features.f0_min_hz");
  e.f0.max_hz = GetDouble("features.f0_max_hz");
  e.f0.voicing_clarity = GetDouble("features.voicing_clarity");
  e.formants.frames = e.f0.frames;
  e.min_pause_s = GetDouble("features.min_pause_s");
  return e;
}

}  // namespace cogspeech::cli
