#ifndef COGSPEECH_DSP_CHAIN_H_
#define COGSPEECH_DSP_CHAIN_H_

#include <string>
#include <utility>
#include <vector>

#include "cogspeech/common/signal.h"

namespace cogspeech::dsp {

// Settings for the fixed conditioning order
// high-pass -> spectral gate -> loudness normalisation (-> output gain).
struct PreprocessConfig {
  bool highpass_enabled = true;
  int highpass_order = 6;
  double highpass_cutoff_hz = 100.0;

  bool gate_enabled = true;
  double gate_frame_ms = 25.0;
  double gate_hop_ms = 10.0;
  double gate_noise_quantile = 0.10;
  double gate_margin_db = 18.0;
  double gate_alpha = 0.3;

  bool loudness_enabled = true;
  double loudness_target_lufs = -23.0;

  // Applied after every other stage; 0 dB is a no-op.
  double output_gain_db = 0.0;
};

// One line of the audit log.
struct AuditEntry {
  std::string stage;
  std::vector<std::pair<std::string, std::string>> params;
  double output_rms_dbfs = 0.0;
};

struct PreprocessResult {
  Signal signal;
  std::vector<AuditEntry> audit;
  double applied_gain_db = 0.0;
  std::size_t samples_over_full_scale = 0;
};

PreprocessResult Preprocess(const Signal& x, const PreprocessConfig& cfg);

// {"stage":..., "params":{...}, "output_rms_dbfs":...} per line. When
// `recording` is non-empty it is added as a "recording" field.
std::string AuditToJsonLines(const std::vector<AuditEntry>& audit,
                             const std::string& recording = "");

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_CHAIN_H_
