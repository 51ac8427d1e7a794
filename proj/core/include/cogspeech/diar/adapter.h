#ifndef COGSPEECH_DIAR_ADAPTER_H_
#define COGSPEECH_DIAR_ADAPTER_H_

#include <functional>
#include <map>
#include <string>

#include "cogspeech/common/signal.h"
#include "cogspeech/corpus/types.h"

namespace cogspeech::diar {

// One recording prepared for diarization.
struct DiarSession {
  std::string session_id;
  // Participant identity used for the disjoint tuning/validation split.
  std::string subject_id;
  Signal audio;
  corpus::Timeline reference;
};

struct DiarRequest {
  const DiarSession& session;
  // Preprocessed audio for this grid point.
  const Signal& audio;
  // diarizer.* and vad.* entries of the grid point.
  const std::map<std::string, std::string>& params;
};

// External diarizer. Implementations must tolerate concurrent calls for
// different requests. Failures are reported by throwing AdapterError.
class DiarizerAdapter {
 public:
  virtual ~DiarizerAdapter() = default;
  virtual corpus::Timeline Diarize(const DiarRequest& request) = 0;
};

// In-process adapter around a callable.
class FunctionAdapter : public DiarizerAdapter {
 public:
  using Fn = std::function<corpus::Timeline(const DiarRequest&)>;
  explicit FunctionAdapter(Fn fn) : fn_(std::move(fn)) {}
  corpus::Timeline Diarize(const DiarRequest& request) override {
    return fn_(request);
  }

 private:
  Fn fn_;
};

// Runs a shell command per request.
//
// Contract: the audio is written as 32-bit float mono WAV to a temporary
// path. In `command_template`, {input} is replaced by that path, {output} by
// the path where the command must write RTTM, {session} by the session id,
// and {name} by the value of grid parameter `name` (for example
// {diarizer.threshold}). Paths are single-quoted. A nonzero exit status, a
// missing output file or unparsable RTTM is a failure. Temporary files are
// removed afterwards.
class SubprocessAdapter : public DiarizerAdapter {
 public:
  explicit SubprocessAdapter(std::string command_template)
      : template_(std::move(command_template)) {}
  corpus::Timeline Diarize(const DiarRequest& request) override;

  // The command line for the given substitutions; unknown placeholders are
  // a ConfigError.
  static std::string Expand(const std::string& command_template,
                            const std::map<std::string, std::string>& values);

 private:
  std::string template_;
};

// Reference energy diarizer: 10 ms frames whose RMS exceeds `threshold_dbfs`
// become speech of a single speaker `label`; runs are merged.
corpus::Timeline EnergyStubDiarize(const Signal& x, double threshold_dbfs = -60.0,
                                   const std::string& label = "spk0");

}  // namespace cogspeech::diar

#endif  // COGSPEECH_DIAR_ADAPTER_H_
