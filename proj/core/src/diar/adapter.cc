#include "cogspeech/diar/adapter.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <system_error>

#include "cogspeech/common/error.h"
#include "cogspeech/common/tempdir.h"
#include "cogspeech/corpus/rttm.h"
#include "cogspeech/dsp/wav.h"

namespace cogspeech::diar {
namespace {

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''"; else out += c;
  }
  return out + "'";
}

struct TempFiles {
  std::filesystem::path wav, rttm;
  ~TempFiles() {
    std::error_code ec;
    std::filesystem::remove(wav, ec);
    std::filesystem::remove(rttm, ec);
  }
};

}  // namespace

std::string SubprocessAdapter::Expand(
    const std::string& command_template,
    const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < command_template.size()) {
    const std::size_t open = command_template.find('{', pos);
    if (open == std::string::npos) {
      out += command_template.substr(pos);
      break;
    }
    const std::size_t close = command_template.find('}', open);
    if (close == std::string::npos) {
      throw ConfigError("adapter command: unterminated placeholder");
    }
    out += command_template.substr(pos, open - pos);
    const std::string key = command_template.substr(open + 1, close - open - 1);
    auto it = values.find(key);
    if (it == values.end()) {
      throw ConfigError("adapter command: unknown placeholder {" + key + "}");
    }
    out += it->second;
    pos = close + 1;
  }
  return out;
}

corpus::Timeline SubprocessAdapter::Diarize(const DiarRequest& request) {
  TempFiles files;
  files.wav = UniqueTempPath(request.session.session_id + ".wav");
  files.rttm = UniqueTempPath(request.session.session_id + ".rttm");
  try {
    dsp::WriteWav(files.wav, request.audio);
  } catch (const Error& e) {
    throw AdapterError(std::string("cannot stage audio: ") + e.what());
  }
  std::map<std::string, std::string> values;
  for (const auto& [k, v] : request.params) values[k] = v;
  values["input"] = ShellQuote(files.wav.string());
  values["output"] = ShellQuote(files.rttm.string());
  values["session"] = ShellQuote(request.session.session_id);
  const std::string cmd = Expand(template_, values);
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    throw AdapterError("diarizer exited with status " + std::to_string(status) +
                       " for session " + request.session.session_id);
  }
  if (!std::filesystem::exists(files.rttm)) {
    throw AdapterError("diarizer wrote no RTTM for session " +
                       request.session.session_id);
  }
  try {
    return corpus::ReadRttmFile(files.rttm);
  } catch (const Error& e) {
    throw AdapterError("diarizer output for session " +
                       request.session.session_id + ": " + e.what());
  }
}

corpus::Timeline EnergyStubDiarize(const Signal& x, double threshold_dbfs,
                                   const std::string& label) {
  const auto frame = static_cast<std::size_t>(std::lround(0.010 * x.sample_rate));
  std::vector<corpus::Segment> segments;
  double run_start = -1.0;
  const std::size_t n_frames = frame == 0 ? 0 : x.size() / frame;
  for (std::size_t f = 0; f <= n_frames; ++f) {
    bool active = false;
    if (f < n_frames) {
      double e = 0.0;
      for (std::size_t i = f * frame; i < (f + 1) * frame; ++i) {
        e += x.samples[i] * x.samples[i];
      }
      const double rms = std::sqrt(e / static_cast<double>(frame));
      active = rms > 0.0 && 20.0 * std::log10(rms) > threshold_dbfs;
    }
    const double t = static_cast<double>(f * frame) / x.sample_rate;
    if (active && run_start < 0.0) {
      run_start = t;
    } else if (!active && run_start >= 0.0) {
      segments.push_back({label, run_start, t - run_start});
      run_start = -1.0;
    }
  }
  return corpus::Timeline(std::move(segments));
}

}  // namespace cogspeech::diar
