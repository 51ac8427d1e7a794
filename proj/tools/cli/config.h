#ifndef COGSPEECH_TOOLS_CLI_CONFIG_H_
#define COGSPEECH_TOOLS_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cogspeech/dsp/chain.h"
#include "cogspeech/dsp/wav.h"
#include "cogspeech/features/feature_sets.h"
#include "cogspeech/qc/qc.h"
#include "cogspeech/streams/streams.h"

namespace cogspeech::cli {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

// Every accepted key with its default, in documentation order.
const std::vector<ConfigKey>& ConfigKeys();

// Flat key -> value settings. Files use "key = value" lines; "[section]"
// prefixes following keys with "section.". '#' and ';' start comments, inline
// ones only after whitespace.
// Unknown keys and malformed values are ConfigErrors.
class Config {
 public:
  Config();  // defaults

  void LoadFile(const std::filesystem::path& path);
  void LoadText(std::string_view text, const std::string& origin);
  // "key=value".
  void Override(std::string_view assignment);
  void Set(const std::string& key, const std::string& value);

  std::string GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  long long GetInt(const std::string& key) const;
  bool GetBool(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // "key=value\n" in key order; hashed into run manifests.
  std::string Canonical() const;

  dsp::PreprocessConfig Preprocess() const;
  dsp::WavFormat OutputFormat() const;
  qc::QcThresholds QcThresholds() const;
  qc::QcOptions QcOptions() const;
  streams::MaskOptions MaskOptions() const;
  double CrossfadeMs() const;
  features::ExtractionConfig Extraction() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cogspeech::cli

#endif  // COGSPEECH_TOOLS_CLI_CONFIG_H_
