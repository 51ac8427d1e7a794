#ifndef COGSPEECH_TOOLS_CLI_RUN_MANIFEST_H_
#define COGSPEECH_TOOLS_CLI_RUN_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cogspeech::cli {

std::string Sha256Hex(std::string_view data);
// Throws InputError when the file cannot be read.
std::string Sha256File(const std::filesystem::path& path);

// Everything needed to re-run a command and check its outputs. Holds no
// timestamps so identical runs produce identical manifests.
struct RunManifest {
  std::string tool = "cogspeech";
  std::string version;
  std::string subcommand;
  // Arguments after the program name, verbatim.
  std::vector<std::string> argv;
  std::map<std::string, std::string> config;
  std::string config_sha256;
  long long seed = 0;
  // (path, sha256) in the order they were registered.
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;
};

std::string RunManifestToJson(const RunManifest& m);
// Throws ParseError.
RunManifest ParseRunManifest(std::string_view json_text);

}  // namespace cogspeech::cli

#endif  // COGSPEECH_TOOLS_CLI_RUN_MANIFEST_H_
