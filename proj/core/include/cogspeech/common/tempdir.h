#ifndef COGSPEECH_COMMON_TEMPDIR_H_
#define COGSPEECH_COMMON_TEMPDIR_H_

#include <filesystem>
#include <string_view>

namespace cogspeech {

// Environment variable that overrides the scratch directory.
inline constexpr const char* kTempDirEnv = "COGSPEECH_TMPDIR";

// $COGSPEECH_TMPDIR when set, otherwise the system temp directory.
std::filesystem::path TempDirectory();

// A fresh path under TempDirectory() containing the process id, a counter
// and `stem`; nothing is created on disk.
std::filesystem::path UniqueTempPath(std::string_view stem);

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_TEMPDIR_H_
