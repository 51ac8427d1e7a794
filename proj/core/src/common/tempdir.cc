#include "cogspeech/common/tempdir.h"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace cogspeech {

std::filesystem::path TempDirectory() {
  if (const char* env = std::getenv(kTempDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::temp_directory_path();
}

std::filesystem::path UniqueTempPath(std::string_view stem) {
  static std::atomic<unsigned long long> counter{0};
  const unsigned long long n = counter.fetch_add(1);
  return TempDirectory() / ("cogspeech-" + std::to_string(::getpid()) + "-" +
                            std::to_string(n) + "-" + std::string(stem));
}

}  // namespace cogspeech
