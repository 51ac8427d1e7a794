// Energy-threshold diarizer honouring the subprocess adapter contract:
//   cogspeech-stub-diarizer --input in.wav --output out.rttm [--threshold-dbfs -60]
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cogspeech/common/error.h"
#include "cogspeech/corpus/rttm.h"
#include "cogspeech/diar/adapter.h"
#include "cogspeech/dsp/wav.h"

int main(int argc, char** argv) {
  CLI::App app{"Single-speaker energy diarizer", "cogspeech-stub-diarizer"};
  std::string input, output, session;
  double threshold = -60.0;
  app.add_option("--input", input)->required();
  app.add_option("--output", output)->required();
  app.add_option("--session", session, "recording id written to the RTTM");
  app.add_option("--threshold-dbfs", threshold);
  CLI11_PARSE(app, argc, argv);
  try {
    const auto x = cogspeech::dsp::ReadWav(input);
    const auto tl = cogspeech::diar::EnergyStubDiarize(x, threshold);
    if (session.empty()) session = std::filesystem::path(input).stem().string();
    cogspeech::corpus::WriteRttmFile(output, tl, session);
  } catch (const cogspeech::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
