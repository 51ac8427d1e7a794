#ifndef COGSPEECH_DSP_WAV_H_
#define COGSPEECH_DSP_WAV_H_

#include <filesystem>

#include "cogspeech/common/signal.h"

namespace cogspeech::dsp {

enum class WavFormat { kPcm16, kPcm24, kFloat32 };

// Reads RIFF/WAVE with 8/16/24/32-bit PCM or 32/64-bit float samples
// (including WAVE_FORMAT_EXTENSIBLE). Multichannel input is downmixed by
// averaging. Throws InputError on unreadable or unsupported files.
Signal ReadWav(const std::filesystem::path& path);

// Integer formats round to nearest and saturate at full scale; returns the
// number of samples that were saturated.
std::size_t WriteWav(const std::filesystem::path& path, const Signal& x,
                     WavFormat format = WavFormat::kFloat32);

}  // namespace cogspeech::dsp

#endif  // COGSPEECH_DSP_WAV_H_
